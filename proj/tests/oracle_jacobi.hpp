#pragma once

// Test-only brute-force SVD oracle: one-sided (Hestenes) Jacobi rotations
// orthogonalize the columns of the input. Deliberately independent of the
// subspace-iteration path in the library; used to cross-check singular
// vectors, singular values and rank-k reconstructions.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qclab/matrix.hpp"

namespace oracle {

struct Svd {
    qclab::Matrix u;                // r x c, orthonormal columns where sigma > 0
    std::vector<double> sigma;      // descending
    qclab::Matrix v;                // c x c
};

inline Svd jacobi_svd(const qclab::Matrix& a_in) {
    using qclab::Matrix;
    const std::size_t r = a_in.rows(), c = a_in.cols();
    Matrix a = a_in;
    Matrix v = Matrix::identity(c);

    for (int sweep = 0; sweep < 100; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p < c; ++p) {
            for (std::size_t q = p + 1; q < c; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (std::size_t t = 0; t < r; ++t) {
                    app += a(t, p) * a(t, p);
                    aqq += a(t, q) * a(t, q);
                    apq += a(t, p) * a(t, q);
                }
                if (std::abs(apq) <= 1e-15 * std::sqrt(app * aqq) || apq == 0.0)
                    continue;
                rotated = true;
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;
                for (std::size_t i = 0; i < r; ++i) {
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = cs * aip - sn * aiq;
                    a(i, q) = sn * aip + cs * aiq;
                }
                for (std::size_t i = 0; i < c; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = cs * vip - sn * viq;
                    v(i, q) = sn * vip + cs * viq;
                }
            }
        }
        if (!rotated)
            break;
    }

    std::vector<double> sigma(c);
    for (std::size_t j = 0; j < c; ++j) {
        double s = 0.0;
        for (std::size_t t = 0; t < r; ++t)
            s += a(t, j) * a(t, j);
        sigma[j] = std::sqrt(s);
    }
    std::vector<std::size_t> order(c);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

    Svd out;
    out.sigma.resize(c);
    out.u = Matrix(r, c);
    out.v = Matrix(c, c);
    for (std::size_t j = 0; j < c; ++j) {
        const std::size_t src = order[j];
        out.sigma[j] = sigma[src];
        for (std::size_t i = 0; i < c; ++i)
            out.v(i, j) = v(i, src);
        if (sigma[src] > 0.0)
            for (std::size_t i = 0; i < r; ++i)
                out.u(i, j) = a(i, src) / sigma[src];
    }
    return out;
}

// Frobenius error of the best rank-k approximation, from the oracle SVD.
inline double rank_k_error(const qclab::Matrix& m, int k) {
    const Svd svd = jacobi_svd(m);
    double err2 = 0.0;
    for (std::size_t j = k; j < svd.sigma.size(); ++j)
        err2 += svd.sigma[j] * svd.sigma[j];
    return std::sqrt(err2);
}

}  // namespace oracle
