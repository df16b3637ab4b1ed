#include "qclab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qclab::num {

namespace {

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += a[i] * b[i];
    return s;
}

double dist2(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// Cyclic Jacobi eigendecomposition for the small projected matrices of
// the subspace iteration. Values/vectors returned in descending order.
void jacobi_eigen_small(Matrix s, std::vector<double>& values, Matrix& vectors) {
    const std::size_t n = s.rows();
    vectors = Matrix::identity(n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                off += s(i, j) * s(i, j);
        if (off < 1e-28 * (1.0 + std::abs(s(0, 0))))
            break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = s(p, q);
                if (std::abs(apq) < 1e-300)
                    continue;
                const double app = s(p, p), aqq = s(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double sip = s(i, p), siq = s(i, q);
                    s(i, p) = c * sip - sn * siq;
                    s(i, q) = sn * sip + c * siq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double spi = s(p, i), sqi = s(q, i);
                    s(p, i) = c * spi - sn * sqi;
                    s(q, i) = sn * spi + c * sqi;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = vectors(i, p), viq = vectors(i, q);
                    vectors(i, p) = c * vip - sn * viq;
                    vectors(i, q) = sn * vip + c * viq;
                }
            }
        }
    }
    values.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        values[i] = s(i, i);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::vector<double> sv(n);
    Matrix svec(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        sv[j] = values[order[j]];
        for (std::size_t i = 0; i < n; ++i)
            svec(i, j) = vectors(i, order[j]);
    }
    values = std::move(sv);
    vectors = std::move(svec);
}

// Modified Gram-Schmidt on the columns of v. Columns that lose rank are
// refilled from a deterministic splitmix stream and re-orthogonalized.
void orthonormalize_columns(Matrix& v, std::uint64_t refill_seed) {
    const std::size_t n = v.rows(), p = v.cols();
    std::uint64_t state = refill_seed;
    for (std::size_t j = 0; j < p; ++j) {
        for (int attempt = 0; attempt < 64; ++attempt) {
            for (std::size_t i = 0; i < j; ++i) {
                double proj = 0.0;
                for (std::size_t r = 0; r < n; ++r)
                    proj += v(r, i) * v(r, j);
                for (std::size_t r = 0; r < n; ++r)
                    v(r, j) -= proj * v(r, i);
            }
            double norm2 = 0.0;
            for (std::size_t r = 0; r < n; ++r)
                norm2 += v(r, j) * v(r, j);
            if (norm2 > 1e-24) {
                const double inv = 1.0 / std::sqrt(norm2);
                for (std::size_t r = 0; r < n; ++r)
                    v(r, j) *= inv;
                break;
            }
            for (std::size_t r = 0; r < n; ++r)
                v(r, j) = static_cast<double>(RngState::splitmix64(state) >> 11) * 0x1.0p-53 - 0.5;
        }
    }
}

void fix_column_signs(Matrix& u) {
    for (std::size_t j = 0; j < u.cols(); ++j) {
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < u.rows(); ++i) {
            const double a = std::abs(u(i, j));
            if (a > best) {
                best = a;
                arg = i;
            }
        }
        if (u(arg, j) < 0.0)
            for (std::size_t i = 0; i < u.rows(); ++i)
                u(i, j) = -u(i, j);
    }
}

}  // namespace

Matrix normalize_rows(const Matrix& x, std::vector<std::uint8_t>* zero_rows) {
    Matrix out(x.rows(), x.cols());
    if (zero_rows)
        zero_rows->assign(x.rows(), 0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double* xi = x.row(i);
        const double norm = std::sqrt(dot(xi, xi, x.cols()));
        double* oi = out.row(i);
        if (norm == 0.0) {
            if (zero_rows)
                (*zero_rows)[i] = 1;
            continue;
        }
        for (std::size_t j = 0; j < x.cols(); ++j)
            oi[j] = xi[j] / norm;
    }
    return out;
}

Matrix pairwise_cosine(const Matrix& x, WarningLog* warnings) {
    if (x.rows() == 0 || x.cols() == 0)
        throw std::invalid_argument("pairwise_cosine: empty input");
    x.ensure_finite("pairwise_cosine input");
    std::vector<std::uint8_t> zero;
    const Matrix xn = normalize_rows(x, &zero);
    for (std::size_t i = 0; i < zero.size(); ++i)
        if (zero[i])
            warn(warnings, "pairwise_cosine: row " + std::to_string(i) +
                               " has zero norm; similarity set to 0");
    const std::size_t n = x.rows();
    Matrix sim(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        sim(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            double v = dot(xn.row(i), xn.row(j), x.cols());
            v = std::clamp(v, -1.0, 1.0);
            sim(i, j) = v;
            sim(j, i) = v;
        }
    }
    sim.ensure_finite("pairwise_cosine output");
    return sim;
}

Matrix top_k_singular_vectors(const Matrix& m, int k, double tol, int max_iter) {
    const std::size_t r = m.rows(), c = m.cols();
    if (r == 0 || c == 0)
        throw std::invalid_argument("top_k_singular_vectors: empty matrix");
    const std::size_t small = std::min(r, c);
    if (k < 1 || static_cast<std::size_t>(k) > small)
        throw std::invalid_argument("top_k_singular_vectors: k out of range [1, min(rows, cols)]");
    if (max_iter < 1)
        throw std::invalid_argument("top_k_singular_vectors: max_iter must be >= 1");
    m.ensure_finite("top_k_singular_vectors input");

    // Gram matrix over the shorter side: M^T M if cols <= rows, else M M^T.
    const bool gram_right = (c <= r);
    const std::size_t nb = gram_right ? c : r;
    Matrix b(nb, nb);
    if (gram_right) {
        for (std::size_t i = 0; i < nb; ++i)
            for (std::size_t j = i; j < nb; ++j) {
                double s = 0.0;
                for (std::size_t t = 0; t < r; ++t)
                    s += m(t, i) * m(t, j);
                b(i, j) = s;
                b(j, i) = s;
            }
    } else {
        for (std::size_t i = 0; i < nb; ++i)
            for (std::size_t j = i; j < nb; ++j) {
                const double s = dot(m.row(i), m.row(j), c);
                b(i, j) = s;
                b(j, i) = s;
            }
    }

    // Guard columns past k give the (k+1)-th value an estimate to converge
    // against and speed up the iteration near clustered spectra.
    const std::size_t p = std::min(nb, static_cast<std::size_t>(k) + 2);
    Matrix v(nb, p);
    std::uint64_t init_state = 0x51ab0e5d3a9fULL ^ (nb * 2654435761ULL) ^ p;
    for (std::size_t i = 0; i < nb; ++i)
        for (std::size_t j = 0; j < p; ++j)
            v(i, j) = static_cast<double>(RngState::splitmix64(init_state) >> 11) * 0x1.0p-53 - 0.5;
    orthonormalize_columns(v, 0xfeedULL);

    std::vector<double> ritz(p, 0.0), prev(p, std::numeric_limits<double>::infinity());
    Matrix q;
    bool converged = false;
    for (int iter = 0; iter < max_iter && !converged; ++iter) {
        Matrix z = matmul(b, v);
        orthonormalize_columns(z, 0xbeefULL + static_cast<std::uint64_t>(iter));
        // Rayleigh-Ritz on the iterated subspace.
        Matrix bz = matmul(b, z);
        Matrix h(p, p);
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j) {
                double s = 0.0;
                for (std::size_t t = 0; t < nb; ++t)
                    s += z(t, i) * bz(t, j);
                h(i, j) = s;
            }
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = i + 1; j < p; ++j) {
                const double avg = 0.5 * (h(i, j) + h(j, i));
                h(i, j) = avg;
                h(j, i) = avg;
            }
        jacobi_eigen_small(h, ritz, q);
        v = matmul(z, q);

        const double scale = std::max(std::abs(ritz[0]), 1e-300);
        bool stable = true;
        for (int i = 0; i < k; ++i)
            if (std::abs(ritz[i] - prev[i]) > tol * scale)
                stable = false;
        if (stable) {
            // Residual check ||B v_i - lambda_i v_i|| on the returned columns.
            Matrix bv = matmul(b, v);
            converged = true;
            for (int i = 0; i < k && converged; ++i) {
                double res = 0.0;
                for (std::size_t t = 0; t < nb; ++t) {
                    const double d = bv(t, i) - ritz[i] * v(t, i);
                    res += d * d;
                }
                if (std::sqrt(res) > std::sqrt(tol) * scale)
                    converged = false;
            }
        }
        prev = ritz;
    }
    if (!converged)
        throw std::runtime_error("top_k_singular_vectors: no convergence after " +
                                 std::to_string(max_iter) + " iterations");

    Matrix u(r, k);
    std::uint64_t fill_state = 0xac5dULL;
    for (int j = 0; j < k; ++j) {
        const double sigma = std::sqrt(std::max(ritz[j], 0.0));
        if (gram_right) {
            if (sigma > 1e-12 * std::sqrt(std::max(ritz[0], 1e-300))) {
                for (std::size_t i = 0; i < r; ++i) {
                    double s = 0.0;
                    for (std::size_t t = 0; t < c; ++t)
                        s += m(i, t) * v(t, j);
                    u(i, j) = s / sigma;
                }
            } else {
                // Rank deficiency: fill with any unit vector orthogonal to the
                // columns already produced.
                for (std::size_t i = 0; i < r; ++i)
                    u(i, j) = static_cast<double>(RngState::splitmix64(fill_state) >> 11) * 0x1.0p-53 - 0.5;
            }
        } else {
            for (std::size_t i = 0; i < r; ++i)
                u(i, j) = v(i, j);
        }
    }
    orthonormalize_columns(u, 0x0dd0b1ULL);
    fix_column_signs(u);
    u.ensure_finite("top_k_singular_vectors output");
    return u;
}

KMeansResult kmeans(const Matrix& points, int k, RngState rng, int max_iter) {
    const std::size_t n = points.rows(), d = points.cols();
    if (n == 0)
        throw std::invalid_argument("kmeans: empty input");
    if (k < 1 || static_cast<std::size_t>(k) > n)
        throw std::invalid_argument("kmeans: k out of range [1, n]");
    if (max_iter < 1)
        throw std::invalid_argument("kmeans: max_iter must be >= 1");
    points.ensure_finite("kmeans input");

    // Greedy farthest-point seeding; only the first pick is random.
    std::vector<std::size_t> seeds(k);
    seeds[0] = rng.bounded(n);
    std::vector<double> min_d2(n);
    for (std::size_t i = 0; i < n; ++i)
        min_d2[i] = dist2(points.row(i), points.row(seeds[0]), d);
    for (int j = 1; j < k; ++j) {
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < n; ++i)
            if (min_d2[i] > best) {
                best = min_d2[i];
                arg = i;
            }
        seeds[j] = arg;
        for (std::size_t i = 0; i < n; ++i)
            min_d2[i] = std::min(min_d2[i], dist2(points.row(i), points.row(arg), d));
    }

    Matrix centroids(k, d);
    for (int j = 0; j < k; ++j)
        for (std::size_t t = 0; t < d; ++t)
            centroids(j, t) = points(seeds[j], t);

    KMeansResult res;
    res.labels.assign(n, -1);
    std::vector<int> counts(k, 0);

    auto assign_pass = [&]() {
        bool changed = false;
        double wcss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            int arg = 0;
            double best = dist2(points.row(i), centroids.row(0), d);
            for (int j = 1; j < k; ++j) {
                const double dd = dist2(points.row(i), centroids.row(j), d);
                if (dd < best) {  // ties keep the lowest cluster index
                    best = dd;
                    arg = j;
                }
            }
            if (res.labels[i] != arg) {
                res.labels[i] = arg;
                changed = true;
            }
            wcss += best;
        }
        res.objective_history.push_back(wcss);
        return changed;
    };

    auto update_pass = [&]() {
        bool repaired = false;
        for (int j = 0; j < k; ++j) {
            counts[j] = 0;
            for (std::size_t t = 0; t < d; ++t)
                centroids(j, t) = 0.0;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const int j = res.labels[i];
            ++counts[j];
            for (std::size_t t = 0; t < d; ++t)
                centroids(j, t) += points(i, t);
        }
        for (int j = 0; j < k; ++j)
            if (counts[j] > 0)
                for (std::size_t t = 0; t < d; ++t)
                    centroids(j, t) /= counts[j];
        // Empty-cluster repair: reseed at the point farthest from its own
        // centroid, excluding sole members of their cluster.
        for (int j = 0; j < k; ++j) {
            if (counts[j] > 0)
                continue;
            std::size_t arg = n;
            double best = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const int ci = res.labels[i];
                if (counts[ci] <= 1)
                    continue;
                const double dd = dist2(points.row(i), centroids.row(ci), d);
                if (dd > best) {
                    best = dd;
                    arg = i;
                }
            }
            if (arg == n)
                continue;
            --counts[res.labels[arg]];
            res.labels[arg] = j;
            counts[j] = 1;
            for (std::size_t t = 0; t < d; ++t)
                centroids(j, t) = points(arg, t);
            repaired = true;
        }
        if (repaired) {
            // Donor centroids moved; recompute all means from labels.
            Matrix fresh(k, d);
            std::vector<int> cnt(k, 0);
            for (std::size_t i = 0; i < n; ++i) {
                const int j = res.labels[i];
                ++cnt[j];
                for (std::size_t t = 0; t < d; ++t)
                    fresh(j, t) += points(i, t);
            }
            for (int j = 0; j < k; ++j)
                if (cnt[j] > 0)
                    for (std::size_t t = 0; t < d; ++t)
                        fresh(j, t) /= cnt[j];
            centroids = fresh;
            counts = cnt;
        }
        return repaired;
    };

    assign_pass();
    for (int iter = 0; iter < max_iter; ++iter) {
        res.iterations = iter + 1;
        const bool repaired = update_pass();
        const bool changed = assign_pass();
        if (!changed && !repaired)
            break;
    }
    res.centroids = centroids;
    res.centroids.ensure_finite("kmeans centroids");
    return res;
}

SymmetricEigen symmetric_eigen(Matrix a) {
    const std::size_t n = a.rows();
    if (n == 0 || a.cols() != n)
        throw std::invalid_argument("symmetric_eigen: matrix must be square and non-empty");
    a.ensure_finite("symmetric_eigen input");

    std::vector<double> d(n, 0.0), e(n, 0.0);

    // Householder reduction to tridiagonal form, accumulating the
    // transformation in place (tred2).
    for (std::size_t i = n - 1; i >= 1; --i) {
        const std::size_t l = i - 1;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (std::size_t kk = 0; kk <= l; ++kk)
                scale += std::abs(a(i, kk));
            if (scale == 0.0) {
                e[i] = a(i, l);
            } else {
                for (std::size_t kk = 0; kk <= l; ++kk) {
                    a(i, kk) /= scale;
                    h += a(i, kk) * a(i, kk);
                }
                double f = a(i, l);
                double g = (f >= 0.0 ? -std::sqrt(h) : std::sqrt(h));
                e[i] = scale * g;
                h -= f * g;
                a(i, l) = f - g;
                f = 0.0;
                for (std::size_t j = 0; j <= l; ++j) {
                    a(j, i) = a(i, j) / h;
                    g = 0.0;
                    for (std::size_t kk = 0; kk <= j; ++kk)
                        g += a(j, kk) * a(i, kk);
                    for (std::size_t kk = j + 1; kk <= l; ++kk)
                        g += a(kk, j) * a(i, kk);
                    e[j] = g / h;
                    f += e[j] * a(i, j);
                }
                const double hh = f / (h + h);
                for (std::size_t j = 0; j <= l; ++j) {
                    f = a(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (std::size_t kk = 0; kk <= j; ++kk)
                        a(j, kk) -= f * e[kk] + g * a(i, kk);
                }
            }
        } else {
            e[i] = a(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i] != 0.0) {
            for (std::size_t j = 0; j < i; ++j) {
                double g = 0.0;
                for (std::size_t kk = 0; kk < i; ++kk)
                    g += a(i, kk) * a(kk, j);
                for (std::size_t kk = 0; kk < i; ++kk)
                    a(kk, j) -= g * a(kk, i);
            }
        }
        d[i] = a(i, i);
        a(i, i) = 1.0;
        for (std::size_t j = 0; j < i; ++j) {
            a(j, i) = 0.0;
            a(i, j) = 0.0;
        }
    }

    // Implicit-shift QL on the tridiagonal, rotating the accumulated
    // transform into eigenvectors (tql2).
    for (std::size_t i = 1; i < n; ++i)
        e[i - 1] = e[i];
    e[n - 1] = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t mm;
        do {
            for (mm = l; mm + 1 < n; ++mm) {
                const double dd = std::abs(d[mm]) + std::abs(d[mm + 1]);
                if (std::abs(e[mm]) <= std::numeric_limits<double>::epsilon() * dd)
                    break;
            }
            if (mm != l) {
                if (iter++ == 64)
                    throw std::runtime_error("symmetric_eigen: QL iteration failed to converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double rr = std::hypot(g, 1.0);
                g = d[mm] - d[l] + e[l] / (g + std::copysign(rr, g));
                double s = 1.0, cc = 1.0, pp = 0.0;
                bool underflow = false;
                for (std::size_t i = mm; i-- > l;) {
                    double f = s * e[i];
                    const double bb = cc * e[i];
                    rr = std::hypot(f, g);
                    e[i + 1] = rr;
                    if (rr == 0.0) {
                        d[i + 1] -= pp;
                        e[mm] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / rr;
                    cc = g / rr;
                    g = d[i + 1] - pp;
                    rr = (d[i] - g) * s + 2.0 * cc * bb;
                    pp = s * rr;
                    d[i + 1] = g + pp;
                    g = cc * rr - bb;
                    for (std::size_t kk = 0; kk < n; ++kk) {
                        f = a(kk, i + 1);
                        a(kk, i + 1) = s * a(kk, i) + cc * f;
                        a(kk, i) = cc * a(kk, i) - s * f;
                    }
                }
                if (underflow)
                    continue;
                d[l] -= pp;
                e[l] = g;
                e[mm] = 0.0;
            }
        } while (mm != l);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });
    SymmetricEigen out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = d[order[j]];
        for (std::size_t i = 0; i < n; ++i)
            out.vectors(i, j) = a(i, order[j]);
    }
    out.vectors.ensure_finite("symmetric_eigen vectors");
    return out;
}

bool cholesky_solve(Matrix gram, Matrix& rhs) {
    const std::size_t n = gram.rows();
    if (gram.cols() != n || rhs.rows() != n)
        throw std::invalid_argument("cholesky_solve: shape mismatch");
    double scale = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        scale = std::max(scale, std::abs(gram(j, j)));
    // Lower-triangular factorization in place. Pivots are checked against
    // the matrix scale so numerically singular systems are rejected rather
    // than factored through rounding noise.
    for (std::size_t j = 0; j < n; ++j) {
        double diag = gram(j, j);
        for (std::size_t kk = 0; kk < j; ++kk)
            diag -= gram(j, kk) * gram(j, kk);
        if (!(diag > 1e-12 * scale))
            return false;
        const double ljj = std::sqrt(diag);
        gram(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = gram(i, j);
            for (std::size_t kk = 0; kk < j; ++kk)
                v -= gram(i, kk) * gram(j, kk);
            gram(i, j) = v / ljj;
        }
    }
    // Forward then backward substitution per right-hand-side column.
    for (std::size_t col = 0; col < rhs.cols(); ++col) {
        for (std::size_t i = 0; i < n; ++i) {
            double v = rhs(i, col);
            for (std::size_t kk = 0; kk < i; ++kk)
                v -= gram(i, kk) * rhs(kk, col);
            rhs(i, col) = v / gram(i, i);
        }
        for (std::size_t i = n; i-- > 0;) {
            double v = rhs(i, col);
            for (std::size_t kk = i + 1; kk < n; ++kk)
                v -= gram(kk, i) * rhs(kk, col);
            rhs(i, col) = v / gram(i, i);
        }
    }
    return true;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("adjusted_rand_index: label vectors differ in length");
    const std::size_t n = a.size();
    if (n < 2)
        return 1.0;
    const int ka = *std::max_element(a.begin(), a.end()) + 1;
    const int kb = *std::max_element(b.begin(), b.end()) + 1;
    std::vector<long long> table(static_cast<std::size_t>(ka) * kb, 0);
    std::vector<long long> ra(ka, 0), rb(kb, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] < 0 || b[i] < 0)
            throw std::invalid_argument("adjusted_rand_index: negative label");
        ++table[static_cast<std::size_t>(a[i]) * kb + b[i]];
        ++ra[a[i]];
        ++rb[b[i]];
    }
    auto choose2 = [](long long v) { return 0.5 * static_cast<double>(v) * (v - 1); };
    double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (long long v : table)
        sum_ij += choose2(v);
    for (long long v : ra)
        sum_a += choose2(v);
    for (long long v : rb)
        sum_b += choose2(v);
    const double total = choose2(static_cast<long long>(n));
    const double expected = sum_a * sum_b / total;
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected)
        return 1.0;  // both partitions trivial
    return (sum_ij - expected) / (max_index - expected);
}

}  // namespace qclab::num
