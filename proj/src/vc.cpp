#include "qclab/vc.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace qclab::vc {

std::vector<double> CorrectionFactors::apply_row(const std::vector<double>& x, int row) const {
    if (row < 0 || row >= St)
        throw std::invalid_argument("CorrectionFactors: row out of range");
    if (x.size() != static_cast<std::size_t>(C))
        throw std::invalid_argument("CorrectionFactors: channel count mismatch");
    std::vector<double> out(x.size());
    const double* k = K.row(row);
    const double* m = mu.row(row);
    for (int c = 0; c < C; ++c)
        out[c] = m[c] + k[c] * (x[c] - m[c]);
    return out;
}

void CorrectionFactors::validate() const {
    if (St < 1 || C < 1)
        throw std::invalid_argument("CorrectionFactors: St and C must be >= 1");
    if (K.rows() != static_cast<std::size_t>(St) || K.cols() != static_cast<std::size_t>(C) ||
        mu.rows() != K.rows() || mu.cols() != K.cols())
        throw std::invalid_argument("CorrectionFactors: shape mismatch");
    K.ensure_finite("CorrectionFactors K");
    mu.ensure_finite("CorrectionFactors mu");
}

void to_json(nlohmann::json& j, const CorrectionFactors& f) {
    nlohmann::json kj = nlohmann::json::array(), mj = nlohmann::json::array();
    for (int s = 0; s < f.St; ++s) {
        nlohmann::json kr = nlohmann::json::array(), mr = nlohmann::json::array();
        for (int c = 0; c < f.C; ++c) {
            kr.push_back(f.K(s, c));
            mr.push_back(f.mu(s, c));
        }
        kj.push_back(kr);
        mj.push_back(mr);
    }
    j = nlohmann::json{{"St", f.St},
                       {"C", f.C},
                       {"mu", mj},
                       {"K", kj},
                       {"guard_eps", f.guard_eps},
                       {"batch_size", f.batch_size},
                       {"seeds", f.seeds},
                       {"max_solver_gap", f.max_solver_gap}};
}

void from_json(const nlohmann::json& j, CorrectionFactors& f) {
    f.St = j.at("St").get<int>();
    f.C = j.at("C").get<int>();
    f.K = Matrix(f.St, f.C);
    f.mu = Matrix(f.St, f.C);
    for (int s = 0; s < f.St; ++s)
        for (int c = 0; c < f.C; ++c) {
            f.K(s, c) = j.at("K")[s][c].get<double>();
            f.mu(s, c) = j.at("mu")[s][c].get<double>();
        }
    f.guard_eps = j.value("guard_eps", 1e-3);
    f.batch_size = j.value("batch_size", 0);
    f.seeds = j.value("seeds", std::vector<std::uint64_t>{});
    f.max_solver_gap = j.value("max_solver_gap", 0.0);
    f.validate();
}

void PairedBatch::validate() const {
    if (corrupted.rows() < 1 || corrupted.cols() < 1)
        throw std::invalid_argument("PairedBatch: empty batch");
    if (corrupted.rows() != reference.rows() || corrupted.cols() != reference.cols())
        throw std::invalid_argument("PairedBatch: corrupted/reference shape mismatch");
    corrupted.ensure_finite("PairedBatch corrupted");
    reference.ensure_finite("PairedBatch reference");
}

namespace {

// Objective restricted to one channel.
double channel_objective(double k, const PairedBatch& batch, double mu, std::size_t c,
                         double guard_eps) {
    double total = 0.0;
    for (std::size_t n = 0; n < batch.corrupted.rows(); ++n) {
        const double xc = batch.corrupted(n, c);
        const double xr = batch.reference(n, c);
        const double err = mu + k * (xc - mu) - xr;
        total += err * err;
        if (std::abs(xr) >= guard_eps)
            total += (err / xr) * (err / xr);
    }
    return total;
}

double golden_section(double lo, double hi, double tol,
                      const std::function<double(double)>& f) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

double objective(const std::vector<double>& k_t, const PairedBatch& batch,
                 const std::vector<double>& mu_t, double guard_eps) {
    batch.validate();
    const std::size_t c_count = batch.corrupted.cols();
    if (k_t.size() != c_count || mu_t.size() != c_count)
        throw std::invalid_argument("objective: channel count mismatch");
    double total = 0.0;
    for (std::size_t c = 0; c < c_count; ++c)
        total += channel_objective(k_t[c], batch, mu_t[c], c, guard_eps);
    return total;
}

std::vector<double> solve_analytic(const PairedBatch& batch, const std::vector<double>& mu_t,
                                   double guard_eps, WarningLog* warnings) {
    batch.validate();
    const std::size_t c_count = batch.corrupted.cols();
    if (mu_t.size() != c_count)
        throw std::invalid_argument("solve_analytic: channel count mismatch");
    std::vector<double> k(c_count, 1.0);
    for (std::size_t c = 0; c < c_count; ++c) {
        double num = 0.0, den = 0.0;
        for (std::size_t n = 0; n < batch.corrupted.rows(); ++n) {
            const double a = batch.corrupted(n, c) - mu_t[c];
            const double b = batch.reference(n, c) - mu_t[c];
            num += b * a;
            den += a * a;
            const double xr = batch.reference(n, c);
            if (std::abs(xr) >= guard_eps) {
                num += a / xr;
                den += (a * a) / (xr * xr);
            }
        }
        if (den == 0.0 || !std::isfinite(num / den)) {
            warn(warnings, "solve_analytic: zero denominator at channel " + std::to_string(c) +
                               "; K = 1 fallback");
            k[c] = 1.0;
        } else {
            k[c] = num / den;
        }
    }
    return k;
}

std::vector<double> solve_bruteforce(const PairedBatch& batch, const std::vector<double>& mu_t,
                                     const BruteForceGrid& grid, double guard_eps) {
    batch.validate();
    const std::size_t c_count = batch.corrupted.cols();
    if (mu_t.size() != c_count)
        throw std::invalid_argument("solve_bruteforce: channel count mismatch");
    if (!(grid.lo < grid.hi) || !(grid.coarse_step > 0.0))
        throw std::invalid_argument("solve_bruteforce: bad grid");

    std::vector<double> k(c_count, 1.0);
    for (std::size_t c = 0; c < c_count; ++c) {
        // The objective is flat in K when every corrupted value equals mu;
        // keep the identity fallback there to match the closed form.
        double curvature = 0.0;
        for (std::size_t n = 0; n < batch.corrupted.rows(); ++n) {
            const double a = batch.corrupted(n, c) - mu_t[c];
            curvature += a * a;
        }
        if (curvature == 0.0)
            continue;

        auto f = [&](double v) { return channel_objective(v, batch, mu_t[c], c, guard_eps); };
        double best_v = grid.lo, best_f = f(grid.lo);
        for (double v = grid.lo + grid.coarse_step; v <= grid.hi + 1e-12;
             v += grid.coarse_step) {
            const double fv = f(v);
            if (fv < best_f) {
                best_f = fv;
                best_v = v;
            }
        }
        const double lo = std::max(grid.lo, best_v - grid.coarse_step);
        const double hi = std::min(grid.hi, best_v + grid.coarse_step);
        k[c] = golden_section(lo, hi, grid.refine_tol, f);
        if (f(k[c]) > best_f)
            k[c] = best_v;
    }
    return k;
}

CorrectionFactors estimate_factors(const EstimationConfig& cfg, WarningLog* warnings) {
    if (cfg.batch_size < 1)
        throw std::invalid_argument("estimate_factors: batch_size must be >= 1");
    cfg.corrupted.validate();
    cfg.reference.validate();
    if (cfg.corrupted.correction || cfg.reference.correction)
        throw std::invalid_argument("estimate_factors: estimation pipelines must run uncorrected");

    const int T = cfg.corrupted.sched.T;
    const int d = cfg.corrupted.mix.dim;

    std::vector<diff::Trajectory> corrupted, reference;
    corrupted.reserve(cfg.batch_size);
    reference.reserve(cfg.batch_size);
    CorrectionFactors out;
    out.batch_size = cfg.batch_size;
    out.guard_eps = cfg.guard_eps;
    for (int i = 0; i < cfg.batch_size; ++i) {
        const std::uint64_t seed = cfg.seed_base + cfg.stream_offset + i;
        out.seeds.push_back(seed);
        corrupted.push_back(diff::sample_trajectory(cfg.corrupted, seed, i));
        reference.push_back(diff::sample_trajectory(cfg.reference, seed, i));
    }

    out.St = T;
    out.C = d;
    out.K = Matrix(T, d, 1.0);
    out.mu = Matrix(T, d, 0.0);

    for (int label = 0; label < T; ++label) {
        // The state produced at step label s is x_s (math index == label).
        PairedBatch batch;
        batch.corrupted = Matrix(cfg.batch_size, d);
        batch.reference = Matrix(cfg.batch_size, d);
        for (int i = 0; i < cfg.batch_size; ++i) {
            const auto& cp = corrupted[i].points;
            const auto& rp = reference[i].points;
            const std::size_t idx = cp.size() - 1 - label;  // points run t = T..0
            for (int c = 0; c < d; ++c) {
                batch.corrupted(i, c) = cp[idx].x[c];
                batch.reference(i, c) = rp[idx].x[c];
            }
        }
        std::vector<double> mu_t(d, 0.0);
        for (int c = 0; c < d; ++c) {
            double s = 0.0;
            for (int i = 0; i < cfg.batch_size; ++i)
                s += batch.reference(i, c);
            mu_t[c] = s / cfg.batch_size;
        }

        const std::vector<double> oracle =
            solve_bruteforce(batch, mu_t, cfg.grid, cfg.guard_eps);
        const std::vector<double> closed = solve_analytic(batch, mu_t, cfg.guard_eps, warnings);
        for (int c = 0; c < d; ++c)
            out.max_solver_gap =
                std::max(out.max_solver_gap, std::abs(oracle[c] - closed[c]));

        const std::vector<double>& chosen = (cfg.solver == Solver::bruteforce) ? oracle : closed;
        for (int c = 0; c < d; ++c) {
            out.K(label, c) = chosen[c];
            out.mu(label, c) = mu_t[c];
        }
    }
    out.validate();
    return out;
}

}  // namespace qclab::vc
