#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "qclab/matrix.hpp"
#include "qclab/pipeline.hpp"
#include "qclab/warnings.hpp"

namespace qclab::vc {

// Per-timestep, per-channel correction x~ = mu + K (x^ - mu). Row s of K
// and mu corrects the state produced at step label s. K is 1 wherever the
// estimation batch was empty.
struct CorrectionFactors {
    int St = 0;
    int C = 0;
    Matrix K;   // St x C
    Matrix mu;  // St x C
    double guard_eps = 1e-3;
    int batch_size = 0;
    std::vector<std::uint64_t> seeds;
    double max_solver_gap = 0.0;  // reported |analytic - bruteforce| across all solves

    std::vector<double> apply_row(const std::vector<double>& x, int row) const;
    void validate() const;
};

void to_json(nlohmann::json& j, const CorrectionFactors& f);
void from_json(const nlohmann::json& j, CorrectionFactors& f);

// Corrupted estimates and references for one timestep; row n holds the
// n-th paired draw, columns are channels.
struct PairedBatch {
    Matrix corrupted;  // N x C
    Matrix reference;  // N x C

    void validate() const;
};

// Relative-error + MSE reconstruction objective: sum over the batch and
// channels of ((x~ - x') / x'_g)^2 + (x~ - x')^2 with x~ = mu + K(x^ - mu).
// Elements with |x'| < guard_eps drop their relative-error term only.
double objective(const std::vector<double>& k_t, const PairedBatch& batch,
                 const std::vector<double>& mu_t, double guard_eps = 1e-3);

// Closed form as printed: numerator sum (x'-mu)(x^-mu) + sum (x^-mu)/x',
// denominator sum (x^-mu)^2 + sum (x^-mu)^2/x'^2, per channel. A zero
// denominator falls back to K = 1 with a warning.
std::vector<double> solve_analytic(const PairedBatch& batch, const std::vector<double>& mu_t,
                                   double guard_eps = 1e-3, WarningLog* warnings = nullptr);

struct BruteForceGrid {
    double lo = -4.0;
    double hi = 4.0;
    double coarse_step = 0.01;
    double refine_tol = 1e-9;
};

// Independent oracle: per-channel scalar minimization of the objective by
// coarse grid search plus golden-section refinement. The objective is
// quadratic and convex in each K, so the scalar minimizer is global.
std::vector<double> solve_bruteforce(const PairedBatch& batch, const std::vector<double>& mu_t,
                                     const BruteForceGrid& grid = {}, double guard_eps = 1e-3);

enum class Solver { bruteforce, analytic };

struct EstimationConfig {
    diff::PipelineConfig corrupted;  // run without correction
    diff::PipelineConfig reference;  // ground truth, paired seeds
    int batch_size = 64;
    std::uint64_t seed_base = 0;
    std::uint64_t stream_offset = 0;
    Solver solver = Solver::bruteforce;
    double guard_eps = 1e-3;
    BruteForceGrid grid;
};

// Runs batch_size paired trajectories, builds one PairedBatch per step
// label from the produced states, and solves per (step, channel). mu is the
// per-channel mean of the reference states. Also evaluates the closed form
// against the oracle and records the largest gap.
CorrectionFactors estimate_factors(const EstimationConfig& cfg, WarningLog* warnings = nullptr);

}  // namespace qclab::vc
