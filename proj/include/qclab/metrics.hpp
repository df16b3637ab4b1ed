#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qclab/matrix.hpp"
#include "qclab/pipeline.hpp"
#include "qclab/sample.hpp"
#include "qclab/warnings.hpp"

namespace qclab::metrics {

// One diagnostic measured per timestep for a labeled run.
struct StepSeries {
    std::vector<int> timesteps;  // descending
    std::vector<double> values;
    std::string label;

    void validate() const;
};

// Pairwise cosine similarity of a calibration sequence ordered by
// timestep; samples closer to the final step sit further right.
Matrix similarity_heatmap(const std::vector<Sample>& samples, WarningLog* warnings = nullptr);

double mean_offdiagonal(const Matrix& m);

// Per-step mean squared error between seed-paired trajectory sets.
StepSeries exposure_bias_curve(const std::vector<diff::Trajectory>& pred,
                               const std::vector<diff::Trajectory>& truth,
                               const std::string& label = "");

// For each requested math timestep, the per-trajectory variance across
// coordinates (unbiased).
std::vector<std::vector<double>> variance_density(const std::vector<diff::Trajectory>& trajs,
                                                  const std::vector<int>& t_list);

// One-sided Mann-Whitney p-value for "x stochastically larger than y",
// normal approximation with tie correction.
double mann_whitney_greater(const std::vector<double>& x, const std::vector<double>& y);

struct QualityConfig {
    diff::DiffusionSchedule sched;
    diff::MixtureModel mix;
    int bits_weights = 8;
    int bits_activations = 8;
    int cache_interval = 5;
    bool per_step_acts = false;
    int final_eval_trajectories = 32;
    std::uint64_t eval_seed_base = 900000;
    const vc::CorrectionFactors* correction = nullptr;
};

struct QualityReport {
    double clip_rate_in = 0.0;      // eval inputs outside the input range
    double clip_rate_out = 0.0;     // raw outputs outside the output range
    double clip_rate = 0.0;         // combined
    double rms_vs_analytic = 0.0;   // quantized surrogate vs analytic model
    double surrogate_rms = 0.0;     // unquantized surrogate vs analytic model
    double final_mse = 0.0;         // corrupted pipeline vs ground truth at t = 0
    long clipped_values = 0;
    long total_values = 0;

    nlohmann::json to_json() const;
};

// Fits and quantizes the surrogate from the calibration set, then scores
// range coverage and output fidelity on the (disjoint) eval samples plus
// end-to-end final-sample error against the ground-truth pipeline.
QualityReport quantization_quality(const std::vector<Sample>& calibration,
                                   const std::vector<Sample>& eval_samples,
                                   const QualityConfig& cfg, WarningLog* warnings = nullptr);

}  // namespace qclab::metrics
