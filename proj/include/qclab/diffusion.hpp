#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qclab/matrix.hpp"
#include "qclab/quantizer.hpp"
#include "qclab/rng.hpp"
#include "qclab/sample.hpp"
#include "qclab/warnings.hpp"

namespace qclab::diff {

enum class SamplerKind { ddpm, ddim };

// Noise schedule over math indices t = 0..T with alpha_bar[0] = 1 exactly.
// The reverse loop maps x_t -> x_{t-1} for t = T..1; the step LABEL seen by
// the model, the cache and per-step tables is s = t-1, running T-1..0.
struct DiffusionSchedule {
    int T = 0;
    std::vector<double> beta;       // size T+1, beta[0] unused (= 0)
    std::vector<double> alpha_bar;  // size T+1, strictly decreasing, alpha_bar[0] = 1
    SamplerKind sampler = SamplerKind::ddpm;

    static DiffusionSchedule linear(int T, SamplerKind sampler = SamplerKind::ddpm,
                                    double beta_start = 1e-4, double beta_end = 2e-2);
    void validate() const;
};

struct MixtureComponent {
    double weight = 1.0;
    std::vector<double> mean;
    double var = 1.0;  // isotropic
};

// Gaussian-mixture data distribution whose diffused posterior is closed
// form; stands in for the image data distribution.
struct MixtureModel {
    int dim = 0;
    std::vector<MixtureComponent> components;

    // 8 components in d = 16 with means on a scaled sign-pattern hypercube
    // of varying balance, variance 0.05, equal weights.
    static MixtureModel hypercube_default(int dim = 16, int n_components = 8,
                                          double scale = 0.8, double var = 0.05);
    void validate() const;
    std::vector<double> draw(RngState& rng) const;
};

struct TrajectoryPoint {
    int t = 0;                    // math index, T..0
    std::vector<double> x;
    std::vector<double> eps_hat;  // model output at x_t; zeros at t = 0
};

struct Trajectory {
    int id = 0;
    std::vector<TrajectoryPoint> points;  // t strictly decreasing
};

// x_t = sqrt(abar_t) x0 + sqrt(1 - abar_t) eps; t = 0 returns x0 exactly.
std::vector<double> forward_noise(const std::vector<double>& x0, int t,
                                  const DiffusionSchedule& sched, RngState& rng);

// Bayes-optimal epsilon prediction for the mixture: responsibilities via
// log-sum-exp over components, then the posterior-weighted linear pull
// toward each scaled component mean. This is the full-precision model.
std::vector<double> analytic_denoiser(const std::vector<double>& x_t, int t,
                                      const MixtureModel& mix, const DiffusionSchedule& sched);

// One reverse step x_t -> x_{t-1}. DDIM (eta = 0) is deterministic; DDPM
// adds posterior-scaled noise except at t = 1.
std::vector<double> reverse_step(const std::vector<double>& x_t,
                                 const std::vector<double>& eps_hat, int t,
                                 const DiffusionSchedule& sched, RngState& rng);

// Per-step linear stand-in for the denoiser, fitted by least squares to the
// analytic denoiser on calibration samples. Keyed by step label s.
struct LinearSurrogate {
    int dim = 0;
    int T = 0;
    std::vector<Matrix> weight;             // per label, d x d
    std::vector<std::vector<double>> bias;  // per label, d
    std::vector<std::uint8_t> borrowed;     // label pooled neighbor samples

    std::vector<double> eval(const std::vector<double>& x, int label) const;
};

// Labels with fewer than dim+1 samples widen to the nearest labels; a
// rank-deficient system falls back to a ridge term of 1e-6 with a warning.
LinearSurrogate fit_surrogate(const std::vector<Sample>& calibration, const MixtureModel& mix,
                              const DiffusionSchedule& sched, WarningLog* warnings = nullptr);

// Surrogate with fake-quantized weights (per-channel over output rows) and
// per-tensor activation quantizers on the input and the output.
struct QuantizedSurrogate {
    LinearSurrogate base;  // weights already passed through fake-quant
    quant::QuantizerParams act_in;
    quant::QuantizerParams act_out;
    bool per_step_acts = false;
    std::vector<quant::QuantizerParams> act_in_steps;   // per label when per_step_acts
    std::vector<quant::QuantizerParams> act_out_steps;
    std::vector<quant::QuantizerParams> weight_params;  // per label, per-channel

    std::vector<double> eval(const std::vector<double>& x, int label) const;
    const quant::QuantizerParams& in_params(int label) const;
    const quant::QuantizerParams& out_params(int label) const;
};

QuantizedSurrogate quantize_surrogate(const LinearSurrogate& surrogate,
                                      const std::vector<Sample>& calibration, int bits_weights,
                                      int bits_activations, bool per_step_acts = false,
                                      WarningLog* warnings = nullptr);

}  // namespace qclab::diff
