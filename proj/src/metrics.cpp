#include "qclab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qclab/numerics.hpp"
#include "qclab/vc.hpp"

namespace qclab::metrics {

void StepSeries::validate() const {
    if (timesteps.size() != values.size())
        throw std::invalid_argument("StepSeries: length mismatch");
    for (std::size_t i = 1; i < timesteps.size(); ++i)
        if (timesteps[i] >= timesteps[i - 1])
            throw std::invalid_argument("StepSeries: timesteps must descend");
    for (double v : values)
        if (!std::isfinite(v))
            throw std::invalid_argument("StepSeries: non-finite value");
}

Matrix similarity_heatmap(const std::vector<Sample>& samples, WarningLog* warnings) {
    if (samples.size() < 2)
        throw std::invalid_argument("similarity_heatmap: need at least 2 samples");
    // Later generation steps (smaller labels) go to the right.
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return samples[a].timestep > samples[b].timestep;
    });
    const std::size_t d = samples[0].features.size();
    Matrix feats(samples.size(), d);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Sample& s = samples[order[i]];
        if (s.features.size() != d)
            throw std::invalid_argument("similarity_heatmap: inconsistent dimensions");
        for (std::size_t j = 0; j < d; ++j)
            feats(i, j) = s.features[j];
    }
    return num::pairwise_cosine(feats, warnings);
}

double mean_offdiagonal(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() < 2)
        throw std::invalid_argument("mean_offdiagonal: need a square matrix of order >= 2");
    double sum = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (i != j)
                sum += m(i, j);
    return sum / (static_cast<double>(m.rows()) * (m.rows() - 1));
}

StepSeries exposure_bias_curve(const std::vector<diff::Trajectory>& pred,
                               const std::vector<diff::Trajectory>& truth,
                               const std::string& label) {
    if (pred.empty() || pred.size() != truth.size())
        throw std::invalid_argument("exposure_bias_curve: unpaired trajectory sets");
    const std::size_t steps = pred[0].points.size();
    for (std::size_t i = 0; i < pred.size(); ++i)
        if (pred[i].points.size() != steps || truth[i].points.size() != steps)
            throw std::invalid_argument("exposure_bias_curve: trajectory lengths differ");

    StepSeries series;
    series.label = label;
    for (std::size_t p = 0; p < steps; ++p) {
        const int t = pred[0].points[p].t;
        double sum = 0.0;
        long count = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            const auto& a = pred[i].points[p];
            const auto& b = truth[i].points[p];
            if (a.t != t || b.t != t)
                throw std::invalid_argument("exposure_bias_curve: timestep misalignment");
            for (std::size_t c = 0; c < a.x.size(); ++c) {
                const double dd = a.x[c] - b.x[c];
                sum += dd * dd;
                ++count;
            }
        }
        series.timesteps.push_back(t);
        series.values.push_back(sum / count);
    }
    series.validate();
    return series;
}

std::vector<std::vector<double>> variance_density(const std::vector<diff::Trajectory>& trajs,
                                                  const std::vector<int>& t_list) {
    if (trajs.empty())
        throw std::invalid_argument("variance_density: no trajectories");
    std::vector<std::vector<double>> out;
    for (const int t : t_list) {
        std::vector<double> vars;
        vars.reserve(trajs.size());
        for (const auto& traj : trajs) {
            const diff::TrajectoryPoint* point = nullptr;
            for (const auto& p : traj.points)
                if (p.t == t) {
                    point = &p;
                    break;
                }
            if (!point)
                throw std::invalid_argument("variance_density: timestep " + std::to_string(t) +
                                            " not present");
            const std::size_t d = point->x.size();
            if (d < 2)
                throw std::invalid_argument("variance_density: need >= 2 coordinates");
            double mean = 0.0;
            for (double v : point->x)
                mean += v;
            mean /= d;
            double s = 0.0;
            for (double v : point->x)
                s += (v - mean) * (v - mean);
            vars.push_back(s / (d - 1));
        }
        out.push_back(std::move(vars));
    }
    return out;
}

double mann_whitney_greater(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.empty() || y.empty())
        throw std::invalid_argument("mann_whitney_greater: empty sample");
    struct Tagged {
        double v;
        int group;
    };
    std::vector<Tagged> all;
    all.reserve(x.size() + y.size());
    for (double v : x)
        all.push_back({v, 0});
    for (double v : y)
        all.push_back({v, 1});
    std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) { return a.v < b.v; });

    const double n1 = static_cast<double>(x.size());
    const double n2 = static_cast<double>(y.size());
    const double n = n1 + n2;
    double rank_sum_x = 0.0;
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < all.size()) {
        std::size_t j = i;
        while (j + 1 < all.size() && all[j + 1].v == all[i].v)
            ++j;
        const double rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        const double ties = static_cast<double>(j - i + 1);
        if (ties > 1)
            tie_term += ties * (ties * ties - 1.0);
        for (std::size_t kk = i; kk <= j; ++kk)
            if (all[kk].group == 0)
                rank_sum_x += rank;
        i = j + 1;
    }
    const double u = rank_sum_x - n1 * (n1 + 1.0) / 2.0;
    const double mean_u = n1 * n2 / 2.0;
    const double var_u = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (var_u <= 0.0)
        return 1.0;  // all values tie: no evidence either way
    const double z = (u - mean_u - 0.5) / std::sqrt(var_u);  // continuity corrected
    return 0.5 * std::erfc(z / std::sqrt(2.0));              // P(U >= u)
}

nlohmann::json QualityReport::to_json() const {
    return nlohmann::json{{"clip_rate_in", clip_rate_in},
                          {"clip_rate_out", clip_rate_out},
                          {"clip_rate", clip_rate},
                          {"rms_vs_analytic", rms_vs_analytic},
                          {"surrogate_rms", surrogate_rms},
                          {"final_mse", final_mse},
                          {"clipped_values", clipped_values},
                          {"total_values", total_values}};
}

QualityReport quantization_quality(const std::vector<Sample>& calibration,
                                   const std::vector<Sample>& eval_samples,
                                   const QualityConfig& cfg, WarningLog* warnings) {
    if (calibration.empty())
        throw std::invalid_argument("quantization_quality: empty calibration set");
    if (eval_samples.empty())
        throw std::invalid_argument("quantization_quality: empty eval set");

    const auto surrogate = diff::fit_surrogate(calibration, cfg.mix, cfg.sched, warnings);
    const auto quantized = diff::quantize_surrogate(surrogate, calibration, cfg.bits_weights,
                                                    cfg.bits_activations, cfg.per_step_acts,
                                                    warnings);

    QualityReport report;
    long clip_in = 0, clip_out = 0, count_in = 0, count_out = 0;
    double se_q = 0.0, se_fp = 0.0;
    long n_vals = 0;
    for (const Sample& s : eval_samples) {
        const auto& pin = quantized.in_params(s.timestep);
        for (double v : s.features) {
            ++count_in;
            if (v < pin.channels[0].l || v > pin.channels[0].u)
                ++clip_in;
        }
        // Raw output of the quantized-weight surrogate is what the output
        // quantizer sees.
        const auto xq = quant::fake_quant(s.features, pin);
        const auto raw = quantized.base.eval(xq, s.timestep);
        const auto& pout = quantized.out_params(s.timestep);
        for (double v : raw) {
            ++count_out;
            if (v < pout.channels[0].l || v > pout.channels[0].u)
                ++clip_out;
        }
        const auto q_out = quantized.eval(s.features, s.timestep);
        const auto fp_out = surrogate.eval(s.features, s.timestep);
        const auto target = diff::analytic_denoiser(s.features, s.timestep + 1, cfg.mix,
                                                    cfg.sched);
        for (std::size_t c = 0; c < target.size(); ++c) {
            const double dq = q_out[c] - target[c];
            const double df = fp_out[c] - target[c];
            se_q += dq * dq;
            se_fp += df * df;
            ++n_vals;
        }
    }
    report.clip_rate_in = static_cast<double>(clip_in) / count_in;
    report.clip_rate_out = static_cast<double>(clip_out) / count_out;
    report.clipped_values = clip_in + clip_out;
    report.total_values = count_in + count_out;
    report.clip_rate = static_cast<double>(report.clipped_values) / report.total_values;
    report.rms_vs_analytic = std::sqrt(se_q / n_vals);
    report.surrogate_rms = std::sqrt(se_fp / n_vals);

    diff::PipelineConfig corrupted;
    corrupted.sched = cfg.sched;
    corrupted.mix = cfg.mix;
    corrupted.backend = diff::Backend::quantized;
    corrupted.quantized = &quantized;
    corrupted.cache_interval = cfg.cache_interval;
    corrupted.correction = cfg.correction;
    diff::PipelineConfig truth;
    truth.sched = cfg.sched;
    truth.mix = cfg.mix;
    truth.backend = diff::Backend::analytic;
    truth.cache_interval = 1;

    double mse = 0.0;
    long n_final = 0;
    for (int i = 0; i < cfg.final_eval_trajectories; ++i) {
        const std::uint64_t seed = cfg.eval_seed_base + i;
        const auto a = diff::sample_trajectory(corrupted, seed, i);
        const auto b = diff::sample_trajectory(truth, seed, i);
        const auto& xa = a.points.back().x;
        const auto& xb = b.points.back().x;
        for (std::size_t c = 0; c < xa.size(); ++c) {
            const double d = xa[c] - xb[c];
            mse += d * d;
            ++n_final;
        }
    }
    report.final_mse = mse / n_final;
    return report;
}

}  // namespace qclab::metrics
