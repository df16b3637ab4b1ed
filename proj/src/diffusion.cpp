#include "qclab/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "qclab/numerics.hpp"

namespace qclab::diff {

DiffusionSchedule DiffusionSchedule::linear(int T, SamplerKind sampler, double beta_start,
                                            double beta_end) {
    if (T < 1)
        throw std::invalid_argument("DiffusionSchedule: T must be >= 1");
    DiffusionSchedule s;
    s.T = T;
    s.sampler = sampler;
    s.beta.assign(T + 1, 0.0);
    s.alpha_bar.assign(T + 1, 1.0);
    // Linear betas over 1000 base steps, respaced to T by striding the
    // cumulative products. Reduced-step runs then cover the full noise
    // range (alpha_bar from 1 down to ~4e-5) the way strided samplers do,
    // instead of stopping at alpha_bar ~ 0.6 for T = 50.
    constexpr int kBase = 1000;
    if (T >= kBase) {
        for (int t = 1; t <= T; ++t) {
            const double frac = (T == 1) ? 0.0 : static_cast<double>(t - 1) / (T - 1);
            s.beta[t] = beta_start + (beta_end - beta_start) * frac;
            s.alpha_bar[t] = s.alpha_bar[t - 1] * (1.0 - s.beta[t]);
        }
    } else {
        std::vector<double> abar_base(kBase + 1, 1.0);
        for (int t = 1; t <= kBase; ++t) {
            const double b = beta_start + (beta_end - beta_start) * (t - 1) / (kBase - 1);
            abar_base[t] = abar_base[t - 1] * (1.0 - b);
        }
        for (int t = 1; t <= T; ++t) {
            const int idx = static_cast<int>((static_cast<long long>(t) * kBase) / T);
            s.alpha_bar[t] = abar_base[idx];
            s.beta[t] = 1.0 - s.alpha_bar[t] / s.alpha_bar[t - 1];
        }
    }
    s.validate();
    return s;
}

void DiffusionSchedule::validate() const {
    if (T < 1 || beta.size() != static_cast<std::size_t>(T + 1) ||
        alpha_bar.size() != static_cast<std::size_t>(T + 1))
        throw std::invalid_argument("DiffusionSchedule: inconsistent sizes");
    if (alpha_bar[0] != 1.0)
        throw std::invalid_argument("DiffusionSchedule: alpha_bar[0] must be 1");
    for (int t = 1; t <= T; ++t) {
        if (!(beta[t] > 0.0 && beta[t] < 1.0))
            throw std::invalid_argument("DiffusionSchedule: beta out of (0, 1)");
        if (!(alpha_bar[t] > 0.0 && alpha_bar[t] < alpha_bar[t - 1]))
            throw std::invalid_argument("DiffusionSchedule: alpha_bar must strictly decrease");
    }
}

MixtureModel MixtureModel::hypercube_default(int dim, int n_components, double scale,
                                             double var) {
    MixtureModel m;
    m.dim = dim;
    // Antipodal pairs of Walsh sign patterns (alternating blocks of size
    // 2^p). The mode axes come out mutually orthogonal, so trajectories
    // sweep wide arcs instead of collapsing onto one dominant direction.
    for (int c = 0; c < n_components; ++c) {
        MixtureComponent comp;
        comp.weight = 1.0 / n_components;
        comp.var = var;
        comp.mean.assign(dim, scale);
        const int block = c / 2;  // pattern index of the antipodal pair
        for (int j = 0; j < dim; ++j)
            if ((j >> block) & 1)
                comp.mean[j] = -scale;
        if (c % 2 == 1)
            for (double& v : comp.mean)
                v = -v;
        m.components.push_back(std::move(comp));
    }
    for (std::size_t a = 0; a < m.components.size(); ++a)
        for (std::size_t b = a + 1; b < m.components.size(); ++b)
            if (m.components[a].mean == m.components[b].mean)
                throw std::invalid_argument(
                    "MixtureModel: sign-pattern grid exhausted; reduce components or raise dim");
    m.validate();
    return m;
}

void MixtureModel::validate() const {
    if (dim < 1 || components.empty())
        throw std::invalid_argument("MixtureModel: needs dim >= 1 and components");
    double wsum = 0.0;
    for (const auto& c : components) {
        if (!(c.weight > 0.0))
            throw std::invalid_argument("MixtureModel: weights must be positive");
        if (!(c.var > 0.0))
            throw std::invalid_argument("MixtureModel: variances must be positive");
        if (c.mean.size() != static_cast<std::size_t>(dim))
            throw std::invalid_argument("MixtureModel: mean dimension mismatch");
        wsum += c.weight;
    }
    if (std::abs(wsum - 1.0) > 1e-9)
        throw std::invalid_argument("MixtureModel: weights must sum to 1");
}

std::vector<double> MixtureModel::draw(RngState& rng) const {
    const double u = rng.uniform01();
    double acc = 0.0;
    const MixtureComponent* pick = &components.back();
    for (const auto& c : components) {
        acc += c.weight;
        if (u < acc) {
            pick = &c;
            break;
        }
    }
    std::vector<double> x(dim);
    const double sd = std::sqrt(pick->var);
    for (int j = 0; j < dim; ++j)
        x[j] = pick->mean[j] + sd * rng.normal();
    return x;
}

std::vector<double> forward_noise(const std::vector<double>& x0, int t,
                                  const DiffusionSchedule& sched, RngState& rng) {
    if (t < 0 || t > sched.T)
        throw std::invalid_argument("forward_noise: t out of [0, T]");
    if (t == 0)
        return x0;
    const double ab = sched.alpha_bar[t];
    const double a = std::sqrt(ab), b = std::sqrt(1.0 - ab);
    std::vector<double> x(x0.size());
    for (std::size_t j = 0; j < x0.size(); ++j)
        x[j] = a * x0[j] + b * rng.normal();
    return x;
}

std::vector<double> analytic_denoiser(const std::vector<double>& x_t, int t,
                                      const MixtureModel& mix, const DiffusionSchedule& sched) {
    if (t < 1 || t > sched.T)
        throw std::invalid_argument("analytic_denoiser: t out of [1, T]");
    if (x_t.size() != static_cast<std::size_t>(mix.dim))
        throw std::invalid_argument("analytic_denoiser: dimension mismatch");
    const double ab = sched.alpha_bar[t];
    const double sab = std::sqrt(ab);
    const std::size_t d = x_t.size();
    const std::size_t nc = mix.components.size();

    // log responsibilities of the diffused marginal N(sab*mu_i, v_i I),
    // v_i = ab*sigma_i^2 + 1 - ab.
    std::vector<double> logw(nc), v(nc);
    double max_lw = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nc; ++i) {
        const auto& c = mix.components[i];
        v[i] = ab * c.var + 1.0 - ab;
        double q = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double dx = x_t[j] - sab * c.mean[j];
            q += dx * dx;
        }
        logw[i] = std::log(c.weight) - 0.5 * d * std::log(v[i]) - 0.5 * q / v[i];
        max_lw = std::max(max_lw, logw[i]);
    }
    double z = 0.0;
    for (std::size_t i = 0; i < nc; ++i)
        z += std::exp(logw[i] - max_lw);

    // eps_hat = sqrt(1-ab) * sum_i r_i (x - sab*mu_i) / v_i
    const double s1 = std::sqrt(1.0 - ab);
    std::vector<double> eps(d, 0.0);
    for (std::size_t i = 0; i < nc; ++i) {
        const double r = std::exp(logw[i] - max_lw) / z;
        if (r == 0.0)
            continue;
        const auto& c = mix.components[i];
        const double coef = r / v[i];
        for (std::size_t j = 0; j < d; ++j)
            eps[j] += coef * (x_t[j] - sab * c.mean[j]);
    }
    for (std::size_t j = 0; j < d; ++j) {
        eps[j] *= s1;
        if (!std::isfinite(eps[j]))
            throw std::runtime_error("analytic_denoiser: non-finite output");
    }
    return eps;
}

std::vector<double> reverse_step(const std::vector<double>& x_t,
                                 const std::vector<double>& eps_hat, int t,
                                 const DiffusionSchedule& sched, RngState& rng) {
    if (t < 1 || t > sched.T)
        throw std::invalid_argument("reverse_step: t out of [1, T]");
    if (x_t.size() != eps_hat.size())
        throw std::invalid_argument("reverse_step: shape mismatch");
    const double ab_t = sched.alpha_bar[t];
    const double ab_prev = sched.alpha_bar[t - 1];
    const std::size_t d = x_t.size();
    std::vector<double> out(d);

    if (sched.sampler == SamplerKind::ddim) {
        const double c0 = std::sqrt(ab_prev / ab_t);
        const double c1 = std::sqrt(1.0 - ab_prev) - c0 * std::sqrt(1.0 - ab_t);
        for (std::size_t j = 0; j < d; ++j)
            out[j] = c0 * x_t[j] + c1 * eps_hat[j];
        return out;
    }

    const double beta_t = sched.beta[t];
    const double alpha_t = 1.0 - beta_t;
    const double mean_scale = 1.0 / std::sqrt(alpha_t);
    const double eps_scale = beta_t / std::sqrt(1.0 - ab_t);
    for (std::size_t j = 0; j < d; ++j)
        out[j] = mean_scale * (x_t[j] - eps_scale * eps_hat[j]);
    if (t > 1) {
        const double var = beta_t * (1.0 - ab_prev) / (1.0 - ab_t);
        const double sd = std::sqrt(var);
        for (std::size_t j = 0; j < d; ++j)
            out[j] += sd * rng.normal();
    }
    return out;
}

std::vector<double> LinearSurrogate::eval(const std::vector<double>& x, int label) const {
    if (label < 0 || label >= T)
        throw std::invalid_argument("LinearSurrogate: label out of range");
    const Matrix& w = weight[label];
    const std::vector<double>& b = bias[label];
    std::vector<double> y(dim, 0.0);
    for (int i = 0; i < dim; ++i) {
        const double* wi = w.row(i);
        double s = b[i];
        for (int j = 0; j < dim; ++j)
            s += wi[j] * x[j];
        y[i] = s;
    }
    return y;
}

LinearSurrogate fit_surrogate(const std::vector<Sample>& calibration, const MixtureModel& mix,
                              const DiffusionSchedule& sched, WarningLog* warnings) {
    if (calibration.empty())
        throw std::invalid_argument("fit_surrogate: empty calibration set");
    const int d = mix.dim;
    const int T = sched.T;
    std::map<int, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < calibration.size(); ++i) {
        const Sample& s = calibration[i];
        if (s.timestep < 0 || s.timestep >= T)
            throw std::invalid_argument("fit_surrogate: sample timestep out of [0, T)");
        if (s.features.size() != static_cast<std::size_t>(d))
            throw std::invalid_argument("fit_surrogate: sample dimension mismatch");
        by_label[s.timestep].push_back(i);
    }

    LinearSurrogate out;
    out.dim = d;
    out.T = T;
    out.weight.assign(T, Matrix());
    out.bias.assign(T, {});
    out.borrowed.assign(T, 0);

    for (int label = 0; label < T; ++label) {
        // Pool this label's samples, widening to nearest labels until the
        // system is overdetermined.
        std::vector<std::size_t> pool;
        int radius = 0;
        for (;;) {
            pool.clear();
            for (int l = label - radius; l <= label + radius; ++l) {
                auto it = by_label.find(l);
                if (it != by_label.end())
                    pool.insert(pool.end(), it->second.begin(), it->second.end());
            }
            if (static_cast<int>(pool.size()) >= d + 1 || radius >= T)
                break;
            ++radius;
        }
        if (pool.empty())
            throw std::invalid_argument("fit_surrogate: no usable samples for step " +
                                        std::to_string(label));
        if (radius > 0) {
            out.borrowed[label] = 1;
            const std::size_t own =
                by_label.count(label) ? by_label.at(label).size() : std::size_t{0};
            warn(warnings, "fit_surrogate: step " + std::to_string(label) +
                               " pooled neighbor samples (had " + std::to_string(own) +
                               ", need " + std::to_string(d + 1) + ")");
        }

        // Normal equations over the design [x 1]; targets are the analytic
        // model outputs at this label's math index.
        const int n = static_cast<int>(pool.size());
        Matrix a(n, d + 1);
        Matrix y(n, d);
        for (int r = 0; r < n; ++r) {
            const Sample& s = calibration[pool[r]];
            for (int j = 0; j < d; ++j)
                a(r, j) = s.features[j];
            a(r, d) = 1.0;
            const std::vector<double> target = analytic_denoiser(s.features, label + 1, mix, sched);
            for (int j = 0; j < d; ++j)
                y(r, j) = target[j];
        }
        Matrix gram(d + 1, d + 1);
        for (int i = 0; i <= d; ++i)
            for (int j = i; j <= d; ++j) {
                double s = 0.0;
                for (int r = 0; r < n; ++r)
                    s += a(r, i) * a(r, j);
                gram(i, j) = s;
                gram(j, i) = s;
            }
        Matrix rhs(d + 1, d);
        for (int i = 0; i <= d; ++i)
            for (int j = 0; j < d; ++j) {
                double s = 0.0;
                for (int r = 0; r < n; ++r)
                    s += a(r, i) * y(r, j);
                rhs(i, j) = s;
            }
        Matrix solution = rhs;
        if (!num::cholesky_solve(gram, solution)) {
            warn(warnings, "fit_surrogate: rank-deficient normal equations at step " +
                               std::to_string(label) + "; ridge 1e-06 added");
            Matrix ridged = gram;
            for (int i = 0; i <= d; ++i)
                ridged(i, i) += 1e-6;
            solution = rhs;
            if (!num::cholesky_solve(ridged, solution))
                throw std::runtime_error("fit_surrogate: normal equations unsolvable at step " +
                                         std::to_string(label));
        }
        Matrix w(d, d);
        std::vector<double> b(d);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j)
                w(i, j) = solution(j, i);
            b[i] = solution(d, i);
        }
        w.ensure_finite("fit_surrogate weights");
        out.weight[label] = std::move(w);
        out.bias[label] = std::move(b);
    }
    return out;
}

std::vector<double> QuantizedSurrogate::eval(const std::vector<double>& x, int label) const {
    const std::vector<double> xq = quant::fake_quant(x, in_params(label));
    std::vector<double> y = base.eval(xq, label);
    return quant::fake_quant(y, out_params(label));
}

const quant::QuantizerParams& QuantizedSurrogate::in_params(int label) const {
    return per_step_acts ? act_in_steps.at(label) : act_in;
}

const quant::QuantizerParams& QuantizedSurrogate::out_params(int label) const {
    return per_step_acts ? act_out_steps.at(label) : act_out;
}

QuantizedSurrogate quantize_surrogate(const LinearSurrogate& surrogate,
                                      const std::vector<Sample>& calibration, int bits_weights,
                                      int bits_activations, bool per_step_acts,
                                      WarningLog* warnings) {
    if (calibration.empty())
        throw std::invalid_argument("quantize_surrogate: empty calibration set");
    QuantizedSurrogate q;
    q.base = surrogate;
    q.per_step_acts = per_step_acts;

    for (int label = 0; label < surrogate.T; ++label) {
        const auto wp = quant::calibrate_per_channel(surrogate.weight[label], bits_weights,
                                                     warnings);
        q.base.weight[label] = quant::fake_quant_rows(surrogate.weight[label], wp);
        q.weight_params.push_back(wp);
    }

    quant::CalibrationStats stats;
    for (const Sample& s : calibration) {
        const int bucket = per_step_acts ? s.timestep : 0;
        stats.observe_all("act_in", bucket, s.features);
        stats.observe_all("act_out", bucket, surrogate.eval(s.features, s.timestep));
    }
    if (per_step_acts) {
        for (int label = 0; label < surrogate.T; ++label) {
            // A label never seen in calibration borrows the whole-range stats
            // of the nearest observed label.
            int src = label;
            for (int radius = 0; radius < surrogate.T; ++radius) {
                if (label - radius >= 0 && stats.has("act_in", -1, label - radius)) {
                    src = label - radius;
                    break;
                }
                if (label + radius < surrogate.T && stats.has("act_in", -1, label + radius)) {
                    src = label + radius;
                    break;
                }
            }
            if (src != label)
                warn(warnings, "quantize_surrogate: step " + std::to_string(label) +
                                   " borrowed activation stats from step " + std::to_string(src));
            q.act_in_steps.push_back(stats.tensor_params("act_in", src, bits_activations, warnings));
            q.act_out_steps.push_back(
                stats.tensor_params("act_out", src, bits_activations, warnings));
        }
    } else {
        q.act_in = stats.tensor_params("act_in", 0, bits_activations, warnings);
        q.act_out = stats.tensor_params("act_out", 0, bits_activations, warnings);
    }
    return q;
}

}  // namespace qclab::diff
