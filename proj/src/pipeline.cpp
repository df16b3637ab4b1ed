#include "qclab/pipeline.hpp"

#include <stdexcept>

#include "qclab/vc.hpp"

namespace qclab::diff {

void PipelineConfig::validate() const {
    sched.validate();
    mix.validate();
    if (cache_interval < 1)
        throw std::invalid_argument("PipelineConfig: cache_interval must be >= 1");
    if (backend == Backend::surrogate && !surrogate)
        throw std::invalid_argument("PipelineConfig: surrogate backend needs a surrogate");
    if (backend == Backend::quantized && !quantized)
        throw std::invalid_argument("PipelineConfig: quantized backend needs a quantized surrogate");
    if (correction && (correction->St != sched.T || correction->C != mix.dim))
        throw std::invalid_argument("PipelineConfig: correction factors do not match T x d");
}

Trajectory sample_trajectory(const PipelineConfig& cfg, std::uint64_t seed, int traj_id,
                             RunStats* stats) {
    cfg.validate();
    const int T = cfg.sched.T;
    const int d = cfg.mix.dim;

    RngState rng = RngState::from_seed(seed);
    std::vector<double> x(d);
    for (int j = 0; j < d; ++j)
        x[j] = rng.normal();

    auto denoise = [&](const std::vector<double>& xin, int t) {
        switch (cfg.backend) {
            case Backend::analytic:
                return analytic_denoiser(xin, t, cfg.mix, cfg.sched);
            case Backend::surrogate:
                return cfg.surrogate->eval(xin, t - 1);
            case Backend::quantized:
                return cfg.quantized->eval(xin, t - 1);
        }
        throw std::logic_error("sample_trajectory: unknown backend");
    };

    Trajectory traj;
    traj.id = traj_id;
    traj.points.reserve(T + 1);
    cache::CacheState cache(cfg.cache_interval);

    for (int t = T; t >= 1; --t) {
        const int label = t - 1;
        const std::vector<double> eps =
            cache.serve(label, [&] { return denoise(x, t); });
        traj.points.push_back({t, x, eps});
        x = reverse_step(x, eps, t, cfg.sched, rng);
        if (cfg.correction)
            x = cfg.correction->apply_row(x, label);
    }
    traj.points.push_back({0, x, std::vector<double>(d, 0.0)});

    if (stats) {
        stats->recomputes = cache.recomputes();
        stats->reuses = cache.reuses();
        stats->speedup = cache::speedup_estimate(cache);
    }
    return traj;
}

std::vector<Trajectory> sample_batch(const PipelineConfig& cfg, std::uint64_t seed_base,
                                     int count, std::uint64_t stream_offset) {
    std::vector<Trajectory> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i)
        out.push_back(sample_trajectory(cfg, seed_base + stream_offset + i, i));
    return out;
}

std::vector<Sample> samples_from_trajectories(const std::vector<Trajectory>& trajs) {
    std::vector<Sample> out;
    for (const Trajectory& traj : trajs)
        for (const TrajectoryPoint& p : traj.points)
            if (p.t >= 1)
                out.push_back(Sample{p.x, p.t - 1, traj.id});
    return out;
}

}  // namespace qclab::diff
