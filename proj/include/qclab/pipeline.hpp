#pragma once

#include <cstdint>
#include <vector>

#include "qclab/cache.hpp"
#include "qclab/diffusion.hpp"
#include "qclab/sample.hpp"

namespace qclab::vc {
struct CorrectionFactors;
}

namespace qclab::diff {

enum class Backend { analytic, surrogate, quantized };

// One composed sampling run: denoiser backend, interval-N feature cache on
// the model output, and optional per-step variance correction of the
// produced state. backend = analytic with cache_interval = 1 and no
// correction is the ground-truth pipeline.
struct PipelineConfig {
    DiffusionSchedule sched;
    MixtureModel mix;
    Backend backend = Backend::analytic;
    int cache_interval = 1;
    const LinearSurrogate* surrogate = nullptr;
    const QuantizedSurrogate* quantized = nullptr;
    const vc::CorrectionFactors* correction = nullptr;

    void validate() const;
};

struct RunStats {
    long recomputes = 0;
    long reuses = 0;
    double speedup = 1.0;
};

Trajectory sample_trajectory(const PipelineConfig& cfg, std::uint64_t seed, int traj_id = 0,
                             RunStats* stats = nullptr);

std::vector<Trajectory> sample_batch(const PipelineConfig& cfg, std::uint64_t seed_base,
                                     int count, std::uint64_t stream_offset = 0);

// Calibration view of trajectories: every model input x_t tagged with its
// step label s = t - 1.
std::vector<Sample> samples_from_trajectories(const std::vector<Trajectory>& trajs);

}  // namespace qclab::diff
