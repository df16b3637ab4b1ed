#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

namespace qclab::cache {

struct CostModel {
    double recompute_cost = 1.0;
    double reuse_cost = 0.0;
};

// Interval-N feature cache: the feature is recomputed when the step index
// satisfies t mod N == 0 (or on a cold start) and reused for the N-1 steps
// in between. One instance serves one trajectory.
class CacheState {
public:
    explicit CacheState(int interval);

    const std::vector<double>& serve(int step,
                                     const std::function<std::vector<double>()>& compute);

    int interval() const { return interval_; }
    long recomputes() const { return recomputes_; }
    long reuses() const { return reuses_; }
    long steps_served() const { return recomputes_ + reuses_; }
    std::optional<int> last_refresh() const { return last_refresh_; }

    void reset();

private:
    int interval_;
    std::optional<std::vector<double>> stored_;
    std::optional<int> last_refresh_;
    long recomputes_ = 0;
    long reuses_ = 0;
};

double speedup_estimate(const CacheState& state, const CostModel& cost = {});

nlohmann::json stats_json(const CacheState& state);

}  // namespace qclab::cache
