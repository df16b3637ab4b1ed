#include "qclab/cache.hpp"

#include <cmath>
#include <stdexcept>

namespace qclab::cache {

CacheState::CacheState(int interval) : interval_(interval) {
    if (interval < 1)
        throw std::invalid_argument("CacheState: interval must be >= 1");
}

const std::vector<double>& CacheState::serve(
    int step, const std::function<std::vector<double>()>& compute) {
    if (step < 0)
        throw std::invalid_argument("CacheState: negative step");
    // Refresh every N-th schedule step, with the phase anchored at the
    // first served step: a stored feature is reused until it is N steps
    // old. Anchoring keeps exactly N-1 reuse steps between refreshes, so
    // 50 steps at N = 5 cost 10 recomputations regardless of where the
    // step indices start.
    const bool refresh =
        !stored_.has_value() || std::abs(step - *last_refresh_) >= interval_;
    if (refresh) {
        stored_ = compute();
        last_refresh_ = step;
        ++recomputes_;
    } else {
        ++reuses_;
    }
    return *stored_;
}

void CacheState::reset() {
    stored_.reset();
    last_refresh_.reset();
    recomputes_ = 0;
    reuses_ = 0;
}

double speedup_estimate(const CacheState& state, const CostModel& cost) {
    if (state.steps_served() < 1)
        throw std::invalid_argument("speedup_estimate: no steps served");
    const double full = static_cast<double>(state.steps_served()) * cost.recompute_cost;
    const double cached = static_cast<double>(state.recomputes()) * cost.recompute_cost +
                          static_cast<double>(state.reuses()) * cost.reuse_cost;
    return full / cached;
}

nlohmann::json stats_json(const CacheState& state) {
    return nlohmann::json{{"interval", state.interval()},
                          {"recomputes", state.recomputes()},
                          {"reuses", state.reuses()},
                          {"speedup", speedup_estimate(state)}};
}

}  // namespace qclab::cache
