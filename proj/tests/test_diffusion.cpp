#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qclab/pipeline.hpp"
#include "qclab/vc.hpp"

using namespace qclab;
using namespace qclab::diff;

namespace {

MixtureModel single_standard_gaussian(int d) {
    MixtureModel m;
    m.dim = d;
    MixtureComponent c;
    c.weight = 1.0;
    c.mean.assign(d, 0.0);
    c.var = 1.0;
    m.components = {c};
    return m;
}

double rms(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s / a.size());
}

}  // namespace

TEST_CASE("schedule has alpha_bar[0] = 1 and strictly decreasing coefficients") {
    const auto s = DiffusionSchedule::linear(50);
    CHECK(s.alpha_bar[0] == 1.0);
    for (int t = 1; t <= 50; ++t) {
        CHECK(s.alpha_bar[t] < s.alpha_bar[t - 1]);
        CHECK(s.beta[t] > 0.0);
        CHECK(s.beta[t] < 1.0);
    }
    // Respaced reduced-step schedule still covers the full noise range.
    CHECK(s.alpha_bar[50] < 1e-3);
    const auto base = DiffusionSchedule::linear(1000);
    CHECK(base.beta[1] == doctest::Approx(1e-4));
    CHECK(base.beta[1000] == doctest::Approx(2e-2));
    CHECK(s.alpha_bar[50] == doctest::Approx(base.alpha_bar[1000]).epsilon(1e-12));
    CHECK(s.alpha_bar[25] == doctest::Approx(base.alpha_bar[500]).epsilon(1e-12));
}

TEST_CASE("forward noise at t = 0 returns x0 exactly") {
    const auto sched = DiffusionSchedule::linear(10);
    RngState rng = RngState::from_seed(1);
    const std::vector<double> x0 = {0.3, -0.7, 1.1};
    CHECK(forward_noise(x0, 0, sched, rng) == x0);
}

TEST_CASE("forward noise at the deep end of a long schedule is near standard normal") {
    // The canonical 1000-step schedule drives alpha_bar to ~4e-5.
    const auto sched = DiffusionSchedule::linear(1000);
    CHECK(sched.alpha_bar[1000] < 1e-3);
    RngState rng = RngState::from_seed(17);
    const std::vector<double> x0 = {0.5};
    double sum = 0.0, sum2 = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const double v = forward_noise(x0, 1000, sched, rng)[0];
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("forward noise is reproducible from the seed") {
    const auto sched = DiffusionSchedule::linear(20);
    const std::vector<double> x0 = {1.0, 2.0};
    RngState a = RngState::from_seed(9);
    RngState b = RngState::from_seed(9);
    CHECK(forward_noise(x0, 7, sched, a) == forward_noise(x0, 7, sched, b));
}

TEST_CASE("analytic denoiser reduces to the linear pull for one standard gaussian") {
    const auto sched = DiffusionSchedule::linear(40);
    const auto mix = single_standard_gaussian(3);
    const int t = 25;
    const double ab = sched.alpha_bar[t];
    const std::vector<double> x = {0.4, -1.2, 2.0};
    const auto eps = analytic_denoiser(x, t, mix, sched);
    for (int j = 0; j < 3; ++j)
        CHECK(eps[j] == doctest::Approx(x[j] * std::sqrt(1.0 - ab)).epsilon(1e-10));
}

TEST_CASE("analytic denoiser matches the general single-component closed form") {
    const auto sched = DiffusionSchedule::linear(40);
    MixtureModel mix;
    mix.dim = 2;
    MixtureComponent c;
    c.weight = 1.0;
    c.mean = {1.5, -0.5};
    c.var = 0.3;
    mix.components = {c};
    const int t = 18;
    const double ab = sched.alpha_bar[t];
    const std::vector<double> x = {0.9, 0.1};
    const auto eps = analytic_denoiser(x, t, mix, sched);
    for (int j = 0; j < 2; ++j) {
        const double want = std::sqrt(1.0 - ab) * (x[j] - std::sqrt(ab) * c.mean[j]) /
                            (ab * c.var + 1.0 - ab);
        CHECK(eps[j] == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("a far-separated component absorbs all responsibility at its scaled mean") {
    const auto sched = DiffusionSchedule::linear(40);
    MixtureModel mix;
    mix.dim = 2;
    MixtureComponent a, b;
    a.weight = 0.5;
    a.mean = {30.0, 30.0};
    a.var = 0.05;
    b.weight = 0.5;
    b.mean = {-30.0, -30.0};
    b.var = 0.05;
    mix.components = {a, b};
    const int t = 10;
    const double sab = std::sqrt(sched.alpha_bar[t]);
    std::vector<double> x = {30.0 * sab, 30.0 * sab};
    // eps_hat must match the single-component formula of component a to the
    // precision of a >= 1 - 1e-6 responsibility.
    const auto eps = analytic_denoiser(x, t, mix, sched);
    MixtureModel only_a = mix;
    only_a.components = {a};
    only_a.components[0].weight = 1.0;
    const auto eps_a = analytic_denoiser(x, t, only_a, sched);
    CHECK(rms(eps, eps_a) < 1e-6);
}

TEST_CASE("symmetric two-component mixture has eps_hat = 0 at the origin") {
    const auto sched = DiffusionSchedule::linear(40);
    MixtureModel mix;
    mix.dim = 2;
    MixtureComponent a, b;
    a.weight = 0.5;
    a.mean = {1.0, 2.0};
    a.var = 0.2;
    b.weight = 0.5;
    b.mean = {-1.0, -2.0};
    b.var = 0.2;
    mix.components = {a, b};
    const auto eps = analytic_denoiser({0.0, 0.0}, 15, mix, sched);
    CHECK(std::abs(eps[0]) < 1e-14);
    CHECK(std::abs(eps[1]) < 1e-14);
}

TEST_CASE("ddim step with eps_hat = 0 rescales by sqrt(abar ratio)") {
    auto sched = DiffusionSchedule::linear(30, SamplerKind::ddim);
    RngState rng = RngState::from_seed(3);
    const int t = 12;
    const std::vector<double> x = {2.0, -1.0};
    const auto out = reverse_step(x, {0.0, 0.0}, t, sched, rng);
    const double scale = std::sqrt(sched.alpha_bar[t - 1] / sched.alpha_bar[t]);
    CHECK(out[0] == doctest::Approx(2.0 * scale).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(-1.0 * scale).epsilon(1e-12));
}

TEST_CASE("a single perfect step inverts the forward noising exactly") {
    for (SamplerKind kind : {SamplerKind::ddpm, SamplerKind::ddim}) {
        auto sched = DiffusionSchedule::linear(1, kind);
        RngState rng = RngState::from_seed(5);
        const std::vector<double> x0 = {0.7, -0.3};
        // Noise x0 forward with a known eps, then step back with that eps.
        const double ab = sched.alpha_bar[1];
        const std::vector<double> eps = {0.37, -1.21};
        std::vector<double> x1(2);
        for (int j = 0; j < 2; ++j)
            x1[j] = std::sqrt(ab) * x0[j] + std::sqrt(1.0 - ab) * eps[j];
        const auto back = reverse_step(x1, eps, 1, sched, rng);
        CHECK(std::abs(back[0] - x0[0]) < 1e-10);
        CHECK(std::abs(back[1] - x0[1]) < 1e-10);
    }
}

TEST_CASE("reverse step is reproducible for a fixed seed") {
    auto sched = DiffusionSchedule::linear(30);
    const std::vector<double> x = {1.0, 1.0}, eps = {0.1, -0.1};
    RngState a = RngState::from_seed(8);
    RngState b = RngState::from_seed(8);
    CHECK(reverse_step(x, eps, 10, sched, a) == reverse_step(x, eps, 10, sched, b));
}

TEST_CASE("surrogate fit reproduces an exactly linear denoiser") {
    const auto sched = DiffusionSchedule::linear(6);
    const auto mix = single_standard_gaussian(3);
    // Enough spread samples at every label.
    std::vector<Sample> calib;
    RngState rng = RngState::from_seed(21);
    for (int label = 0; label < 6; ++label)
        for (int i = 0; i < 8; ++i) {
            Sample s;
            s.timestep = label;
            s.traj_id = i;
            s.features = {rng.normal(), rng.normal(), rng.normal()};
            calib.push_back(s);
        }
    const auto sur = fit_surrogate(calib, mix, sched);
    double worst = 0.0;
    for (int label = 0; label < 6; ++label)
        for (int i = 0; i < 5; ++i) {
            const std::vector<double> x = {rng.normal(), rng.normal(), rng.normal()};
            worst = std::max(worst, rms(sur.eval(x, label),
                                        analytic_denoiser(x, label + 1, mix, sched)));
        }
    CHECK(worst <= 1e-8);
}

TEST_CASE("surrogate fit borrows neighbors for an unseen step and flags it") {
    const auto sched = DiffusionSchedule::linear(3);
    const auto mix = single_standard_gaussian(2);
    std::vector<Sample> calib;
    RngState rng = RngState::from_seed(4);
    for (int label : {0, 2})
        for (int i = 0; i < 6; ++i) {
            Sample s;
            s.timestep = label;
            s.features = {rng.normal(), rng.normal()};
            calib.push_back(s);
        }
    WarningLog log;
    const auto sur = fit_surrogate(calib, mix, sched, &log);
    CHECK(sur.borrowed[1] == 1);
    CHECK(!log.messages.empty());
    (void)sur.eval({0.1, 0.2}, 1);
}

TEST_CASE("duplicate-only samples take the ridge path and stay finite") {
    const auto sched = DiffusionSchedule::linear(1);
    const auto mix = single_standard_gaussian(2);
    std::vector<Sample> calib;
    for (int i = 0; i < 8; ++i) {
        Sample s;
        s.timestep = 0;
        s.features = {0.5, 0.5};
        calib.push_back(s);
    }
    WarningLog log;
    const auto sur = fit_surrogate(calib, mix, sched, &log);
    bool ridge_warned = false;
    for (const auto& m : log.messages)
        if (m.find("ridge") != std::string::npos)
            ridge_warned = true;
    CHECK(ridge_warned);
    const auto y = sur.eval({0.5, 0.5}, 0);
    CHECK(std::isfinite(y[0]));
    CHECK(std::isfinite(y[1]));
}

TEST_CASE("pipeline with N = 1 equals a direct loop over reverse_step bitwise") {
    PipelineConfig cfg;
    cfg.sched = DiffusionSchedule::linear(20);
    cfg.mix = MixtureModel::hypercube_default(4, 3, 0.8, 0.05);
    cfg.backend = Backend::analytic;
    cfg.cache_interval = 1;
    const auto traj = sample_trajectory(cfg, 99);

    RngState rng = RngState::from_seed(99);
    std::vector<double> x(4);
    for (int j = 0; j < 4; ++j)
        x[j] = rng.normal();
    for (int t = 20; t >= 1; --t) {
        const auto eps = analytic_denoiser(x, t, cfg.mix, cfg.sched);
        const auto& p = traj.points[20 - t];
        CHECK(p.t == t);
        CHECK(p.x == x);
        CHECK(p.eps_hat == eps);
        x = reverse_step(x, eps, t, cfg.sched, rng);
    }
    CHECK(traj.points.back().x == x);
    CHECK(traj.points.back().t == 0);
}

TEST_CASE("final deviation from ground truth shrinks as weight bits grow") {
    // Single-component mixture: the analytic denoiser is exactly linear, so
    // the surrogate fit is exact and quantization is the only error source.
    PipelineConfig truth;
    truth.sched = DiffusionSchedule::linear(30);
    truth.mix = single_standard_gaussian(6);
    truth.backend = Backend::analytic;

    // Calibration pool from the analytic pipeline.
    const auto pool = sample_batch(truth, 500, 12);
    const auto calib = samples_from_trajectories(pool);
    const auto sur = fit_surrogate(calib, truth.mix, truth.sched);

    double prev = std::numeric_limits<double>::infinity();
    for (int bits : {4, 8, 16}) {
        const auto q = quantize_surrogate(sur, calib, bits, bits);
        PipelineConfig corrupted = truth;
        corrupted.backend = Backend::quantized;
        corrupted.quantized = &q;
        double mse = 0.0;
        for (int i = 0; i < 4; ++i) {
            const auto a = sample_trajectory(corrupted, 7000 + i);
            const auto b = sample_trajectory(truth, 7000 + i);
            mse += rms(a.points.back().x, b.points.back().x);
        }
        CHECK(mse < prev);
        prev = mse;
    }
}

TEST_CASE("pipeline counts recomputations through the cache") {
    PipelineConfig cfg;
    cfg.sched = DiffusionSchedule::linear(50);
    cfg.mix = MixtureModel::hypercube_default(4, 3, 0.8, 0.05);
    cfg.cache_interval = 5;
    RunStats stats;
    (void)sample_trajectory(cfg, 1, 0, &stats);
    CHECK(stats.recomputes == 10);
    CHECK(stats.reuses == 40);
    CHECK(stats.speedup == doctest::Approx(5.0));
}

TEST_CASE("trajectory variance starts near 1 and its spread contracts by t = 0") {
    PipelineConfig cfg;
    cfg.sched = DiffusionSchedule::linear(50);
    cfg.mix = MixtureModel::hypercube_default(16, 8, 0.8, 0.05);
    const int n = 800;  // desk-scale slice of the 5000-run experiment
    const int d = 16;
    std::vector<double> var_T, var_0;
    for (int i = 0; i < n; ++i) {
        const auto traj = sample_trajectory(cfg, 40000 + i);
        auto coord_var = [&](const std::vector<double>& x) {
            double mean = 0.0;
            for (double v : x)
                mean += v;
            mean /= d;
            double s = 0.0;
            for (double v : x)
                s += (v - mean) * (v - mean);
            return s / (d - 1);
        };
        var_T.push_back(coord_var(traj.points.front().x));
        var_0.push_back(coord_var(traj.points.back().x));
    }
    auto mean_of = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v)
            s += x;
        return s / v.size();
    };
    auto sd_of = [&](const std::vector<double>& v) {
        const double m = mean_of(v);
        double s = 0.0;
        for (double x : v)
            s += (x - m) * (x - m);
        return std::sqrt(s / (v.size() - 1));
    };
    CHECK(mean_of(var_T) > 0.9);
    CHECK(mean_of(var_T) < 1.1);
    CHECK(sd_of(var_0) < sd_of(var_T));
}

TEST_CASE("full pipeline is reproducible from seed and config") {
    PipelineConfig cfg;
    cfg.sched = DiffusionSchedule::linear(25);
    cfg.mix = MixtureModel::hypercube_default(5, 3, 0.8, 0.05);
    cfg.cache_interval = 3;
    const auto a = sample_trajectory(cfg, 123);
    const auto b = sample_trajectory(cfg, 123);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].x == b.points[i].x);
        CHECK(a.points[i].eps_hat == b.points[i].eps_hat);
    }
}
