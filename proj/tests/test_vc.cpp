#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qclab/vc.hpp"

using namespace qclab;
using namespace qclab::vc;
using qclab::diff::Backend;
using qclab::diff::DiffusionSchedule;
using qclab::diff::MixtureModel;
using qclab::diff::PipelineConfig;

namespace {

PairedBatch scalar_batch(std::vector<double> corrupted, std::vector<double> reference) {
    PairedBatch b;
    b.corrupted = Matrix(corrupted.size(), 1);
    b.reference = Matrix(reference.size(), 1);
    for (std::size_t i = 0; i < corrupted.size(); ++i) {
        b.corrupted(i, 0) = corrupted[i];
        b.reference(i, 0) = reference[i];
    }
    return b;
}

PairedBatch random_batch(int n, int c, RngState& rng, double ref_floor = 0.0) {
    PairedBatch b;
    b.corrupted = Matrix(n, c);
    b.reference = Matrix(n, c);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < c; ++j) {
            b.corrupted(i, j) = 2.0 * rng.normal();
            double r = rng.normal();
            if (ref_floor > 0.0 && std::abs(r) < ref_floor)
                r = (r >= 0 ? ref_floor : -ref_floor) + r;
            b.reference(i, j) = r;
        }
    return b;
}

// Stationary point of the per-channel quadratic objective, derived locally
// for the tests: K* = (sum ab + sum ab/x'^2) / (sum a^2 + sum a^2/x'^2).
double stationary_point(const PairedBatch& b, double mu, int c, double guard) {
    double num = 0.0, den = 0.0;
    for (std::size_t n = 0; n < b.corrupted.rows(); ++n) {
        const double a = b.corrupted(n, c) - mu;
        const double bb = b.reference(n, c) - mu;
        num += a * bb;
        den += a * a;
        const double xr = b.reference(n, c);
        if (std::abs(xr) >= guard) {
            num += a * bb / (xr * xr);
            den += a * a / (xr * xr);
        }
    }
    return num / den;
}

}  // namespace

TEST_CASE("objective is zero when the estimate already matches the reference") {
    const auto b = scalar_batch({1.0, -0.7, 0.3}, {1.0, -0.7, 0.3});
    CHECK(objective({1.0}, b, {0.0}) == 0.0);
}

TEST_CASE("objective at K = 0 reduces to the mu-vs-reference residual") {
    const auto b = scalar_batch({5.0, 9.0}, {2.0, 4.0});
    const double mu = 1.0;
    double want = 0.0;
    for (double xr : {2.0, 4.0}) {
        const double e = mu - xr;
        want += e * e + (e / xr) * (e / xr);
    }
    CHECK(objective({0.0}, b, {mu}) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("objective reaches zero at the exactly reconstructing K") {
    // x^ - mu = 2, x' - mu = 1, x' = 2, K = 0.5 makes x~ equal x'.
    const auto b = scalar_batch({3.0}, {2.0});
    CHECK(objective({0.5}, b, {1.0}) == 0.0);
}

TEST_CASE("analytic closed form reproduces the printed worked cases") {
    // x^ = x' with |x'| = 1 and mu = 0 gives exactly K = 1.
    const auto unit = scalar_batch({1.0, -1.0, 1.0}, {1.0, -1.0, 1.0});
    CHECK(solve_analytic(unit, {0.0})[0] == doctest::Approx(1.0).epsilon(1e-15));

    // Single sample, mu = 0, x^ = 2, x' = 1: numerator 4, denominator 8.
    const auto single = scalar_batch({2.0}, {1.0});
    CHECK(solve_analytic(single, {0.0})[0] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("analytic solver falls back to K = 1 on a zero denominator") {
    // Corrupted equals mu everywhere: every term of the denominator is 0.
    const auto b = scalar_batch({0.5, 0.5}, {1.0, 2.0});
    WarningLog log;
    const auto k = solve_analytic(b, {0.5}, 1e-3, &log);
    CHECK(k[0] == 1.0);
    CHECK(!log.messages.empty());
}

TEST_CASE("brute force matches the locally derived stationary point") {
    RngState rng = RngState::from_seed(31);
    for (int trial = 0; trial < 20; ++trial) {
        const auto b = random_batch(12, 3, rng, 0.05);
        std::vector<double> mu(3);
        for (int c = 0; c < 3; ++c) {
            double s = 0.0;
            for (int n = 0; n < 12; ++n)
                s += b.reference(n, c);
            mu[c] = s / 12.0;
        }
        const auto k = solve_bruteforce(b, mu);
        for (int c = 0; c < 3; ++c) {
            const double want = stationary_point(b, mu[c], c, 1e-3);
            if (std::abs(want) < 3.9)  // stationary point inside the bracket
                CHECK(std::abs(k[c] - want) < 1e-6);
        }
    }
}

TEST_CASE("brute force finds K = 1 for an already-correct batch and 0.5 for the scalar case") {
    const auto same = scalar_batch({1.3, -0.8, 0.6}, {1.3, -0.8, 0.6});
    CHECK(std::abs(solve_bruteforce(same, {0.0})[0] - 1.0) < 1e-7);

    const auto single = scalar_batch({2.0}, {1.0});
    CHECK(std::abs(solve_bruteforce(single, {0.0})[0] - 0.5) < 1e-7);
}

TEST_CASE("brute force never loses to the closed form on the objective") {
    RngState rng = RngState::from_seed(99);
    for (int trial = 0; trial < 200; ++trial) {
        const auto b = random_batch(8, 2, rng);
        std::vector<double> mu(2);
        for (int c = 0; c < 2; ++c) {
            double s = 0.0;
            for (int n = 0; n < 8; ++n)
                s += b.reference(n, c);
            mu[c] = s / 8.0;
        }
        const auto kb = solve_bruteforce(b, mu);
        const auto ka = solve_analytic(b, mu);
        CHECK(objective(kb, b, mu) <= objective(ka, b, mu) + 1e-9);
    }
}

TEST_CASE("apply is the identity at K = 1 and collapses to mu at K = 0") {
    CorrectionFactors f;
    f.St = 2;
    f.C = 3;
    f.K = Matrix(2, 3, 1.0);
    f.mu = Matrix(2, 3, 0.25);
    const std::vector<double> x = {0.9, -0.4, 0.1};
    CHECK(f.apply_row(x, 0) == x);
    for (int c = 0; c < 3; ++c)
        f.K(1, c) = 0.0;
    const auto collapsed = f.apply_row(x, 1);
    for (double v : collapsed)
        CHECK(v == 0.25);
}

TEST_CASE("apply scales the sample variance by K^2 exactly") {
    // Exactly representable data: {-2, 2} has population variance 4 around
    // mu = 0; K = 0.5 gives {-1, 1} with variance 1.
    CorrectionFactors f;
    f.St = 1;
    f.C = 1;
    f.K = Matrix(1, 1, 0.5);
    f.mu = Matrix(1, 1, 0.0);
    const auto a = f.apply_row({-2.0}, 0);
    const auto b = f.apply_row({2.0}, 0);
    const double var = (a[0] * a[0] + b[0] * b[0]) / 2.0;
    CHECK(var == 1.0);
}

TEST_CASE("correction factors serialize to json and back") {
    CorrectionFactors f;
    f.St = 2;
    f.C = 2;
    f.K = Matrix(2, 2, 0.75);
    f.mu = Matrix(2, 2, -0.1);
    f.batch_size = 4;
    f.seeds = {10, 11, 12, 13};
    nlohmann::json j = f;
    const auto g = j.get<CorrectionFactors>();
    CHECK(g.K == f.K);
    CHECK(g.mu == f.mu);
    CHECK(g.seeds == f.seeds);
    CHECK(g.batch_size == 4);
}

TEST_CASE("estimate_factors returns K = 1 under null corruption") {
    PipelineConfig truth;
    truth.sched = DiffusionSchedule::linear(12);
    truth.mix = MixtureModel::hypercube_default(4, 3, 0.8, 0.05);
    truth.backend = Backend::analytic;

    EstimationConfig cfg;
    cfg.corrupted = truth;  // identical pipeline: no corruption
    cfg.reference = truth;
    cfg.batch_size = 16;
    cfg.seed_base = 5000;
    const auto f = estimate_factors(cfg);
    double worst = 0.0;
    for (int s = 0; s < f.St; ++s)
        for (int c = 0; c < f.C; ++c)
            worst = std::max(worst, std::abs(f.K(s, c) - 1.0));
    CHECK(worst <= 1e-6);
}

TEST_CASE("estimate_factors recovers an injected doubling as K = 0.5") {
    // Build paired batches by hand: corrupted deviations are exactly twice
    // the reference deviations at one timestep.
    RngState rng = RngState::from_seed(55);
    const int n = 32, c_count = 3;
    PairedBatch b;
    b.corrupted = Matrix(n, c_count);
    b.reference = Matrix(n, c_count);
    std::vector<double> mu(c_count, 0.0);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < c_count; ++c) {
            double r = rng.normal();
            if (std::abs(r) < 0.05)
                r += (r >= 0 ? 0.05 : -0.05);
            b.reference(i, c) = r;
        }
    for (int c = 0; c < c_count; ++c) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            s += b.reference(i, c);
        mu[c] = s / n;
    }
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < c_count; ++c)
            b.corrupted(i, c) = mu[c] + 2.0 * (b.reference(i, c) - mu[c]);
    const auto k = solve_bruteforce(b, mu);
    for (int c = 0; c < c_count; ++c)
        CHECK(std::abs(k[c] - 0.5) < 1e-6);
}

TEST_CASE("the batch-optimal K never increases the objective relative to K = 1") {
    RngState rng = RngState::from_seed(123);
    for (int trial = 0; trial < 50; ++trial) {
        const auto b = random_batch(10, 2, rng);
        std::vector<double> mu(2, 0.0);
        for (int c = 0; c < 2; ++c) {
            double s = 0.0;
            for (int n = 0; n < 10; ++n)
                s += b.reference(n, c);
            mu[c] = s / 10.0;
        }
        const auto k = solve_bruteforce(b, mu);
        CHECK(objective(k, b, mu) <= objective(std::vector<double>(2, 1.0), b, mu) + 1e-12);
    }
}
