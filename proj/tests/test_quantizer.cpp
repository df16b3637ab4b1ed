#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qclab/quantizer.hpp"
#include "qclab/rng.hpp"

using namespace qclab;
using namespace qclab::quant;

TEST_CASE("calibration over [-1, 1] at 8 bits gives s = 2/255 and z = 128") {
    const auto p = calibrate_per_tensor({{-1.0, 0.25, 1.0}}, 8);
    CHECK(p.channels[0].l == -1.0);
    CHECK(p.channels[0].u == 1.0);
    CHECK(p.channels[0].s == doctest::Approx(2.0 / 255.0).epsilon(1e-12));
    CHECK(p.channels[0].z == 128);  // round-half-away-from-zero on 127.5
}

TEST_CASE("calibration over [0, 255] at 8 bits gives s = 1 and z = 0") {
    std::vector<double> v;
    for (int i = 0; i <= 255; ++i)
        v.push_back(static_cast<double>(i));
    const auto p = calibrate_per_tensor({v}, 8);
    CHECK(p.channels[0].s == doctest::Approx(1.0));
    CHECK(p.channels[0].z == 0);
}

TEST_CASE("all-zero samples trigger the degenerate-range widening") {
    WarningLog log;
    const auto p = calibrate_per_tensor({{0.0, 0.0, 0.0}}, 8, &log);
    CHECK(p.channels[0].l == -1e-8);
    CHECK(p.channels[0].u == 1e-8);
    CHECK(p.channels[0].s == doctest::Approx(2e-8 / 255.0));
    CHECK(log.messages.size() == 1);
}

TEST_CASE("empty calibration input is rejected") {
    CHECK_THROWS_AS((void)calibrate_per_tensor({}, 8), std::invalid_argument);
}

TEST_CASE("quantize maps zero to the zero-point and the bounds to the code limits") {
    const auto p = calibrate_per_tensor({{-1.0, 1.0}}, 8);
    CHECK(quantize({0.0}, p)[0] == 128);
    CHECK(quantize({1.0}, p)[0] == 255);
    CHECK(quantize({-1.0}, p)[0] == 0);
    CHECK(quantize({50.0}, p)[0] == 255);   // saturation
    CHECK(quantize({-50.0}, p)[0] == 0);
}

TEST_CASE("dequantize of the zero-point is exactly zero") {
    const auto p = calibrate_per_tensor({{-1.0, 1.0}}, 8);
    CHECK(dequantize({128}, p)[0] == 0.0);
}

TEST_CASE("round trip stays within half a scale step for in-range values") {
    RngState rng = RngState::from_seed(2024);
    for (int bits : {4, 8, 16}) {
        const double lo = -1.0, hi = 1.0;
        const auto p = calibrate_per_tensor({{lo, hi}}, bits);
        const double half_step = p.channels[0].s / 2.0;
        double max_err = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double x = lo + (hi - lo) * rng.uniform01();
            const double y = fake_quant({x}, p)[0];
            max_err = std::max(max_err, std::abs(y - x));
        }
        CHECK(max_err <= half_step + 1e-15);
        if (bits == 16)
            CHECK(max_err <= 2.0 / (2.0 * 65535.0) + 1e-15);
    }
}

TEST_CASE("quantization is monotone non-decreasing") {
    RngState rng = RngState::from_seed(7);
    const auto p = calibrate_per_tensor({{-2.0, 3.0}}, 8);
    for (int i = 0; i < 2000; ++i) {
        double a = -3.0 + 7.0 * rng.uniform01();
        double b = -3.0 + 7.0 * rng.uniform01();
        if (a > b)
            std::swap(a, b);
        CHECK(quantize({a}, p)[0] <= quantize({b}, p)[0]);
    }
}

TEST_CASE("calibrating with a superset of samples never shrinks the range") {
    const auto small = calibrate_per_tensor({{-0.5, 0.7}}, 8);
    const auto big = calibrate_per_tensor({{-0.5, 0.7}, {-1.2, 0.9}}, 8);
    CHECK(big.channels[0].l <= small.channels[0].l);
    CHECK(big.channels[0].u >= small.channels[0].u);
}

TEST_CASE("per-channel equals per-tensor when all channels share extrema") {
    Matrix w(3, 4);
    for (std::size_t i = 0; i < 3; ++i) {
        w(i, 0) = -1.0;
        w(i, 1) = 1.0;
        w(i, 2) = 0.3;
        w(i, 3) = -0.2;
    }
    const auto pc = calibrate_per_channel(w, 8);
    const auto pt = calibrate_per_tensor({{-1.0, 1.0}}, 8);
    for (const auto& c : pc.channels) {
        CHECK(c.s == pt.channels[0].s);
        CHECK(c.z == pt.channels[0].z);
        CHECK(c.l == pt.channels[0].l);
        CHECK(c.u == pt.channels[0].u);
    }
}

TEST_CASE("per-channel fake-quant error respects each row's own scale") {
    Matrix w(2, 2);
    w(0, 0) = -1.0;
    w(0, 1) = 1.0;
    w(1, 0) = -0.01;
    w(1, 1) = 0.01;
    const auto p = calibrate_per_channel(w, 8);
    const Matrix fq = fake_quant_rows(w, p);
    CHECK(std::abs(fq(1, 0) - w(1, 0)) <= p.channels[1].s / 2 + 1e-18);
    CHECK(p.channels[1].s < p.channels[0].s);
}

TEST_CASE("params serialize to json and back unchanged") {
    Matrix w(2, 3);
    w(0, 0) = -0.4;
    w(0, 1) = 0.9;
    w(1, 0) = -2.0;
    w(1, 2) = 0.5;
    const auto p = calibrate_per_channel(w, 6);
    nlohmann::json j = p;
    const auto q = j.get<QuantizerParams>();
    CHECK(q.bits == p.bits);
    CHECK(q.granularity == p.granularity);
    REQUIRE(q.channels.size() == p.channels.size());
    for (std::size_t i = 0; i < p.channels.size(); ++i) {
        CHECK(q.channels[i].s == p.channels[i].s);
        CHECK(q.channels[i].z == p.channels[i].z);
        CHECK(q.channels[i].l == p.channels[i].l);
        CHECK(q.channels[i].u == p.channels[i].u);
    }
}

TEST_CASE("calibration stats merge by elementwise min/max") {
    CalibrationStats a, b;
    a.observe("act", 0, 0, -0.5);
    a.observe("act", 0, 0, 0.2);
    b.observe("act", 0, 0, -0.1);
    b.observe("act", 0, 0, 0.9);
    b.observe("act", 1, 0, 3.0);
    a.merge(b);
    CHECK(a.range("act", 0, 0).lo == -0.5);
    CHECK(a.range("act", 0, 0).hi == 0.9);
    CHECK(a.range("act", 1, 0).lo == 3.0);
    CHECK_THROWS_AS((void)a.range("other", 0, 0), std::out_of_range);
}

TEST_CASE("stats-built per-tensor params match direct calibration") {
    CalibrationStats st;
    st.observe_all("act", 0, {-1.0, 0.3, 1.0});
    const auto p = st.tensor_params("act", 0, 8);
    const auto direct = calibrate_per_tensor({{-1.0, 0.3, 1.0}}, 8);
    CHECK(p.channels[0].s == direct.channels[0].s);
    CHECK(p.channels[0].z == direct.channels[0].z);
}
