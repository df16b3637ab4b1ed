#include "qclab/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qclab::quant {

void QuantizerParams::validate() const {
    if (bits < 2 || bits > 30)
        throw std::invalid_argument("QuantizerParams: bits must be in [2, 30]");
    if (channels.empty())
        throw std::invalid_argument("QuantizerParams: no channel parameters");
    if (granularity == Granularity::per_tensor && channels.size() != 1)
        throw std::invalid_argument("QuantizerParams: per-tensor params must hold one channel");
    for (const auto& c : channels) {
        if (!(c.l < c.u))
            throw std::invalid_argument("QuantizerParams: requires l < u");
        if (!(c.s > 0.0))
            throw std::invalid_argument("QuantizerParams: requires s > 0");
        if (c.z < 0 || c.z > qmax())
            throw std::invalid_argument("QuantizerParams: zero-point out of range");
    }
}

void to_json(nlohmann::json& j, const QuantizerParams& p) {
    j = nlohmann::json{
        {"b", p.bits},
        {"granularity", p.granularity == Granularity::per_tensor ? "per_tensor" : "per_channel"},
        {"axis", p.axis},
        {"channels", nlohmann::json::array()}};
    for (const auto& c : p.channels)
        j["channels"].push_back({{"s", c.s}, {"z", c.z}, {"l", c.l}, {"u", c.u}});
}

void from_json(const nlohmann::json& j, QuantizerParams& p) {
    p.bits = j.at("b").get<int>();
    const std::string g = j.at("granularity").get<std::string>();
    if (g == "per_tensor")
        p.granularity = Granularity::per_tensor;
    else if (g == "per_channel")
        p.granularity = Granularity::per_channel;
    else
        throw std::invalid_argument("QuantizerParams: unknown granularity '" + g + "'");
    p.axis = j.value("axis", 0);
    p.channels.clear();
    for (const auto& c : j.at("channels")) {
        ChannelParams cp;
        cp.s = c.at("s").get<double>();
        cp.z = c.at("z").get<int>();
        cp.l = c.at("l").get<double>();
        cp.u = c.at("u").get<double>();
        p.channels.push_back(cp);
    }
    p.validate();
}

ChannelParams params_from_range(double lo, double hi, int bits, WarningLog* warnings) {
    if (!(std::isfinite(lo) && std::isfinite(hi)) || lo > hi)
        throw std::invalid_argument("params_from_range: invalid range");
    if (lo == hi) {
        warn(warnings, "calibrate: degenerate range l == u; widened by 1e-08");
        lo -= 1e-8;
        hi += 1e-8;
    }
    ChannelParams c;
    c.l = lo;
    c.u = hi;
    const int qmax = (1 << bits) - 1;
    c.s = (hi - lo) / qmax;
    c.z = static_cast<int>(std::clamp(round_half_away(-lo / c.s), 0.0, static_cast<double>(qmax)));
    return c;
}

QuantizerParams calibrate_per_tensor(const std::vector<std::vector<double>>& samples, int bits,
                                     WarningLog* warnings) {
    if (samples.empty())
        throw std::invalid_argument("calibrate: empty sample set");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (const auto& s : samples)
        for (double v : s) {
            if (!std::isfinite(v))
                throw std::invalid_argument("calibrate: non-finite sample value");
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            any = true;
        }
    if (!any)
        throw std::invalid_argument("calibrate: samples contain no values");
    QuantizerParams p;
    p.bits = bits;
    p.granularity = Granularity::per_tensor;
    p.channels = {params_from_range(lo, hi, bits, warnings)};
    p.validate();
    return p;
}

QuantizerParams calibrate_per_channel(const Matrix& weights, int bits, WarningLog* warnings) {
    if (weights.rows() == 0 || weights.cols() == 0)
        throw std::invalid_argument("calibrate: empty weight matrix");
    weights.ensure_finite("calibrate_per_channel input");
    QuantizerParams p;
    p.bits = bits;
    p.granularity = Granularity::per_channel;
    p.axis = 0;
    for (std::size_t i = 0; i < weights.rows(); ++i) {
        const double* row = weights.row(i);
        double lo = row[0], hi = row[0];
        for (std::size_t j = 1; j < weights.cols(); ++j) {
            lo = std::min(lo, row[j]);
            hi = std::max(hi, row[j]);
        }
        p.channels.push_back(params_from_range(lo, hi, bits, warnings));
    }
    p.validate();
    return p;
}

int quantize_value(double x, const ChannelParams& c, int qmax) {
    const double q = round_half_away(x / c.s) + c.z;
    return static_cast<int>(std::clamp(q, 0.0, static_cast<double>(qmax)));
}

std::vector<int> quantize(const std::vector<double>& x, const QuantizerParams& p) {
    p.validate();
    std::vector<int> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = quantize_value(x[i], p.channel(i), p.qmax());
    return out;
}

std::vector<double> dequantize(const std::vector<int>& q, const QuantizerParams& p) {
    p.validate();
    std::vector<double> out(q.size());
    for (std::size_t i = 0; i < q.size(); ++i)
        out[i] = dequantize_value(q[i], p.channel(i));
    return out;
}

std::vector<double> fake_quant(const std::vector<double>& x, const QuantizerParams& p) {
    p.validate();
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const ChannelParams& c = p.channel(i);
        out[i] = dequantize_value(quantize_value(x[i], c, p.qmax()), c);
    }
    return out;
}

Matrix fake_quant_rows(const Matrix& x, const QuantizerParams& p) {
    p.validate();
    if (p.granularity == Granularity::per_channel && p.channels.size() != x.rows())
        throw std::invalid_argument("fake_quant_rows: channel count does not match rows");
    Matrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const ChannelParams& c = p.channel(i);
        for (std::size_t j = 0; j < x.cols(); ++j)
            out(i, j) = dequantize_value(quantize_value(x(i, j), c, p.qmax()), c);
    }
    out.ensure_finite("fake_quant_rows output");
    return out;
}

void CalibrationStats::observe(const std::string& tensor, int channel, int bucket, double value) {
    if (!std::isfinite(value))
        throw std::invalid_argument("CalibrationStats: non-finite value");
    const Key k{tensor, channel, bucket};
    auto it = map_.find(k);
    if (it == map_.end()) {
        map_[k] = Range{value, value};
    } else {
        it->second.lo = std::min(it->second.lo, value);
        it->second.hi = std::max(it->second.hi, value);
    }
}

void CalibrationStats::observe_all(const std::string& tensor, int bucket,
                                   const std::vector<double>& values) {
    for (double v : values)
        observe(tensor, -1, bucket, v);  // channel -1 pools all channels (per-tensor)
}

void CalibrationStats::merge(const CalibrationStats& other) {
    for (const auto& [k, r] : other.map_) {
        auto it = map_.find(k);
        if (it == map_.end()) {
            map_[k] = r;
        } else {
            it->second.lo = std::min(it->second.lo, r.lo);
            it->second.hi = std::max(it->second.hi, r.hi);
        }
    }
}

bool CalibrationStats::has(const std::string& tensor, int channel, int bucket) const {
    return map_.count(Key{tensor, channel, bucket}) > 0;
}

CalibrationStats::Range CalibrationStats::range(const std::string& tensor, int channel,
                                                int bucket) const {
    auto it = map_.find(Key{tensor, channel, bucket});
    if (it == map_.end())
        throw std::out_of_range("CalibrationStats: no stats for tensor '" + tensor +
                                "' channel " + std::to_string(channel) + " bucket " +
                                std::to_string(bucket));
    return it->second;
}

QuantizerParams CalibrationStats::tensor_params(const std::string& tensor, int bucket, int bits,
                                                WarningLog* warnings) const {
    const Range r = range(tensor, -1, bucket);
    QuantizerParams p;
    p.bits = bits;
    p.granularity = Granularity::per_tensor;
    p.channels = {params_from_range(r.lo, r.hi, bits, warnings)};
    p.validate();
    return p;
}

}  // namespace qclab::quant
