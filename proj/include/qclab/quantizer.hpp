#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "qclab/matrix.hpp"
#include "qclab/warnings.hpp"

namespace qclab::quant {

enum class Granularity { per_tensor, per_channel };

struct ChannelParams {
    double s = 1.0;  // scale, (u - l) / (2^b - 1)
    int z = 0;       // zero-point, clip(round(-l / s), 0, 2^b - 1)
    double l = 0.0;
    double u = 1.0;
};

struct QuantizerParams {
    int bits = 8;
    Granularity granularity = Granularity::per_tensor;
    int axis = 0;                        // channel axis when per_channel
    std::vector<ChannelParams> channels; // size 1 when per_tensor

    int qmax() const { return (1 << bits) - 1; }
    const ChannelParams& channel(std::size_t c) const {
        return channels[granularity == Granularity::per_tensor ? 0 : c];
    }
    void validate() const;
};

void to_json(nlohmann::json& j, const QuantizerParams& p);
void from_json(const nlohmann::json& j, QuantizerParams& p);

// Round-half-away-from-zero, the rounding mode used throughout.
inline double round_half_away(double x) { return std::round(x); }

// Range -> params. A degenerate range (l == u) is widened symmetrically
// by 1e-8 with a warning.
ChannelParams params_from_range(double lo, double hi, int bits, WarningLog* warnings = nullptr);

// Per-tensor calibration over a sequence of equally shaped tensors.
QuantizerParams calibrate_per_tensor(const std::vector<std::vector<double>>& samples, int bits,
                                     WarningLog* warnings = nullptr);

// Per-channel calibration of a weight matrix; rows are channels (axis 0).
QuantizerParams calibrate_per_channel(const Matrix& weights, int bits,
                                      WarningLog* warnings = nullptr);

int quantize_value(double x, const ChannelParams& c, int qmax);
inline double dequantize_value(int q, const ChannelParams& c) { return (q - c.z) * c.s; }

std::vector<int> quantize(const std::vector<double>& x, const QuantizerParams& p);
std::vector<double> dequantize(const std::vector<int>& q, const QuantizerParams& p);
std::vector<double> fake_quant(const std::vector<double>& x, const QuantizerParams& p);

// Row i of the matrix uses channel i when the params are per-channel.
Matrix fake_quant_rows(const Matrix& x, const QuantizerParams& p);

// Observed min/max per (tensor-id, channel, timestep-bucket). Partial
// stats merge by elementwise min/max.
class CalibrationStats {
public:
    struct Range {
        double lo = 0.0, hi = 0.0;
    };

    void observe(const std::string& tensor, int channel, int bucket, double value);
    void observe_all(const std::string& tensor, int bucket, const std::vector<double>& values);
    void merge(const CalibrationStats& other);

    bool has(const std::string& tensor, int channel, int bucket) const;
    Range range(const std::string& tensor, int channel, int bucket) const;  // throws if missing

    QuantizerParams tensor_params(const std::string& tensor, int bucket, int bits,
                                  WarningLog* warnings = nullptr) const;

    std::size_t size() const { return map_.size(); }

private:
    using Key = std::tuple<std::string, int, int>;
    std::map<Key, Range> map_;
};

}  // namespace qclab::quant
