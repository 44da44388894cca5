#include "axnn/quantize.hpp"

#include <algorithm>
#include <cmath>

#include "axnn/errors.hpp"

namespace axnn {

namespace {
constexpr double kScaleFloor = 1e-8;
}

QuantParams calibrate_quant(const Tensor& t, QuantMode mode) {
    if (t.data.empty()) throw ConfigError("cannot calibrate quantization on empty tensor");
    t.check_finite("quantization input");
    double lo = t.data[0], hi = t.data[0];
    for (double v : t.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    // The calibrated range always contains 0 so the zero level is exactly
    // representable and the zero point stays inside [0, 255].
    lo = std::min(lo, 0.0);
    hi = std::max(hi, 0.0);
    (void)mode;
    QuantParams p;
    p.scale = std::max((hi - lo) / 255.0, kScaleFloor);
    p.zero_point = static_cast<int>(std::clamp<long long>(std::llround(-lo / p.scale), 0, 255));
    return p;
}

uint8_t quantize_value(double v, const QuantParams& p) {
    if (!std::isfinite(v)) throw NumericError("cannot quantize a non-finite value");
    double r = std::clamp(v / p.scale, -512.0, 512.0);  // llround stays defined
    long long q = std::llround(r) + p.zero_point;
    return static_cast<uint8_t>(std::clamp<long long>(q, 0, 255));
}

std::vector<uint8_t> quantize(const Tensor& t, const QuantParams& p) {
    std::vector<uint8_t> out(t.numel());
    for (size_t i = 0; i < t.numel(); ++i) out[i] = quantize_value(t.data[i], p);
    return out;
}

std::pair<std::vector<uint8_t>, QuantParams> quantize(const Tensor& t, QuantMode mode) {
    QuantParams p = calibrate_quant(t, mode);
    return {quantize(t, p), p};
}

Tensor dequantize(const std::vector<uint8_t>& q, std::vector<int> shape, const QuantParams& p) {
    Tensor t(std::move(shape));
    if (t.numel() != q.size()) throw ConfigError("dequantize: shape/data mismatch");
    for (size_t i = 0; i < q.size(); ++i) t.data[i] = p.dequant(q[i]);
    return t;
}

Tensor fake_quant(const Tensor& t, const QuantParams& p) {
    Tensor out(t.shape);
    for (size_t i = 0; i < t.numel(); ++i) out.data[i] = p.dequant(quantize_value(t.data[i], p));
    return out;
}

}  // namespace axnn
