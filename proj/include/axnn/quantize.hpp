#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "axnn/tensor.hpp"

namespace axnn {

// Per-tensor affine quantization to uint8:
//   q = clamp(round(v / scale) + zero_point, 0, 255)
struct QuantParams {
    double scale = 1.0;
    int zero_point = 0;

    double dequant(int q) const { return scale * (q - zero_point); }
};

enum class QuantMode {
    ActivationUnsigned,  // network inputs and post-ReLU activations
    WeightAffine,
};

// Min-max calibration with a 1e-8 scale floor for degenerate tensors. The
// range is widened to contain 0 in both modes, so the zero level is exactly
// representable.
QuantParams calibrate_quant(const Tensor& t, QuantMode mode);

uint8_t quantize_value(double v, const QuantParams& p);
std::vector<uint8_t> quantize(const Tensor& t, const QuantParams& p);
std::pair<std::vector<uint8_t>, QuantParams> quantize(const Tensor& t, QuantMode mode);

Tensor dequantize(const std::vector<uint8_t>& q, std::vector<int> shape, const QuantParams& p);
// Quantize-dequantize round trip, used for fake-quantized forward passes.
Tensor fake_quant(const Tensor& t, const QuantParams& p);

}  // namespace axnn
