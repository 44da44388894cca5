#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "axnn/error_map.hpp"
#include "axnn/noise.hpp"
#include "axnn/quantize.hpp"
#include "axnn/tensor.hpp"

namespace axnn {

enum class LayerKind { Dense, Conv2d, Relu, MaxPool, Flatten };

std::string to_string(LayerKind k);

// Architecture description, as it appears in config files and checkpoints.
struct LayerSpec {
    std::string kind;      // dense | conv2d | relu | maxpool | flatten
    int out_features = 0;  // dense
    int out_channels = 0;  // conv2d
    int kernel = 3;        // conv2d (square)
    int pool = 2;          // maxpool window == stride
};

struct Layer {
    LayerKind kind = LayerKind::Relu;
    std::string name;

    Tensor weights;  // dense: [out, in]; conv2d: [out_ch, in_ch, kh, kw]
    Tensor bias;     // [out] / [out_ch]
    int kernel = 0;
    int pool = 2;

    // resolved during network build; per-sample shapes
    std::vector<int> in_shape, out_shape;
    int fan_in = 0;           // multiplications per output element
    long long mult_count = 0; // multiplications per sample forward

    // quantized-inference state, compute layers only
    QuantParams act_q;          // input-activation params (calibrated)
    bool act_calibrated = false;
    double sigma_l = 0.0;       // learned per-layer robustness factor
    std::shared_ptr<const ErrorMap> assigned_map;

    bool has_weights() const { return kind == LayerKind::Dense || kind == LayerKind::Conv2d; }
    size_t out_numel() const { return Tensor::numel_of(out_shape); }
};

struct QuantNetwork {
    std::vector<int> input_shape;  // per sample
    std::vector<Layer> layers;
    std::vector<LayerSpec> spec;   // architecture as built, kept for checkpoints
    uint64_t rng_seed = 0;

    std::vector<int> compute_layers() const;  // indices of weight-bearing layers
    int num_outputs() const;
    void validate() const;  // shape chaining, sigma/quant presence
};

QuantNetwork build_network(std::vector<int> input_shape, const std::vector<LayerSpec>& specs,
                           uint64_t weight_seed);

// ---- float-domain forward/backward (training) -------------------------------

struct ForwardOptions {
    // Quantize-dequantize weights and compute-layer inputs (QAT-style fake
    // quantization; requires calibrated activation params).
    bool fake_quant = false;
    // AGN injection on compute-layer pre-activations, one draw per compute
    // layer in network order.
    const std::vector<NoiseDraw>* noise = nullptr;
    // Per compute layer noise scales to use instead of the live batch std.
    // The sigma chain rule treats the scale as a constant, so gradient
    // checks evaluate the loss with the scales pinned at the operating point.
    const std::vector<double>* noise_std_override = nullptr;
};

struct LayerTrace {
    Tensor input;         // as consumed (post fake-quant for compute layers)
    Tensor weights_used;  // compute layers: weights as multiplied
    Tensor preact;        // compute layers: W x + b, before noise
    double batch_std = 0.0;
    const NoiseDraw* draw = nullptr;
    std::vector<int64_t> pool_argmax;  // maxpool: flat input index per output
    Tensor output;
};

struct ForwardTrace {
    std::vector<LayerTrace> layers;
    Tensor logits;
};

Tensor forward_float(const QuantNetwork& net, const Tensor& batch, const ForwardOptions& opt = {},
                     ForwardTrace* trace = nullptr);

struct Gradients {
    std::vector<Tensor> dweights;  // indexed like net.layers; empty for non-compute
    std::vector<Tensor> dbias;
    std::vector<double> dsigma;
};

// Standard backpropagation over a recorded forward. The batch standard
// deviation used for noise scaling is treated as a constant.
Gradients backward(const QuantNetwork& net, const ForwardTrace& trace, const Tensor& dlogits);

void sgd_step(QuantNetwork& net, const Gradients& g, double lr);

struct LossGrad {
    double loss = 0.0;
    Tensor dlogits;
};
LossGrad softmax_cross_entropy(const Tensor& logits, const std::vector<int>& labels);
double accuracy(const Tensor& logits, const std::vector<int>& labels);

// ---- integer-domain forward (deployment behavior) ---------------------------

// Weight-side quantization of one compute layer. The int32 bias uses the
// combined scale act.scale * wq.scale, the standard int8 inference contract.
struct QuantizedLayer {
    QuantParams wq;
    std::vector<uint8_t> qweights;
    std::vector<int32_t> qbias;
};
QuantizedLayer quantize_layer_weights(const Layer& layer);

// Integer pre-activation accumulators (bias included) for one compute layer
// on one quantized input sample; map == nullptr runs the accurate product.
// Zero-point cross terms are folded in so that swapping the multiplier
// changes the result by exactly the sum of the map's error entries.
std::vector<int32_t> int_layer_preact(const Layer& layer, const QuantizedLayer& ql,
                                      const std::vector<uint8_t>& qin, const ErrorMap* map);

// Streaming mean/std accumulator.
struct MeanVarAccum {
    double n = 0, mean = 0, m2 = 0;
    void add(double v);
    double stddev() const;  // population
};

struct ActivationRecorder {
    // per compute layer: flattened quantized input per image
    std::map<int, std::vector<std::vector<uint8_t>>> qinputs;
    // per compute layer: dequantized pre-activation statistics
    std::map<int, MeanVarAccum> preact_stats;
};

// Behavioral integer forward. use_maps selects the assigned error maps
// (missing assignment is a configuration error); otherwise every product is
// accurate. With a trace, dequantized operands and pre-activations are
// recorded so backward() sees the approximate forward as if it were exact
// (straight-through estimator).
Tensor forward_int(const QuantNetwork& net, const Tensor& batch, bool use_maps,
                   ActivationRecorder* rec = nullptr, ForwardTrace* trace = nullptr);

inline Tensor forward_accurate(const QuantNetwork& net, const Tensor& batch) {
    return forward_int(net, batch, false);
}
inline Tensor forward_approx(const QuantNetwork& net, const Tensor& batch) {
    return forward_int(net, batch, true);
}

}  // namespace axnn
