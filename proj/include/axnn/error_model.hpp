#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "axnn/dataset.hpp"
#include "axnn/error_map.hpp"
#include "axnn/network.hpp"

namespace axnn {

// Normalized relative frequencies of quantized operand values.
struct OperandHistogram {
    std::array<double, 256> probs{};
    double operator[](size_t i) const { return probs[i]; }
};

OperandHistogram histogram(std::span<const uint8_t> values);

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;
};

// Exact moments of e(x, w) under independent operand draws from px and pw:
//   mu    = sum_x sum_w px(x) pw(w) e(x,w)
//   sigma^2 = sum_x sum_w px(x) pw(w) (e(x,w) - mu)^2
MeanStd single_dist_stats(const ErrorMap& map, const OperandHistogram& px,
                          const OperandHistogram& pw);

// Pooled mean/std of equally sized groups from their per-group moments:
//   mu      = (1/k) sum mu_i
//   sigma^2 = (1/k) [ sum (sigma_i^2 + mu_i^2) - (1/k) (sum mu_i)^2 ]
MeanStd combine_groups(std::span<const MeanStd> groups);

struct ErrorStats {
    double mu_z = 0.0;     // per-multiplication mean error
    double sigma_z = 0.0;  // per-multiplication std
    int fan_in = 1;
    double mu_e = 0.0;     // fan_in * mu_z
    double sigma_e = 0.0;  // sqrt(fan_in) * sigma_z

    static ErrorStats from_per_mult(double mu_z, double sigma_z, int fan_in);
    static ErrorStats from_aggregate(double mu_e, double sigma_e, int fan_in);
};

// Quantized inputs of compute layers recorded over a dataset via the accurate
// integer forward, plus dequantized pre-activation statistics.
struct LayerInputRecord {
    std::vector<int> in_shape;                 // per-sample input shape
    std::vector<std::vector<uint8_t>> images;  // flattened quantized input per image
    double preact_mean = 0.0, preact_std = 0.0;
};
std::map<int, LayerInputRecord> record_layer_inputs(const QuantNetwork& net, const Dataset& data);

// k operand vectors, each one receptive field: the full input vector for
// dense layers, one conv patch (all input channels) for conv layers.
struct SampleSet {
    int fan_in = 0;
    std::vector<std::vector<uint8_t>> samples;
};
SampleSet draw_samples(const Layer& layer, const LayerInputRecord& record, int k, uint64_t seed);

OperandHistogram weight_histogram(const Layer& layer);
OperandHistogram global_activation_histogram(const LayerInputRecord& record);

// Multi-distribution estimate of the aggregate error moments at the layer
// output. Each sample pins the operand values of one receptive field, so
// conditioned on the sample only the weight draw is random: the sample's
// aggregate error has mean n * local mean and variance n * local average of
// Var_w(e | x). Pooling those aggregates across samples carries the spread
// of per-sample means at full weight, which is what separates this estimate
// from the global-histogram model.
ErrorStats estimate_layer_error(const ErrorMap& map, const Layer& layer, const SampleSet& samples,
                                const OperandHistogram& pw);

// Ablation baseline: one global activation histogram for the whole layer.
ErrorStats single_dist_mode(const ErrorMap& map, const Layer& layer,
                            const OperandHistogram& global_px, const OperandHistogram& pw);

// Ground truth by behavioral simulation: accurate and approximate integer
// pre-activations of one layer over the dataset; mean/std of the difference
// pooled over all outputs and inputs.
MeanStd mc_oracle(const ErrorMap& map, const QuantNetwork& net, int layer_index,
                  const Dataset& data);
MeanStd mc_oracle_from_record(const ErrorMap& map, const Layer& layer,
                              const LayerInputRecord& record);

// Fan-in below this triggers a warning: the normal-convergence assumption
// behind the AGN surrogate thins out for very small accumulations.
constexpr int kLowFanInWarning = 32;

}  // namespace axnn
