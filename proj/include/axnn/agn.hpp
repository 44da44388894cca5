#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "axnn/dataset.hpp"
#include "axnn/network.hpp"
#include "axnn/noise.hpp"

namespace axnn {

struct NoiseConfig {
    double sigma_init = 0.1;
    double sigma_max = 0.5;
    double lambda = 0.0;
    int epochs = 30;
    double lr = 1e-2;
    double lr_decay = 0.9;
    int decay_every = 10;
    int batch_size = 32;
    uint64_t noise_seed = 0;
    uint64_t shuffle_seed = 0;

    void validate() const;
};

struct LayerPerturbation {
    double sigma_l = 0.0;
    double c_l = 0.0;           // relative cost, sums to 1 over compute layers
    double last_batch_std = 0.0;
};

// c_l = mult_count / sum(mult_count), one entry per compute layer.
std::vector<double> relative_costs(const QuantNetwork& net);

// y + sigma_l * batch_std(y) * q
Tensor inject_noise(const Tensor& y, double sigma_l, const NoiseDraw& q);

// d(task loss)/d(sigma_l) = sum(upstream * batch_std(y) * q).
// batch_std(y) does not depend on sigma_l, so this chain rule is exact.
double grad_sigma_task(const Tensor& upstream, const Tensor& y, const NoiseDraw& q);
double grad_sigma_task(const Tensor& upstream, double batch_std, const NoiseDraw& q);

// L_N = -sum_l min(|sigma_l|, sigma_max) * c_l
double noise_loss(std::span<const LayerPerturbation> layers, double sigma_max);

// -c_l * sign(sigma_l) inside the cap, 0 outside; subgradient 0 at sigma_l == 0.
double grad_sigma_noise(double sigma_l, double c_l, double sigma_max);

// L = L_T + lambda * L_N
double total_loss(double task, double noise, double lambda);

struct SearchLogRow {
    int epoch = 0;
    double task_loss = 0, noise_loss = 0, total_loss = 0;
    std::vector<double> sigmas;  // per compute layer, end of epoch
};

// Joint SGD on weights, biases and per-layer sigma under the fake-quantized
// noisy forward. Deterministic for fixed seeds; aborts on NaN loss with the
// last completed epoch restored.
std::vector<SearchLogRow> gradient_search(QuantNetwork& net, const Dataset& train,
                                          const NoiseConfig& cfg);

}  // namespace axnn
