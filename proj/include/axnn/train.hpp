#pragma once

#include <cstdint>
#include <vector>

#include "axnn/dataset.hpp"
#include "axnn/network.hpp"

namespace axnn {

struct TrainConfig {
    int epochs = 10;
    double lr = 0.05;
    double lr_decay = 1.0;
    int decay_every = 1;
    int batch_size = 32;
    uint64_t shuffle_seed = 0;
};

struct TrainResult {
    std::vector<double> epoch_loss;
};

// lr * decay^floor(epoch / decay_every)
double scheduled_lr(double lr, double decay, int decay_every, int epoch);

TrainResult train_float(QuantNetwork& net, const Dataset& train, const TrainConfig& cfg);

// Approximate retraining: behavioral integer forward through the assigned
// multipliers, straight-through backward. Aborts on NaN loss with the last
// completed epoch's state restored.
TrainResult retrain_ste(QuantNetwork& net, const Dataset& train, const TrainConfig& cfg);

// Set per-layer activation quant params from a float forward over the
// calibration set.
void calibrate(QuantNetwork& net, const Dataset& calib);

double evaluate_float(const QuantNetwork& net, const Dataset& ds);
double evaluate_int(const QuantNetwork& net, const Dataset& ds, bool use_maps);
// Accuracy under AGN at the learned sigma values (fake-quantized forward).
double evaluate_agn(const QuantNetwork& net, const Dataset& ds, uint64_t noise_seed);

std::vector<std::vector<int>> make_batches(size_t n, int batch_size, uint64_t seed, int epoch);

}  // namespace axnn
