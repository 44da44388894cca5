#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "axnn/agn.hpp"
#include "axnn/dataset.hpp"
#include "axnn/error_map.hpp"
#include "axnn/error_model.hpp"
#include "axnn/network.hpp"
#include "axnn/train.hpp"

namespace axnn {

// Scale reconciliation between the learned robustness factors and the error
// model: sigma_l lives in batch-std-relative units, sigma_e in absolute
// (dequantized) pre-activation units. A layer tolerates multipliers with
// sigma_e <= |sigma_l| * calib_std, where calib_std is measured over the
// accurate pre-activation outputs on the calibration set.
struct LayerSensitivity {
    int layer_index = -1;
    double sigma_abs = 0.0;
    double calib_std = 0.0;
    double threshold_abs = 0.0;
};

struct SensitivityProfile {
    std::vector<LayerSensitivity> layers;  // one per compute layer, network order
};

SensitivityProfile build_profile(const QuantNetwork& net,
                                 const std::map<int, LayerInputRecord>& records);
SensitivityProfile build_profile(const QuantNetwork& net, const Dataset& calib);

struct Candidate {
    std::string name;
    double sigma_e = 0.0;    // dequantized units
    double energy_rel = 1.0;
};

// Among candidates with sigma_e <= threshold_abs pick the lowest energy;
// ties break to smaller sigma_e, then to list order. Returns the index.
size_t match_layer(double threshold_abs, std::span<const Candidate> candidates);

struct Assignment {
    std::vector<std::pair<std::string, std::string>> layers;  // layer name -> multiplier name
    double lambda_used = 0.0;
    double energy_total_rel = 1.0;
    // filled after simulation / retraining
    double approx_acc = -1.0, agn_acc = -1.0, retrained_acc = -1.0;

    const std::string* find(const std::string& layer_name) const;
};

struct LayerCandidates {
    int layer_index = -1;
    std::vector<Candidate> candidates;  // library order
};

// sigma_e per (compute layer, multiplier) from the multi-distribution model,
// converted to dequantized units via the layer's combined scale.
std::vector<LayerCandidates> build_candidates(const QuantNetwork& net,
                                              const MultiplierLibrary& lib,
                                              const std::map<int, LayerInputRecord>& records,
                                              int k_samples, uint64_t sampling_seed);

Assignment match_network(const QuantNetwork& net, const SensitivityProfile& profile,
                         const std::vector<LayerCandidates>& candidates,
                         const MultiplierLibrary& lib);

// Multiplication-count weighted relative energy; 1.0 for the all-accurate
// assignment by construction.
double energy_total(const Assignment& a, const QuantNetwork& net, const MultiplierLibrary& lib);

void attach_assignment(QuantNetwork& net, const MultiplierLibrary& lib, const Assignment& a);
Assignment uniform_assignment(const QuantNetwork& net, const MultiplierLibrary& lib,
                              const std::string& mult_name);

// ---- lambda sweep ------------------------------------------------------------

struct SweepSettings {
    NoiseConfig noise;        // lambda is overridden per grid point
    TrainConfig retrain;
    int k_samples = 512;
    uint64_t sampling_seed = 0;
    uint64_t eval_noise_seed = 0;
    bool uniform_baselines = true;
};

struct SweepPoint {
    double lambda = 0.0;
    Assignment assignment;
    double energy_rel = 1.0;
    double approx_acc = 0.0;              // behavioral, before retraining
    double agn_acc = 0.0;                 // AGN space at learned sigmas
    double retrained_acc = 0.0;           // retrained from gradient-search weights
    double retrained_baseline_acc = 0.0;  // same assignment retrained from baseline weights
    bool on_front = false;
    SearchLogRow last_epoch;
    std::vector<SearchLogRow> search_log;
};

struct UniformPoint {
    std::string multiplier;
    double energy_rel = 1.0;
    double approx_acc = 0.0;
    double retrained_acc = 0.0;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    std::vector<UniformPoint> uniform;
    double baseline_int_acc = 0.0;
};

// Full pipeline per lambda: gradient search from the baseline, calibration,
// error estimation, matching, STE retraining, evaluation. Non-dominated
// points (max accuracy, min energy) are flagged on_front.
SweepResult pareto_sweep(const QuantNetwork& baseline, const MultiplierLibrary& lib,
                         const std::vector<double>& lambdas, const Dataset& train,
                         const Dataset& val, const Dataset& calib, const SweepSettings& settings);

void mark_pareto_front(std::vector<SweepPoint>& points);

}  // namespace axnn
