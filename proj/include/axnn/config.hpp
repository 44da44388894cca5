#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "axnn/agn.hpp"
#include "axnn/dataset.hpp"
#include "axnn/error_map.hpp"
#include "axnn/network.hpp"
#include "axnn/train.hpp"

namespace axnn {

struct BuiltinMultSpec {
    std::string kind;  // accurate | trunc | mitchell
    int t = 0;         // trunc only
    double energy = 1.0;
};

// Either a directory of interchange files (path) or an inline builtin list.
struct LibraryConfig {
    std::string path;
    std::vector<BuiltinMultSpec> builtin;
};

struct DatasetConfig {
    std::string kind;  // synthetic | idx
    SyntheticSpec synth;
    std::string images, labels;
    std::array<double, 3> fractions{0.8, 0.1, 0.1};
};

struct PhaseConfig {
    int epochs = 10;
    double lr = 0.05;
    double lr_decay = 0.9;
    int decay_every = 5;
    int batch_size = 32;
};

struct SeedsConfig {
    uint64_t weights = 1, data = 2, noise = 3, sampling = 4, eval = 5;
};

struct RunConfig {
    std::vector<int> input_shape;
    std::vector<LayerSpec> arch;
    DatasetConfig dataset;
    PhaseConfig train{15, 0.05, 0.9, 5, 32};
    NoiseConfig noise;
    PhaseConfig retrain{5, 1e-3, 0.9, 2, 32};
    int k_samples = 512;
    LibraryConfig library;
    std::vector<double> lambda_grid;
    SeedsConfig seeds;
    std::string output_dir = "out";

    void validate() const;
};

// Strict parser: unknown keys are rejected everywhere.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);

MultiplierLibrary load_library(const LibraryConfig& cfg);

struct LoadedData {
    Dataset train, val, calib;
};
LoadedData load_dataset(const RunConfig& cfg);

TrainConfig phase_to_train(const PhaseConfig& p, uint64_t shuffle_seed);

}  // namespace axnn
