#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "axnn/tensor.hpp"

namespace axnn {

enum class Split { All, Train, Val, Calib };

struct Dataset {
    Tensor inputs;  // [N, ...]
    std::vector<int> labels;
    int num_classes = 0;
    Split split = Split::All;
    std::vector<double> norm_mean, norm_std;  // per channel

    size_t size() const { return labels.size(); }
    std::vector<int> sample_shape() const;
    Tensor gather(const std::vector<int>& idx) const;
    std::vector<int> gather_labels(const std::vector<int>& idx) const;
    Tensor all_inputs() const { return inputs; }
};

// IDX binary files (big-endian dimensions; magic 0x00000803 for ubyte images,
// 0x00000801 for ubyte labels). Pixels are scaled to [0,1].
Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path);
void save_idx(const Dataset& ds, const std::filesystem::path& images_path,
              const std::filesystem::path& labels_path);

// Gaussian-blob multiclass task. Class prototypes are smooth random fields
// (for [C,H,W] dims) or plain Gaussian vectors (for [D]), scaled so the
// minimum pairwise prototype distance equals separation * noise_std.
struct SyntheticSpec {
    int classes = 2;
    int per_class = 100;
    std::vector<int> dim{2};
    uint64_t seed = 0;
    double separation = 6.0;
    double noise_std = 0.1;
};
Dataset gen_synthetic(const SyntheticSpec& spec);

// Disjoint, seed-deterministic (train, val, calib) partition. Fractions must
// sum to 1.
std::array<Dataset, 3> split_dataset(const Dataset& ds, std::array<double, 3> fractions,
                                     uint64_t seed);

}  // namespace axnn
