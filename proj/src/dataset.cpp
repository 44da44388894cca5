#include "axnn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>

#include "axnn/errors.hpp"
#include "axnn/rng.hpp"

namespace axnn {

std::vector<int> Dataset::sample_shape() const {
    if (inputs.shape.empty()) throw ConfigError("dataset has no inputs");
    return std::vector<int>(inputs.shape.begin() + 1, inputs.shape.end());
}

Tensor Dataset::gather(const std::vector<int>& idx) const {
    std::vector<int> shape = inputs.shape;
    shape[0] = static_cast<int>(idx.size());
    Tensor out(shape);
    size_t stride = inputs.numel() / inputs.shape[0];
    for (size_t i = 0; i < idx.size(); ++i)
        std::copy_n(inputs.data.begin() + static_cast<size_t>(idx[i]) * stride, stride,
                    out.data.begin() + i * stride);
    return out;
}

std::vector<int> Dataset::gather_labels(const std::vector<int>& idx) const {
    std::vector<int> out(idx.size());
    for (size_t i = 0; i < idx.size(); ++i) out[i] = labels[idx[i]];
    return out;
}

namespace {

uint32_t be32(const unsigned char* p) {
    return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) | (uint32_t(p[2]) << 8) | uint32_t(p[3]);
}

void put_be32(std::ofstream& out, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path.string() + "'");
    return std::vector<unsigned char>((std::istreambuf_iterator<char>(in)),
                                      std::istreambuf_iterator<char>());
}

constexpr uint32_t kImagesMagic = 0x00000803;
constexpr uint32_t kLabelsMagic = 0x00000801;

}  // namespace

Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path) {
    auto img = read_file(images_path);
    if (img.size() < 4) throw FormatError("truncated IDX magic in '" + images_path.string() + "'",
                                          static_cast<long long>(img.size()));
    if (be32(img.data()) != kImagesMagic)
        throw FormatError("bad IDX image magic in '" + images_path.string() + "'", 0);
    if (img.size() < 16)
        throw FormatError("truncated IDX image dimensions", static_cast<long long>(img.size()));
    uint64_t n = be32(img.data() + 4), h = be32(img.data() + 8), w = be32(img.data() + 12);
    uint64_t total = n * h * w;
    if (h == 0 || w == 0 || total > (1ull << 31))
        throw FormatError("IDX image dimensions out of range", 4);
    if (img.size() < 16 + total)
        throw FormatError("truncated IDX image payload", static_cast<long long>(img.size()));
    if (img.size() > 16 + total)
        throw FormatError("trailing bytes after IDX image payload", static_cast<long long>(16 + total));

    auto lab = read_file(labels_path);
    if (lab.size() < 4) throw FormatError("truncated IDX magic in '" + labels_path.string() + "'",
                                          static_cast<long long>(lab.size()));
    if (be32(lab.data()) != kLabelsMagic)
        throw FormatError("bad IDX label magic in '" + labels_path.string() + "'", 0);
    if (lab.size() < 8)
        throw FormatError("truncated IDX label dimensions", static_cast<long long>(lab.size()));
    uint64_t ln = be32(lab.data() + 4);
    if (ln != n) throw FormatError("IDX label count does not match image count", 4);
    if (lab.size() < 8 + ln)
        throw FormatError("truncated IDX label payload", static_cast<long long>(lab.size()));
    if (lab.size() > 8 + ln)
        throw FormatError("trailing bytes after IDX label payload", static_cast<long long>(8 + ln));

    Dataset ds;
    ds.inputs = Tensor({static_cast<int>(n), 1, static_cast<int>(h), static_cast<int>(w)});
    for (size_t i = 0; i < total; ++i) ds.inputs.data[i] = img[16 + i] / 255.0;
    ds.labels.resize(n);
    int max_label = 0;
    for (size_t i = 0; i < n; ++i) {
        ds.labels[i] = lab[8 + i];
        max_label = std::max(max_label, ds.labels[i]);
    }
    ds.num_classes = max_label + 1;
    ds.norm_mean = {0.0};
    ds.norm_std = {1.0};
    return ds;
}

void save_idx(const Dataset& ds, const std::filesystem::path& images_path,
              const std::filesystem::path& labels_path) {
    auto shape = ds.sample_shape();
    if (shape.size() != 3 || shape[0] != 1)
        throw ConfigError("save_idx needs [1,H,W] samples, got " + shape_str(shape));
    std::ofstream img(images_path, std::ios::binary);
    if (!img) throw FormatError("cannot write '" + images_path.string() + "'");
    put_be32(img, kImagesMagic);
    put_be32(img, static_cast<uint32_t>(ds.size()));
    put_be32(img, static_cast<uint32_t>(shape[1]));
    put_be32(img, static_cast<uint32_t>(shape[2]));
    for (double v : ds.inputs.data) {
        long long q = std::llround(v * 255.0);
        unsigned char b = static_cast<unsigned char>(std::clamp<long long>(q, 0, 255));
        img.write(reinterpret_cast<const char*>(&b), 1);
    }
    std::ofstream lab(labels_path, std::ios::binary);
    if (!lab) throw FormatError("cannot write '" + labels_path.string() + "'");
    put_be32(lab, kLabelsMagic);
    put_be32(lab, static_cast<uint32_t>(ds.size()));
    for (int l : ds.labels) {
        unsigned char b = static_cast<unsigned char>(l);
        lab.write(reinterpret_cast<const char*>(&b), 1);
    }
}

namespace {

// Smooth random field over an image plane: a few Gaussian bumps with random
// centers, widths and signed amplitudes.
std::vector<double> bump_field(int h, int w, int bumps, double amplitude, std::mt19937_64& eng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<double> f(static_cast<size_t>(h) * w, 0.0);
    for (int b = 0; b < bumps; ++b) {
        double cy = u01(eng) * h, cx = u01(eng) * w;
        double s = (0.15 + 0.2 * u01(eng)) * std::max(h, w);
        double a = amplitude * (0.5 + 0.5 * u01(eng)) * (u01(eng) < 0.5 ? -1.0 : 1.0);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                f[static_cast<size_t>(y) * w + x] +=
                    a * std::exp(-((y - cy) * (y - cy) + (x - cx) * (x - cx)) / (2 * s * s));
    }
    return f;
}

}  // namespace

Dataset gen_synthetic(const SyntheticSpec& spec) {
    if (spec.classes < 1) throw ConfigError("synthetic dataset needs at least one class");
    if (spec.per_class < 1) throw ConfigError("synthetic dataset: per_class must be positive (empty split)");
    if (spec.dim.empty()) throw ConfigError("synthetic dataset needs a sample shape");
    if (spec.noise_std <= 0) throw ConfigError("synthetic dataset: noise_std must be positive");
    const size_t d = Tensor::numel_of(spec.dim);
    const bool image_like = spec.dim.size() == 3;
    auto eng = make_engine(spec.seed, 0x5A11);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // Shared background gives samples strong spatial structure without
    // carrying class information; class fields carry the signal.
    std::vector<double> background(d, 0.0);
    if (image_like) background = bump_field(spec.dim[1], spec.dim[2], 5, 0.30, eng);

    std::vector<std::vector<double>> protos(spec.classes);
    for (auto& p : protos) {
        if (image_like)
            p = bump_field(spec.dim[1], spec.dim[2], 4, 1.0, eng);
        else {
            p.resize(d);
            for (auto& v : p) v = gauss(eng);
        }
    }
    // Scale class fields so the minimum pairwise distance matches the
    // requested separation (in units of the noise std).
    if (spec.classes > 1) {
        double dmin = std::numeric_limits<double>::infinity();
        for (int a = 0; a < spec.classes; ++a)
            for (int b = a + 1; b < spec.classes; ++b) {
                double acc = 0;
                for (size_t i = 0; i < d; ++i) {
                    double diff = protos[a][i] - protos[b][i];
                    acc += diff * diff;
                }
                dmin = std::min(dmin, std::sqrt(acc));
            }
        double scale = spec.separation * spec.noise_std / dmin;
        for (auto& p : protos)
            for (auto& v : p) v *= scale;
    }

    Dataset ds;
    std::vector<int> shape{spec.classes * spec.per_class};
    shape.insert(shape.end(), spec.dim.begin(), spec.dim.end());
    ds.inputs = Tensor(shape);
    ds.labels.resize(static_cast<size_t>(spec.classes) * spec.per_class);
    ds.num_classes = spec.classes;
    size_t pos = 0;
    for (int c = 0; c < spec.classes; ++c)
        for (int m = 0; m < spec.per_class; ++m) {
            double* out = ds.inputs.data.data() + pos * d;
            for (size_t i = 0; i < d; ++i) {
                double v = protos[c][i] + background[i] + spec.noise_std * gauss(eng);
                if (image_like) v = std::clamp(v + 0.5, 0.0, 1.0);
                out[i] = v;
            }
            ds.labels[pos] = c;
            ++pos;
        }
    ds.norm_mean = {0.0};
    ds.norm_std = {1.0};
    return ds;
}

std::array<Dataset, 3> split_dataset(const Dataset& ds, std::array<double, 3> fractions,
                                     uint64_t seed) {
    double sum = fractions[0] + fractions[1] + fractions[2];
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");
    const int n = static_cast<int>(ds.size());
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    auto eng = make_engine(seed, 0xD511);
    std::shuffle(idx.begin(), idx.end(), eng);

    long long n0 = std::llround(fractions[0] * n);
    long long n1 = std::llround(fractions[1] * n);
    n0 = std::clamp<long long>(n0, 0, n);
    n1 = std::clamp<long long>(n1, 0, n - n0);
    std::array<std::vector<int>, 3> parts;
    parts[0].assign(idx.begin(), idx.begin() + n0);
    parts[1].assign(idx.begin() + n0, idx.begin() + n0 + n1);
    parts[2].assign(idx.begin() + n0 + n1, idx.end());

    std::array<Dataset, 3> out;
    const Split tags[3] = {Split::Train, Split::Val, Split::Calib};
    for (int i = 0; i < 3; ++i) {
        out[i].inputs = ds.gather(parts[i]);
        out[i].labels = ds.gather_labels(parts[i]);
        out[i].num_classes = ds.num_classes;
        out[i].split = tags[i];
        out[i].norm_mean = ds.norm_mean;
        out[i].norm_std = ds.norm_std;
    }
    return out;
}

}  // namespace axnn
