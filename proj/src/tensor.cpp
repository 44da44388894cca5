#include "axnn/tensor.hpp"

#include <cmath>
#include <numeric>

#include "axnn/errors.hpp"

namespace axnn {

size_t Tensor::numel_of(const std::vector<int>& s) {
    size_t n = 1;
    for (int d : s) {
        if (d < 0) throw ConfigError("negative tensor dimension");
        n *= static_cast<size_t>(d);
    }
    return n;
}

Tensor::Tensor(std::vector<int> s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
    if (data.size() != numel_of(shape))
        throw ConfigError("tensor data length " + std::to_string(data.size()) +
                          " does not match shape " + shape_str(shape));
}

void Tensor::check_finite(const std::string& what) const {
    for (double v : data)
        if (!std::isfinite(v)) throw NumericError("non-finite value in " + what);
}

double tensor_mean(const Tensor& t) {
    if (t.data.empty()) return 0.0;
    double s = 0.0;
    for (double v : t.data) s += v;
    return s / static_cast<double>(t.data.size());
}

double tensor_std(const Tensor& t) {
    if (t.data.empty()) return 0.0;
    double m = tensor_mean(t);
    double acc = 0.0;
    for (double v : t.data) acc += (v - m) * (v - m);
    return std::sqrt(acc / static_cast<double>(t.data.size()));
}

std::string shape_str(const std::vector<int>& s) {
    std::string out = "[";
    for (size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(s[i]);
    }
    return out + "]";
}

}  // namespace axnn
