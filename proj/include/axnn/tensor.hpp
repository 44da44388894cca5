#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace axnn {

// Dense row-major tensor. First dimension is the batch dimension wherever a
// batch is involved. Stored as double so that finite-difference gradient
// checks hold at tight tolerances.
struct Tensor {
    std::vector<int> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s) : shape(std::move(s)), data(numel_of(shape), 0.0) {}
    Tensor(std::vector<int> s, std::vector<double> d);

    static size_t numel_of(const std::vector<int>& s);
    size_t numel() const { return data.size(); }

    double& operator[](size_t i) { return data[i]; }
    double operator[](size_t i) const { return data[i]; }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }
    void check_finite(const std::string& what) const;
};

double tensor_mean(const Tensor& t);
// Population standard deviation over all elements.
double tensor_std(const Tensor& t);

std::string shape_str(const std::vector<int>& s);

}  // namespace axnn
