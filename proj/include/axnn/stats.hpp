#pragma once

#include <span>
#include <vector>

namespace axnn {

double pearson(std::span<const double> a, std::span<const double> b);

// Quantiles use linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);
double median(std::vector<double> values);

double sample_skewness(std::span<const double> v);
double sample_excess_kurtosis(std::span<const double> v);

}  // namespace axnn
