#include "axnn/stats.hpp"

#include <algorithm>
#include <cmath>

#include "axnn/errors.hpp"

namespace axnn {

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) throw ConfigError("pearson needs two equal series");
    double ma = 0, mb = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= a.size();
    mb /= b.size();
    double num = 0, va = 0, vb = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    double denom = std::sqrt(va * vb);
    if (denom == 0) throw ConfigError("pearson undefined for constant series");
    return num / denom;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw ConfigError("quantile of empty series");
    std::sort(values.begin(), values.end());
    double pos = q * (values.size() - 1);
    size_t lo = static_cast<size_t>(pos);
    if (lo + 1 >= values.size()) return values.back();
    double frac = pos - lo;
    return values[lo] * (1 - frac) + values[lo + 1] * frac;
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

namespace {

void central_moments(std::span<const double> v, double& mean, double& m2, double& m3, double& m4) {
    mean = 0;
    for (double x : v) mean += x;
    mean /= v.size();
    m2 = m3 = m4 = 0;
    for (double x : v) {
        double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= v.size();
    m3 /= v.size();
    m4 /= v.size();
}

}  // namespace

double sample_skewness(std::span<const double> v) {
    if (v.size() < 2) throw ConfigError("skewness needs at least two values");
    double mean, m2, m3, m4;
    central_moments(v, mean, m2, m3, m4);
    if (m2 == 0) return 0;
    return m3 / std::pow(m2, 1.5);
}

double sample_excess_kurtosis(std::span<const double> v) {
    if (v.size() < 2) throw ConfigError("kurtosis needs at least two values");
    double mean, m2, m3, m4;
    central_moments(v, mean, m2, m3, m4);
    if (m2 == 0) return 0;
    return m4 / (m2 * m2) - 3.0;
}

}  // namespace axnn
