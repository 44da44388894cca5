#include "axnn/noise.hpp"

#include <random>

#include "axnn/rng.hpp"

namespace axnn {

NoiseDraw make_noise_draw(std::vector<int> shape, uint64_t seed) {
    NoiseDraw d;
    d.seed = seed;
    d.q = Tensor(std::move(shape));
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (auto& v : d.q.data) v = dist(eng);
    return d;
}

}  // namespace axnn
