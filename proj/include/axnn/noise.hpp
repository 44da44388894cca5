#pragma once

#include <cstdint>
#include <vector>

#include "axnn/tensor.hpp"

namespace axnn {

// One batch of standard-normal samples for AGN injection, reproducible from
// its seed. Draws are keyed by (run seed, epoch, batch, layer) so any replay
// of the schedule sees identical noise.
struct NoiseDraw {
    Tensor q;
    uint64_t seed = 0;
};

NoiseDraw make_noise_draw(std::vector<int> shape, uint64_t seed);

}  // namespace axnn
