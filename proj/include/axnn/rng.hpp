#pragma once

#include <cstdint>
#include <random>

namespace axnn {

// splitmix64; used to turn structured seed tuples into engine seeds.
inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t mix_seed(uint64_t a, uint64_t b = 0, uint64_t c = 0, uint64_t d = 0) {
    uint64_t s = mix64(a);
    s = mix64(s ^ mix64(b + 0x100));
    s = mix64(s ^ mix64(c + 0x10000));
    s = mix64(s ^ mix64(d + 0x1000000));
    return s;
}

inline std::mt19937_64 make_engine(uint64_t a, uint64_t b = 0, uint64_t c = 0, uint64_t d = 0) {
    return std::mt19937_64(mix_seed(a, b, c, d));
}

}  // namespace axnn
