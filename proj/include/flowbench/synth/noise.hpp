#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "flowbench/core/image.hpp"
#include "flowbench/core/rng.hpp"

namespace flowbench::synth {

namespace detail {

inline double lattice_value(uint64_t seed, int octave, int ix, int iy) {
    uint64_t h = seed;
    h = splitmix64(h ^ (static_cast<uint64_t>(octave) << 48));
    h = splitmix64(h ^ static_cast<uint64_t>(static_cast<uint32_t>(ix)));
    h = splitmix64(h ^ (static_cast<uint64_t>(static_cast<uint32_t>(iy)) << 32));
    return hash_unit(h);
}

inline double fade(double t) { return t * t * (3.0 - 2.0 * t); }

inline double value_noise(uint64_t seed, int octave, double x, double y) {
    const int ix = static_cast<int>(std::floor(x));
    const int iy = static_cast<int>(std::floor(y));
    const double fx = fade(x - ix);
    const double fy = fade(y - iy);
    const double v00 = lattice_value(seed, octave, ix, iy);
    const double v10 = lattice_value(seed, octave, ix + 1, iy);
    const double v01 = lattice_value(seed, octave, ix, iy + 1);
    const double v11 = lattice_value(seed, octave, ix + 1, iy + 1);
    const double top = v00 + (v10 - v00) * fx;
    const double bot = v01 + (v11 - v01) * fx;
    return top + (bot - top) * fy;
}

} // namespace detail

/// Band-limited fractal (value) noise with gradient energy everywhere;
/// output affinely normalized into [0.08, 0.92].
inline GrayImage fractal_noise(int w, int h, uint64_t seed, int octaves = 3,
                               double base_wavelength = 16.0) {
    GrayImage img(w, h);
    double lo = 1e9, hi = -1e9;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0, amp = 1.0, wl = base_wavelength;
            for (int o = 0; o < octaves; ++o) {
                acc += amp * detail::value_noise(seed, o, x / wl, y / wl);
                amp *= 0.5;
                wl *= 0.5;
            }
            img.at(x, y) = static_cast<float>(acc);
            lo = std::min(lo, acc);
            hi = std::max(hi, acc);
        }
    const double span = hi > lo ? (0.92 - 0.08) / (hi - lo) : 0.0;
    for (float& v : img.data) v = static_cast<float>(0.08 + (v - lo) * span);
    return img;
}

} // namespace flowbench::synth
