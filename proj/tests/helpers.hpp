#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ecgc/quantizer_design.hpp"
#include "ecgc/record.hpp"
#include "ecgc/signal_io.hpp"

namespace ecgc::testing {

inline std::vector<double> random_signal(std::mt19937_64& rng, std::size_t n, double lo = -5.0,
                                         double hi = 5.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> out(n);
    for (auto& v : out) v = dist(rng);
    return out;
}

/// Random walk with increments bounded by |step_max|.
inline std::vector<double> random_walk(std::mt19937_64& rng, std::size_t n, double step_max) {
    std::uniform_real_distribution<double> dist(-step_max, step_max);
    std::vector<double> out(n);
    double x = 0.0;
    for (auto& v : out) {
        x += dist(rng);
        v = x;
    }
    return out;
}

inline std::vector<double> ar1_signal(std::mt19937_64& rng, std::size_t n, double rho,
                                      double noise_std) {
    std::normal_distribution<double> noise(0.0, noise_std);
    std::vector<double> out(n);
    double x = 0.0;
    for (auto& v : out) {
        x = rho * x + noise(rng);
        v = x;
    }
    return out;
}

inline Codebook random_codebook(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> level_count(2, 64);
    std::uniform_real_distribution<double> edge(6.0, 12.0);
    const double hi = edge(rng);
    return uniform_codebook(-hi, hi, level_count(rng));
}

inline std::vector<double> synth_channel(int beats, double noise_std, std::uint64_t seed) {
    SyntheticEcgSpec spec;
    spec.beats = beats;
    spec.noise_std_mv = noise_std;
    return synthesize_ecg(spec, seed).channels[0].samples;
}

} // namespace ecgc::testing
