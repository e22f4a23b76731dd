// Synthetic datasets shared by the unit and acceptance suites.
#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "popcode/builder.hpp"
#include "popcode/rng.hpp"
#include "popcode/signal.hpp"

namespace fixtures {

// Four-class staircase task. Signals are piecewise-constant over 12 amplitude
// levels with a small uniform jitter; class c concentrates on the equal-mean
// level pair {c, 11-c}, so classes cannot be told apart by mean amplitude
// alone and each finer threshold adds discriminability.
inline popcode::Dataset staircase_dataset(std::size_t per_class = 150,
                                          std::size_t length = 512,
                                          std::size_t segment = 8,
                                          std::uint64_t seed = 99) {
    constexpr int kLevels = 12;
    double levels[kLevels];
    for (int j = 0; j < kLevels; ++j) levels[j] = (j + 1.0) / kLevels;
    popcode::Dataset dataset;
    std::mt19937_64 rng(seed);
    for (int c = 0; c < 4; ++c) {
        double probs[kLevels];
        for (int j = 0; j < kLevels; ++j) probs[j] = 0.1 / (kLevels - 2);
        probs[c] = 0.45;
        probs[kLevels - 1 - c] = 0.45;
        double cumulative[kLevels];
        double acc = 0.0;
        for (int j = 0; j < kLevels; ++j) {
            acc += probs[j];
            cumulative[j] = acc;
        }
        for (std::size_t s = 0; s < per_class; ++s) {
            popcode::Stimulus stimulus;
            stimulus.label = "c" + std::to_string(c);
            stimulus.samples.reserve(length);
            for (std::size_t n = 0; n < length; n += segment) {
                const double u = popcode::uniform_real(rng);
                int level = 0;
                while (level < kLevels - 1 && u > cumulative[level]) ++level;
                for (std::size_t t = 0; t < segment && n + t < length; ++t) {
                    const double jitter = (popcode::uniform_real(rng) - 0.5) * 0.02;
                    stimulus.samples.push_back(levels[level] + jitter);
                }
            }
            dataset.stimuli.push_back(std::move(stimulus));
        }
    }
    return dataset;
}

// Builder configuration sized for the staircase task: short windows so a
// single neuron cannot saturate the level information, and a small shift
// range (the LIF latency on 8-sample segments is a few samples at most).
inline popcode::BuilderConfig staircase_builder_config(std::uint64_t seed = 7) {
    popcode::BuilderConfig config;
    config.window_set = {2, 3, 4, 6, 8};
    config.max_shift = 4;
    config.estimation_subset_size = 64;
    config.seed = seed;
    return config;
}

inline std::vector<double> random_signal(std::mt19937_64& rng, std::size_t length) {
    std::vector<double> samples(length);
    for (double& v : samples) v = popcode::uniform_real(rng);
    return samples;
}

inline popcode::Dataset uniform_noise_dataset(std::size_t stimuli, std::size_t length,
                                              std::uint64_t seed) {
    popcode::Dataset dataset;
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < stimuli; ++i) {
        popcode::Stimulus s;
        s.label = "n";
        s.samples = random_signal(rng, length);
        dataset.stimuli.push_back(std::move(s));
    }
    return dataset;
}

// Builds a PairSet directly from amplitude/class arrays; class ids are used
// as single-neuron pattern symbols.
inline popcode::PairSet pair_set(const std::vector<double>& amplitudes,
                                 const std::vector<std::uint64_t>& symbols) {
    popcode::PairSet pairs;
    pairs.window_length = 1;
    pairs.shifts = {0};
    pairs.neuron_count = 1;
    pairs.amplitudes = amplitudes;
    pairs.patterns = symbols;
    return pairs;
}

}  // namespace fixtures
