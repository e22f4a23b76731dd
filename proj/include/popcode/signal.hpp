// Core signal and dataset types plus elementary spike-train statistics.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace popcode {

// A labeled time-varying signal x[n].
struct Stimulus {
    std::string label;
    std::vector<double> samples;
    std::optional<double> sample_rate;

    bool operator==(const Stimulus&) const = default;
};

struct Dataset {
    std::vector<Stimulus> stimuli;

    std::size_t size() const { return stimuli.size(); }

    std::set<std::string> class_set() const {
        std::set<std::string> labels;
        for (const auto& s : stimuli) labels.insert(s.label);
        return labels;
    }

    bool operator==(const Dataset&) const = default;
};

// Binary time-sampled output of one neuron for one stimulus; same length as
// the source signal.
struct SpikeTrain {
    std::vector<std::uint8_t> bits;

    std::size_t size() const { return bits.size(); }

    std::size_t spike_count() const {
        return static_cast<std::size_t>(
            std::count(bits.begin(), bits.end(), std::uint8_t{1}));
    }

    bool operator==(const SpikeTrain&) const = default;
};

inline void validate_stimulus(const Stimulus& stimulus) {
    if (stimulus.samples.empty()) {
        throw std::invalid_argument("stimulus '" + stimulus.label + "' has no samples");
    }
    for (double v : stimulus.samples) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("stimulus '" + stimulus.label +
                                        "': non-finite amplitude");
        }
    }
}

inline void validate_dataset(const Dataset& dataset) {
    if (dataset.stimuli.empty()) throw std::invalid_argument("dataset is empty");
    for (const auto& s : dataset.stimuli) validate_stimulus(s);
}

// Fraction of time samples carrying a spike.
inline double spike_density(const SpikeTrain& train) {
    if (train.bits.empty()) throw std::invalid_argument("spike_density: empty train");
    return static_cast<double>(train.spike_count()) / static_cast<double>(train.size());
}

// Spike-count-weighted density over a collection: total spikes over total
// samples, not the per-train mean.
inline double mean_density(const std::vector<SpikeTrain>& trains) {
    if (trains.empty()) throw std::invalid_argument("mean_density: empty collection");
    std::size_t spikes = 0;
    std::size_t samples = 0;
    for (const auto& t : trains) {
        if (t.bits.empty()) throw std::invalid_argument("mean_density: empty train");
        spikes += t.spike_count();
        samples += t.size();
    }
    return static_cast<double>(spikes) / static_cast<double>(samples);
}

// Optional per-stimulus min-max normalization to [0,1]; constant signals map
// to all zeros.
inline Dataset min_max_normalize(const Dataset& dataset) {
    Dataset out = dataset;
    for (auto& s : out.stimuli) {
        if (s.samples.empty()) continue;
        const auto [lo_it, hi_it] = std::minmax_element(s.samples.begin(), s.samples.end());
        const double lo = *lo_it;
        const double span = *hi_it - lo;
        for (double& v : s.samples) v = span > 0.0 ? (v - lo) / span : 0.0;
    }
    return out;
}

}  // namespace popcode
