// Discrete-time leaky integrate-and-fire encoding and threshold calibration.
//
// The membrane update is v <- v * decay + x[n]; a spike is recorded at index
// n when the updated potential reaches the threshold, after which v resets to
// zero (the resting potential). There is no refractory period.
#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "popcode/signal.hpp"

namespace popcode {

struct LifParams {
    double threshold = 1.0;  // > 0
    double decay = 0.5;      // in (0,1)

    bool operator==(const LifParams&) const = default;
};

inline void validate_lif_params(const LifParams& params) {
    if (!(params.threshold > 0.0)) {
        throw std::invalid_argument("lif: threshold must be positive");
    }
    if (!(params.decay > 0.0 && params.decay < 1.0)) {
        throw std::invalid_argument("lif: decay must be in (0,1)");
    }
}

// Ordered per-neuron encoder parameters plus the per-neuron latency shift
// found during tuning (see patterns.hpp for shift semantics).
struct PopulationConfig {
    std::vector<LifParams> neurons;
    std::vector<int> shifts;

    std::size_t size() const { return neurons.size(); }

    bool operator==(const PopulationConfig&) const = default;
};

inline void validate_population(const PopulationConfig& config) {
    if (config.neurons.empty()) {
        throw std::invalid_argument("population: needs at least one neuron");
    }
    if (config.shifts.size() != config.neurons.size()) {
        throw std::invalid_argument("population: shifts must match neuron count");
    }
    for (const auto& p : config.neurons) validate_lif_params(p);
    for (int s : config.shifts) {
        if (s < 0) throw std::invalid_argument("population: shifts must be non-negative");
    }
}

inline SpikeTrain lif_encode(const Stimulus& stimulus, const LifParams& params) {
    validate_lif_params(params);
    SpikeTrain train;
    train.bits.resize(stimulus.samples.size(), 0);
    double v = 0.0;
    for (std::size_t n = 0; n < stimulus.samples.size(); ++n) {
        v = v * params.decay + stimulus.samples[n];
        if (v >= params.threshold) {
            train.bits[n] = 1;
            v = 0.0;
        }
    }
    return train;
}

inline std::vector<SpikeTrain> encode_stimulus(const Stimulus& stimulus,
                                               const PopulationConfig& config) {
    std::vector<SpikeTrain> trains;
    trains.reserve(config.neurons.size());
    for (const auto& p : config.neurons) trains.push_back(lif_encode(stimulus, p));
    return trains;
}

// One vector of trains per stimulus, in neuron order.
inline std::vector<std::vector<SpikeTrain>> encode_population(
    const Dataset& dataset, const PopulationConfig& config) {
    validate_population(config);
    std::vector<std::vector<SpikeTrain>> out;
    out.reserve(dataset.size());
    for (const auto& s : dataset.stimuli) out.push_back(encode_stimulus(s, config));
    return out;
}

struct ThresholdBounds {
    double lo = 0.0;
    double hi = 0.0;
};

// [eps, S_max / (1 - decay)]: the upper end is the geometric bound on the
// membrane potential, so it brackets every achievable density for signals
// with a positive peak.
inline ThresholdBounds default_threshold_bounds(const Dataset& dataset, double decay) {
    double smax = 0.0;
    for (const auto& s : dataset.stimuli) {
        for (double v : s.samples) smax = std::max(smax, v);
    }
    if (smax <= 0.0) return {1e-9, 1.0};  // nothing can fire; any bracket works
    return {smax * 1e-9, smax / (1.0 - decay)};
}

struct CalibrationResult {
    LifParams params;
    double achieved_density = 0.0;
    // Set when no threshold inside the bounds reaches the target within
    // tolerance; params then holds the nearest achievable point.
    bool off_target = false;
};

inline constexpr double kCalibrationTolerance = 0.005;
inline constexpr int kCalibrationMaxIterations = 50;

namespace detail {
inline double dataset_density(const Dataset& dataset, const LifParams& params) {
    std::size_t spikes = 0;
    std::size_t samples = 0;
    for (const auto& s : dataset.stimuli) {
        const SpikeTrain t = lif_encode(s, params);
        spikes += t.spike_count();
        samples += t.size();
    }
    return static_cast<double>(spikes) / static_cast<double>(samples);
}
}  // namespace detail

// Bisection on the threshold; density is non-increasing in the threshold for
// non-negative signals, so the bracket contracts toward the target.
inline CalibrationResult calibrate_threshold(const Dataset& dataset, double target_density,
                                             double decay, ThresholdBounds bounds) {
    validate_dataset(dataset);
    if (!(target_density > 0.0 && target_density < 1.0)) {
        throw std::invalid_argument("calibrate_threshold: target density must be in (0,1)");
    }
    if (!(bounds.lo > 0.0 && bounds.hi > bounds.lo)) {
        throw std::invalid_argument("calibrate_threshold: invalid search bounds");
    }
    double lo = bounds.lo;
    double hi = bounds.hi;
    double best_theta = lo;
    double best_density = detail::dataset_density(dataset, {lo, decay});
    const double hi_density = detail::dataset_density(dataset, {hi, decay});
    if (std::abs(hi_density - target_density) < std::abs(best_density - target_density)) {
        best_theta = hi;
        best_density = hi_density;
    }
    for (int i = 0; i < kCalibrationMaxIterations; ++i) {
        if (std::abs(best_density - target_density) <= kCalibrationTolerance) break;
        const double mid = 0.5 * (lo + hi);
        const double d = detail::dataset_density(dataset, {mid, decay});
        if (std::abs(d - target_density) < std::abs(best_density - target_density)) {
            best_theta = mid;
            best_density = d;
        }
        if (d > target_density) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return {{best_theta, decay},
            best_density,
            std::abs(best_density - target_density) > kCalibrationTolerance};
}

inline CalibrationResult calibrate_threshold(const Dataset& dataset, double target_density,
                                             double decay = 0.5) {
    return calibrate_threshold(dataset, target_density, decay,
                               default_threshold_bounds(dataset, decay));
}

}  // namespace popcode
