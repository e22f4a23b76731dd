// Windowed spike patterns: the discrete random variable paired with each
// amplitude sample for mutual information estimation.
//
// A sample emitted at time index n pairs the amplitude x[n] with, per neuron
// j, the window of train bits over indices [n + shift_j - T + 1, n + shift_j].
// The shift slides the train into the past so that spikes emitted slightly
// after x[n] (encoder latency) line up with it; the window stays causal with
// respect to its own end index. Within a window the most recent sample is the
// least significant bit of the packed symbol.
#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "popcode/lif.hpp"
#include "popcode/signal.hpp"

namespace popcode {

// Largest number of amplitude/pattern pairs kept per extraction; beyond this
// the stride is increased uniformly to bound estimator cost.
inline constexpr std::size_t kDefaultSampleCap = 50000;

inline std::uint64_t pack_window(const SpikeTrain& train, std::size_t end_index,
                                 int window_length) {
    std::uint64_t symbol = 0;
    for (int t = 0; t < window_length; ++t) {
        symbol |= static_cast<std::uint64_t>(train.bits[end_index - t]) << t;
    }
    return symbol;
}

inline std::vector<std::uint8_t> unpack_window(std::uint64_t symbol, int window_length) {
    std::vector<std::uint8_t> bits(window_length);
    for (int t = 0; t < window_length; ++t) {
        // bits in time order, oldest first
        bits[window_length - 1 - t] = static_cast<std::uint8_t>((symbol >> t) & 1u);
    }
    return bits;
}

struct PatternSample {
    double amplitude = 0.0;
    std::vector<std::uint64_t> pattern;  // one packed window per neuron
};

struct PairSet {
    int window_length = 0;
    std::vector<int> shifts;
    std::size_t stride = 1;  // effective stride after the sample cap
    std::size_t neuron_count = 0;
    std::vector<double> amplitudes;
    std::vector<std::uint64_t> patterns;  // row-major, sample * neuron_count

    std::size_t sample_count() const { return amplitudes.size(); }

    PatternSample sample(std::size_t i) const {
        PatternSample s;
        s.amplitude = amplitudes[i];
        s.pattern.assign(patterns.begin() + static_cast<std::ptrdiff_t>(i * neuron_count),
                         patterns.begin() + static_cast<std::ptrdiff_t>((i + 1) * neuron_count));
        return s;
    }
};

namespace detail {

// Valid emission indices per stimulus run n = T-1, T-1+stride, ..., N-1-max_shift.
inline std::size_t windows_per_stimulus(std::size_t length, int window_length,
                                        int max_shift, std::size_t stride) {
    const std::ptrdiff_t span = static_cast<std::ptrdiff_t>(length) - window_length - max_shift;
    if (span < 0) return 0;
    return static_cast<std::size_t>(span) / stride + 1;
}

}  // namespace detail

inline PairSet extract_pairs(const Dataset& stimuli,
                             const std::vector<std::vector<SpikeTrain>>& trains,
                             int window_length, const std::vector<int>& shifts,
                             std::size_t stride = 1,
                             std::size_t sample_cap = kDefaultSampleCap) {
    if (window_length < 1 || window_length > 63) {
        throw std::invalid_argument("extract_pairs: window length must be in [1,63]");
    }
    if (stride < 1) throw std::invalid_argument("extract_pairs: stride must be positive");
    if (shifts.empty()) throw std::invalid_argument("extract_pairs: no neurons");
    for (int s : shifts) {
        if (s < 0) throw std::invalid_argument("extract_pairs: shifts must be non-negative");
    }
    if (trains.size() != stimuli.size()) {
        throw std::invalid_argument("extract_pairs: one train list per stimulus required");
    }
    const int max_shift = *std::max_element(shifts.begin(), shifts.end());

    std::size_t total = 0;
    for (std::size_t i = 0; i < stimuli.size(); ++i) {
        if (trains[i].size() != shifts.size()) {
            throw std::invalid_argument("extract_pairs: one train per neuron required");
        }
        const std::size_t length = stimuli.stimuli[i].samples.size();
        for (const auto& t : trains[i]) {
            if (t.size() != length) {
                throw std::invalid_argument("extract_pairs: train/stimulus length mismatch");
            }
        }
        const std::size_t count =
            detail::windows_per_stimulus(length, window_length, max_shift, stride);
        if (count == 0) {
            throw std::invalid_argument("extract_pairs: stimulus " + std::to_string(i) +
                                        " too short for window length plus shift");
        }
        total += count;
    }

    // Uniform stride increase until the cap holds (one window per stimulus is
    // always kept).
    std::size_t effective_stride = stride;
    if (sample_cap > 0 && total > sample_cap) {
        std::size_t lo = stride, hi = 1;
        for (const auto& s : stimuli.stimuli) hi = std::max(hi, s.samples.size());
        auto total_at = [&](std::size_t str) {
            std::size_t n = 0;
            for (const auto& s : stimuli.stimuli) {
                n += detail::windows_per_stimulus(s.samples.size(), window_length,
                                                  max_shift, str);
            }
            return n;
        };
        while (lo < hi) {
            const std::size_t mid = lo + (hi - lo) / 2;
            if (total_at(mid) > sample_cap) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        effective_stride = lo;
    }

    PairSet out;
    out.window_length = window_length;
    out.shifts = shifts;
    out.stride = effective_stride;
    out.neuron_count = shifts.size();
    for (std::size_t i = 0; i < stimuli.size(); ++i) {
        const auto& samples = stimuli.stimuli[i].samples;
        const std::size_t last = samples.size() - 1 - static_cast<std::size_t>(max_shift);
        for (std::size_t n = static_cast<std::size_t>(window_length - 1); n <= last;
             n += effective_stride) {
            out.amplitudes.push_back(samples[n]);
            for (std::size_t j = 0; j < shifts.size(); ++j) {
                out.patterns.push_back(pack_window(
                    trains[i][j], n + static_cast<std::size_t>(shifts[j]), window_length));
            }
        }
    }
    return out;
}

}  // namespace popcode
