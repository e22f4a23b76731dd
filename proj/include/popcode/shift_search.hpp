// Latency shift search: pick the train shift that maximizes the extrapolated
// mutual information of a single neuron's windowed patterns.
#pragma once

#include <vector>

#include "popcode/infotheory.hpp"

namespace popcode {

struct ShiftSearchResult {
    int shift = 0;
    MiEstimate estimate;
};

// Evaluates shifts 0..max_shift and returns the argmax; exact ties resolve
// toward the smaller shift.
inline ShiftSearchResult best_shift(const Dataset& stimuli,
                                    const std::vector<SpikeTrain>& trains,
                                    const std::vector<int>& window_set, int max_shift,
                                    int k, std::size_t stride = 1,
                                    std::size_t sample_cap = kDefaultSampleCap) {
    if (max_shift < 0) throw std::invalid_argument("best_shift: max_shift must be >= 0");
    std::vector<std::vector<SpikeTrain>> per_stimulus;
    per_stimulus.reserve(trains.size());
    for (const auto& t : trains) per_stimulus.push_back({t});

    ShiftSearchResult best;
    bool first = true;
    for (int shift = 0; shift <= max_shift; ++shift) {
        MiEstimate estimate =
            mi_windowed(stimuli, per_stimulus, window_set, {shift}, k, stride, sample_cap);
        if (first || estimate.bits > best.estimate.bits) {
            best.shift = shift;
            best.estimate = std::move(estimate);
            first = false;
        }
    }
    return best;
}

}  // namespace popcode
