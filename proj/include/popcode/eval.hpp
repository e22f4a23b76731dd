// Downstream classification harness: spike-count features over overlapping
// bins, stratified splits, and a deterministic nearest-neighbour classifier.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "popcode/lif.hpp"
#include "popcode/rng.hpp"
#include "popcode/signal.hpp"

namespace popcode {

struct FeatureVector {
    std::vector<double> values;  // bins * neurons, each the bin's mean bit
    std::string label;
};

// Bin width w = N / (1 + (B-1)(1-overlap)), hop = w(1-overlap); bin j covers
// [round(j*hop), round(j*hop)+round(w)) clamped to N. Features of all neurons
// are concatenated in neuron order.
inline FeatureVector extract_features(const std::vector<SpikeTrain>& trains,
                                      const std::string& label, int bins,
                                      double overlap) {
    if (bins < 1) throw std::invalid_argument("extract_features: bins must be >= 1");
    if (!(overlap >= 0.0 && overlap < 1.0)) {
        throw std::invalid_argument("extract_features: overlap must be in [0,1)");
    }
    if (trains.empty()) throw std::invalid_argument("extract_features: no trains");
    FeatureVector fv;
    fv.label = label;
    fv.values.reserve(static_cast<std::size_t>(bins) * trains.size());
    for (const auto& train : trains) {
        const std::size_t n = train.size();
        const double width = static_cast<double>(n) / (1.0 + (bins - 1) * (1.0 - overlap));
        const double hop = width * (1.0 - overlap);
        const auto bin_width = static_cast<std::size_t>(std::llround(width));
        if (n < static_cast<std::size_t>(bins) || bin_width == 0 || n < bin_width) {
            throw std::invalid_argument("extract_features: train shorter than one bin");
        }
        for (int j = 0; j < bins; ++j) {
            const auto start = static_cast<std::size_t>(std::llround(j * hop));
            const std::size_t end = std::min(start + bin_width, n);
            if (end <= start) {
                fv.values.push_back(0.0);
                continue;
            }
            std::size_t spikes = 0;
            for (std::size_t i = start; i < end; ++i) spikes += train.bits[i];
            fv.values.push_back(static_cast<double>(spikes) / static_cast<double>(end - start));
        }
    }
    return fv;
}

namespace detail {

// Stratified-by-label index split; classes with one member go to training,
// others keep at least one test member.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
stratified_split_indices(const std::vector<std::string>& labels, double train_fraction,
                         std::uint64_t seed) {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> train, test;
    for (auto& [label, members] : groups) {
        shuffle_in_place(members, rng);
        std::size_t take = members.size();
        if (members.size() > 1) {
            const auto rounded =
                static_cast<std::size_t>(std::llround(train_fraction * members.size()));
            take = std::clamp<std::size_t>(rounded, 1, members.size() - 1);
        }
        train.insert(train.end(), members.begin(), members.begin() + take);
        test.insert(test.end(), members.begin() + take, members.end());
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {std::move(train), std::move(test)};
}

}  // namespace detail

inline std::pair<Dataset, Dataset> split_dataset(const Dataset& dataset,
                                                 double train_fraction,
                                                 std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("split_dataset: train fraction must be in (0,1)");
    }
    if (dataset.size() < 2) {
        throw std::invalid_argument("split_dataset: needs at least two stimuli");
    }
    std::vector<std::string> labels;
    labels.reserve(dataset.size());
    for (const auto& s : dataset.stimuli) labels.push_back(s.label);
    const auto [train_idx, test_idx] =
        detail::stratified_split_indices(labels, train_fraction, seed);
    Dataset train, test;
    for (std::size_t i : train_idx) train.stimuli.push_back(dataset.stimuli[i]);
    for (std::size_t i : test_idx) test.stimuli.push_back(dataset.stimuli[i]);
    return {std::move(train), std::move(test)};
}

struct EvalResult {
    double accuracy = 0.0;
    std::map<std::string, double> per_class_accuracy;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    std::uint64_t seed = 0;
};

// Nearest-neighbour majority vote in Euclidean feature space. Neighbour
// distance ties resolve by training-set order; vote ties by the smallest
// summed distance, then by earliest training index.
inline EvalResult classify(const std::vector<FeatureVector>& train_features,
                           const std::vector<FeatureVector>& test_features,
                           int neighbors) {
    if (neighbors < 1 || static_cast<std::size_t>(neighbors) > train_features.size()) {
        throw std::invalid_argument("classify: neighbors must be in [1, training size]");
    }
    const std::size_t dim = train_features.empty() ? 0 : train_features.front().values.size();
    for (const auto& f : train_features) {
        if (f.values.size() != dim) throw std::invalid_argument("classify: feature length mismatch");
    }
    for (const auto& f : test_features) {
        if (f.values.size() != dim) throw std::invalid_argument("classify: feature length mismatch");
    }

    EvalResult result;
    result.train_size = train_features.size();
    result.test_size = test_features.size();
    std::map<std::string, std::pair<std::size_t, std::size_t>> per_class;  // correct, total

    std::vector<std::pair<double, std::size_t>> ranked(train_features.size());
    for (const auto& query : test_features) {
        for (std::size_t j = 0; j < train_features.size(); ++j) {
            double sq = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                const double diff = query.values[d] - train_features[j].values[d];
                sq += diff * diff;
            }
            ranked[j] = {std::sqrt(sq), j};
        }
        std::sort(ranked.begin(), ranked.end());

        struct Tally {
            std::size_t votes = 0;
            double distance_sum = 0.0;
            std::size_t first_index = 0;
        };
        std::map<std::string, Tally> tallies;
        for (int v = 0; v < neighbors; ++v) {
            const auto& [dist, idx] = ranked[static_cast<std::size_t>(v)];
            auto [it, inserted] = tallies.try_emplace(train_features[idx].label);
            if (inserted) it->second.first_index = idx;
            ++it->second.votes;
            it->second.distance_sum += dist;
        }
        const std::string* winner = nullptr;
        const Tally* best = nullptr;
        for (const auto& [label, tally] : tallies) {
            const bool better =
                best == nullptr || tally.votes > best->votes ||
                (tally.votes == best->votes &&
                 (tally.distance_sum < best->distance_sum ||
                  (tally.distance_sum == best->distance_sum &&
                   tally.first_index < best->first_index)));
            if (better) {
                winner = &label;
                best = &tally;
            }
        }

        auto& [correct, total] = per_class[query.label];
        ++total;
        if (*winner == query.label) {
            ++correct;
        }
    }

    std::size_t correct_total = 0;
    for (const auto& [label, counts] : per_class) {
        result.per_class_accuracy[label] =
            static_cast<double>(counts.first) / static_cast<double>(counts.second);
        correct_total += counts.first;
    }
    result.accuracy = test_features.empty()
                          ? 1.0
                          : static_cast<double>(correct_total) /
                                static_cast<double>(test_features.size());
    return result;
}

struct EvalConfig {
    int bins = 20;
    double overlap = 0.5;
    int neighbors = 5;
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
};

// Encode -> features -> stratified split -> classify.
inline EvalResult evaluate_pipeline(const Dataset& dataset,
                                    const PopulationConfig& population,
                                    const EvalConfig& config) {
    validate_population(population);
    const auto trains = encode_population(dataset, population);
    std::vector<FeatureVector> features;
    features.reserve(dataset.size());
    std::vector<std::string> labels;
    labels.reserve(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        features.push_back(extract_features(trains[i], dataset.stimuli[i].label,
                                            config.bins, config.overlap));
        labels.push_back(dataset.stimuli[i].label);
    }
    const auto [train_idx, test_idx] =
        detail::stratified_split_indices(labels, config.train_fraction, config.seed);
    std::vector<FeatureVector> train, test;
    train.reserve(train_idx.size());
    test.reserve(test_idx.size());
    for (std::size_t i : train_idx) train.push_back(features[i]);
    for (std::size_t i : test_idx) test.push_back(features[i]);
    EvalResult result = classify(train, test, config.neighbors);
    result.seed = config.seed;
    return result;
}

}  // namespace popcode
