// Greedy information-maximization over a spike-density grid: each iteration
// adds one neuron, tuned so the joint windowed-pattern information of the
// population is maximal given every previously fixed neuron.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "popcode/eval.hpp"
#include "popcode/parallel.hpp"
#include "popcode/rng.hpp"
#include "popcode/shift_search.hpp"

namespace popcode {

inline std::vector<double> default_density_grid() {
    std::vector<double> grid;
    for (int i = 1; i <= 19; ++i) grid.push_back(i * 0.05);
    return grid;
}

struct BuilderConfig {
    std::vector<double> density_grid = default_density_grid();
    int max_neurons = 1;
    double min_relative_gain = 0.0;  // 0 disables the gain-based stop
    std::vector<int> window_set = {2, 4, 8, 16, 32};
    int k = 3;
    std::size_t stride = 1;
    std::size_t sample_cap = kDefaultSampleCap;
    int max_shift = 20;
    double decay = 0.5;
    std::size_t estimation_subset_size = 260;  // 0 = use the whole dataset
    std::uint64_t seed = 0;
    int workers = 0;  // 0 = hardware concurrency
};

inline void validate_builder_config(const BuilderConfig& config) {
    if (config.density_grid.empty()) {
        throw std::invalid_argument("builder: density grid must not be empty");
    }
    double prev = 0.0;
    for (double d : config.density_grid) {
        if (!(d > 0.0 && d < 1.0)) {
            throw std::invalid_argument("builder: grid densities must be in (0,1)");
        }
        if (d <= prev && prev != 0.0) {
            throw std::invalid_argument("builder: density grid must be strictly increasing");
        }
        prev = d;
    }
    if (config.max_neurons < 1) throw std::invalid_argument("builder: max_neurons must be >= 1");
    if (config.max_shift < 0) throw std::invalid_argument("builder: max_shift must be >= 0");
}

struct GridPoint {
    double grid_density = 0.0;
    double achieved_density = 0.0;
    double joint_mi_bits = 0.0;
};

struct IterationRecord {
    double chosen_density = 0.0;     // grid target
    double achieved_density = 0.0;   // density reached by calibration
    double chosen_threshold = 0.0;
    int chosen_shift = 0;
    double best_joint_mi = 0.0;
    std::vector<GridPoint> mi_curve;
};

struct TuneReport {
    std::vector<IterationRecord> iterations;
    PopulationConfig final_config;
};

// The stimuli used for every MI estimate of a build, drawn once from the
// top-level seed and identical across iterations and grid points.
inline Dataset sample_estimation_subset(const Dataset& dataset, const BuilderConfig& config) {
    validate_dataset(dataset);
    if (config.estimation_subset_size == 0 ||
        config.estimation_subset_size >= dataset.size()) {
        return dataset;
    }
    std::mt19937_64 rng(derive_seed(config.seed, "estimation-subset"));
    const auto indices =
        sample_without_replacement(dataset.size(), config.estimation_subset_size, rng);
    Dataset subset;
    subset.stimuli.reserve(indices.size());
    for (std::size_t i : indices) subset.stimuli.push_back(dataset.stimuli[i]);
    return subset;
}

namespace detail {

// Everything a grid density determines on its own: calibrated parameters,
// the subset's trains, and the solo-MI latency shift. Identical across
// iterations, so build_population computes it once per density.
struct Candidate {
    double grid_density = 0.0;
    CalibrationResult calibration;
    std::vector<SpikeTrain> trains;  // one per subset stimulus
    ShiftSearchResult shift;
};

inline std::vector<Candidate> evaluate_candidates(const Dataset& subset,
                                                  const BuilderConfig& config) {
    std::vector<Candidate> candidates(config.density_grid.size());
    const auto bounds = default_threshold_bounds(subset, config.decay);
    parallel_for_index(config.density_grid.size(), config.workers, [&](std::size_t g) {
        Candidate& c = candidates[g];
        c.grid_density = config.density_grid[g];
        c.calibration = calibrate_threshold(subset, c.grid_density, config.decay, bounds);
        c.trains.reserve(subset.size());
        for (const auto& s : subset.stimuli) {
            c.trains.push_back(lif_encode(s, c.calibration.params));
        }
        c.shift = best_shift(subset, c.trains, config.window_set, config.max_shift,
                             config.k, config.stride, config.sample_cap);
    });
    return candidates;
}

// prior_trains empty: first-neuron case, the candidate's solo estimate is the
// objective. Otherwise the candidate is appended to the fixed trains and the
// joint estimate decides. Ties resolve toward the lower grid density.
inline IterationRecord run_iteration(const Dataset& subset,
                                     const std::vector<Candidate>& candidates,
                                     const std::vector<std::vector<SpikeTrain>>& prior_trains,
                                     const std::vector<int>& fixed_shifts,
                                     const BuilderConfig& config) {
    std::vector<GridPoint> curve(candidates.size());
    parallel_for_index(candidates.size(), config.workers, [&](std::size_t g) {
        const Candidate& c = candidates[g];
        double joint_bits = 0.0;
        if (prior_trains.empty()) {
            joint_bits = c.shift.estimate.bits;
        } else {
            std::vector<std::vector<SpikeTrain>> joined = prior_trains;
            for (std::size_t i = 0; i < joined.size(); ++i) {
                joined[i].push_back(c.trains[i]);
            }
            std::vector<int> shifts = fixed_shifts;
            shifts.push_back(c.shift.shift);
            joint_bits = mi_windowed(subset, joined, config.window_set, shifts, config.k,
                                     config.stride, config.sample_cap)
                             .bits;
        }
        curve[g] = {c.grid_density, c.calibration.achieved_density, joint_bits};
    });

    std::size_t best = 0;
    for (std::size_t g = 1; g < curve.size(); ++g) {
        if (curve[g].joint_mi_bits > curve[best].joint_mi_bits) best = g;
    }
    IterationRecord record;
    record.chosen_density = curve[best].grid_density;
    record.achieved_density = curve[best].achieved_density;
    record.chosen_threshold = candidates[best].calibration.params.threshold;
    record.chosen_shift = candidates[best].shift.shift;
    record.best_joint_mi = curve[best].joint_mi_bits;
    record.mi_curve = std::move(curve);
    return record;
}

inline std::size_t candidate_index(const std::vector<Candidate>& candidates,
                                   double grid_density) {
    for (std::size_t g = 0; g < candidates.size(); ++g) {
        if (candidates[g].grid_density == grid_density) return g;
    }
    throw std::logic_error("builder: chosen density missing from grid");
}

}  // namespace detail

inline IterationRecord tune_first_neuron(const Dataset& dataset, const BuilderConfig& config) {
    validate_builder_config(config);
    const Dataset subset = sample_estimation_subset(dataset, config);
    const auto candidates = detail::evaluate_candidates(subset, config);
    return detail::run_iteration(subset, candidates, {}, {}, config);
}

// prior_trains must hold the fixed neurons' trains for the estimation subset
// of `dataset` under this config (stimulus-major, neuron-minor), as produced
// by a previous iteration.
inline IterationRecord add_neuron(const Dataset& dataset, const PopulationConfig& fixed,
                                  const std::vector<std::vector<SpikeTrain>>& prior_trains,
                                  const BuilderConfig& config) {
    validate_builder_config(config);
    validate_population(fixed);
    const Dataset subset = sample_estimation_subset(dataset, config);
    if (prior_trains.size() != subset.size()) {
        throw std::invalid_argument("add_neuron: prior trains must cover the estimation subset");
    }
    const auto candidates = detail::evaluate_candidates(subset, config);
    return detail::run_iteration(subset, candidates, prior_trains, fixed.shifts, config);
}

// The full recursion: tune the first neuron, then keep adding neurons, each
// maximizing the joint information given the frozen prefix, until max_neurons
// is reached or the relative gain drops below min_relative_gain (that final
// below-threshold neuron is discarded).
inline TuneReport build_population(const Dataset& dataset, const BuilderConfig& config) {
    validate_builder_config(config);
    const Dataset subset = sample_estimation_subset(dataset, config);
    const auto candidates = detail::evaluate_candidates(subset, config);

    TuneReport report;
    std::vector<std::vector<SpikeTrain>> prior(subset.size());
    for (int iteration = 0; iteration < config.max_neurons; ++iteration) {
        IterationRecord record = detail::run_iteration(
            subset, candidates, iteration == 0 ? std::vector<std::vector<SpikeTrain>>{} : prior,
            report.final_config.shifts, config);
        if (iteration > 0 && config.min_relative_gain > 0.0) {
            const double prev = report.iterations.back().best_joint_mi;
            const double gain = prev > 0.0 ? (record.best_joint_mi - prev) / prev : 1.0;
            if (gain < config.min_relative_gain) break;
        }
        const std::size_t g = detail::candidate_index(candidates, record.chosen_density);
        for (std::size_t i = 0; i < subset.size(); ++i) {
            prior[i].push_back(candidates[g].trains[i]);
        }
        report.final_config.neurons.push_back(candidates[g].calibration.params);
        report.final_config.shifts.push_back(record.chosen_shift);
        report.iterations.push_back(std::move(record));
    }
    return report;
}

inline constexpr std::size_t kExhaustiveBudget = 10000;
inline constexpr int kEvalSplitAverages = 5;

enum class SearchObjective {
    kJointMi,
    kAccuracy,
};

struct CombinationRecord {
    std::vector<double> densities;
    double joint_mi_bits = 0.0;
    double accuracy = 0.0;  // mean over derived split seeds, when evaluated
    bool has_accuracy = false;
};

struct ExhaustiveResult {
    PopulationConfig config;
    std::vector<double> densities;
    double joint_mi_bits = 0.0;
    double accuracy = 0.0;
    bool has_accuracy = false;
    std::vector<CombinationRecord> evaluations;
};

namespace detail {

inline CombinationRecord evaluate_combination(const Dataset& dataset, const Dataset& subset,
                                              const std::vector<Candidate>& candidates,
                                              const std::vector<std::size_t>& combo,
                                              const BuilderConfig& config, bool with_accuracy,
                                              const EvalConfig& eval) {
    CombinationRecord record;
    std::vector<std::vector<SpikeTrain>> joined(subset.size());
    std::vector<int> shifts;
    PopulationConfig population;
    for (std::size_t g : combo) {
        const Candidate& c = candidates[g];
        record.densities.push_back(c.grid_density);
        for (std::size_t i = 0; i < subset.size(); ++i) joined[i].push_back(c.trains[i]);
        shifts.push_back(c.shift.shift);
        population.neurons.push_back(c.calibration.params);
        population.shifts.push_back(c.shift.shift);
    }
    record.joint_mi_bits = mi_windowed(subset, joined, config.window_set, shifts,
                                       config.k, config.stride, config.sample_cap)
                               .bits;
    if (with_accuracy) {
        double total = 0.0;
        for (int s = 0; s < kEvalSplitAverages; ++s) {
            EvalConfig cfg = eval;
            cfg.seed = derive_seed(config.seed, "eval-split", static_cast<std::uint64_t>(s));
            total += evaluate_pipeline(dataset, population, cfg).accuracy;
        }
        record.accuracy = total / kEvalSplitAverages;
        record.has_accuracy = true;
    }
    return record;
}

inline PopulationConfig combination_population(const std::vector<Candidate>& candidates,
                                               const std::vector<std::size_t>& combo) {
    PopulationConfig population;
    for (std::size_t g : combo) {
        population.neurons.push_back(candidates[g].calibration.params);
        population.shifts.push_back(candidates[g].shift.shift);
    }
    return population;
}

}  // namespace detail

// Evaluates every density combination of `neuron_count` neurons (grid^m, the
// comparison baseline for the greedy search) and returns the argmax of the
// chosen objective. Ties resolve toward the lexicographically smallest
// density tuple.
inline ExhaustiveResult exhaustive_search(const Dataset& dataset, const BuilderConfig& config,
                                          int neuron_count,
                                          SearchObjective objective = SearchObjective::kJointMi,
                                          const EvalConfig& eval = {}) {
    validate_builder_config(config);
    if (neuron_count < 1) throw std::invalid_argument("exhaustive_search: neuron count >= 1");
    std::size_t combinations = 1;
    for (int i = 0; i < neuron_count; ++i) {
        combinations *= config.density_grid.size();
        if (combinations > kExhaustiveBudget) {
            throw std::invalid_argument("exhaustive_search: combination budget exceeded (" +
                                        std::to_string(kExhaustiveBudget) + ")");
        }
    }
    const Dataset subset = sample_estimation_subset(dataset, config);
    const auto candidates = detail::evaluate_candidates(subset, config);
    const bool with_accuracy = objective == SearchObjective::kAccuracy;

    std::vector<CombinationRecord> records(combinations);
    parallel_for_index(combinations, config.workers, [&](std::size_t index) {
        std::vector<std::size_t> combo(static_cast<std::size_t>(neuron_count));
        std::size_t rest = index;
        for (int d = neuron_count - 1; d >= 0; --d) {
            combo[static_cast<std::size_t>(d)] = rest % config.density_grid.size();
            rest /= config.density_grid.size();
        }
        records[index] = detail::evaluate_combination(dataset, subset, candidates, combo,
                                                      config, with_accuracy, eval);
    });

    std::size_t best = 0;
    for (std::size_t i = 1; i < records.size(); ++i) {
        const double lhs = with_accuracy ? records[i].accuracy : records[i].joint_mi_bits;
        const double rhs = with_accuracy ? records[best].accuracy : records[best].joint_mi_bits;
        if (lhs > rhs) best = i;
    }

    ExhaustiveResult result;
    std::vector<std::size_t> combo(static_cast<std::size_t>(neuron_count));
    std::size_t rest = best;
    for (int d = neuron_count - 1; d >= 0; --d) {
        combo[static_cast<std::size_t>(d)] = rest % config.density_grid.size();
        rest /= config.density_grid.size();
    }
    result.config = detail::combination_population(candidates, combo);
    result.densities = records[best].densities;
    result.joint_mi_bits = records[best].joint_mi_bits;
    result.accuracy = records[best].accuracy;
    result.has_accuracy = records[best].has_accuracy;
    result.evaluations = std::move(records);
    return result;
}

struct RandomTrial {
    PopulationConfig config;
    std::vector<double> densities;
    double joint_mi_bits = 0.0;
    double accuracy = 0.0;
    bool has_accuracy = false;
};

// Baseline: draw density tuples uniformly from the grid and evaluate them the
// same way the searches do.
inline std::vector<RandomTrial> random_baseline(const Dataset& dataset,
                                                const BuilderConfig& config, int neuron_count,
                                                int trials, bool with_accuracy = false,
                                                const EvalConfig& eval = {}) {
    validate_builder_config(config);
    if (neuron_count < 1 || trials < 1) {
        throw std::invalid_argument("random_baseline: neuron count and trials must be >= 1");
    }
    const Dataset subset = sample_estimation_subset(dataset, config);
    const auto candidates = detail::evaluate_candidates(subset, config);
    std::mt19937_64 rng(derive_seed(config.seed, "random-baseline"));
    std::vector<RandomTrial> result;
    result.reserve(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) {
        std::vector<std::size_t> combo;
        combo.reserve(static_cast<std::size_t>(neuron_count));
        for (int d = 0; d < neuron_count; ++d) {
            combo.push_back(uniform_index(rng, candidates.size()));
        }
        const CombinationRecord record = detail::evaluate_combination(
            dataset, subset, candidates, combo, config, with_accuracy, eval);
        RandomTrial trial;
        trial.config = detail::combination_population(candidates, combo);
        trial.densities = record.densities;
        trial.joint_mi_bits = record.joint_mi_bits;
        trial.accuracy = record.accuracy;
        trial.has_accuracy = record.has_accuracy;
        result.push_back(std::move(trial));
    }
    return result;
}

}  // namespace popcode
