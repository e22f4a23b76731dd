// Batch front end: run configuration, the five subcommand bodies, and report
// persistence. The thin argument parser lives in tools/.
#pragma once

#include <filesystem>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "popcode/builder.hpp"
#include "popcode/io.hpp"

namespace popcode {

struct RunConfig {
    std::string dataset_path;
    std::string out_path;
    std::string report_path;  // tune report: input for `report`, population source otherwise
    std::string objective = "mi";  // mi | accuracy | random-baseline
    BuilderConfig builder;
    EvalConfig eval;
    bool run_eval = true;
    int trials = 5;  // random-baseline draws
    bool normalize = false;
    std::vector<double> thresholds;  // inline population, one per neuron
    std::vector<int> shifts;         // inline population; defaults to zeros
    std::string features_out;        // classify: optional feature CSV
};

namespace detail {

inline Dataset load_input_dataset(const RunConfig& config) {
    if (config.dataset_path.empty()) throw std::invalid_argument("missing --dataset");
    Dataset dataset = load_dataset(config.dataset_path);
    validate_dataset(dataset);
    return config.normalize ? min_max_normalize(dataset) : dataset;
}

inline PopulationConfig population_from_config(const RunConfig& config) {
    if (!config.report_path.empty()) {
        std::ifstream in(config.report_path);
        if (!in) throw std::runtime_error("cannot open report " + config.report_path);
        const auto doc = nlohmann::json::parse(in);
        PopulationConfig population = doc.at("final_config").get<PopulationConfig>();
        validate_population(population);
        return population;
    }
    if (config.thresholds.empty()) {
        throw std::invalid_argument("no population: provide --thresholds or --report");
    }
    PopulationConfig population;
    for (double t : config.thresholds) {
        population.neurons.push_back({t, config.builder.decay});
    }
    population.shifts = config.shifts.empty() ? std::vector<int>(config.thresholds.size(), 0)
                                              : config.shifts;
    validate_population(population);
    return population;
}

inline nlohmann::json config_echo(const RunConfig& config) {
    nlohmann::json j;
    j["dataset"] = config.dataset_path;
    j["normalize"] = config.normalize;
    j["seed"] = config.builder.seed;
    j["builder"] = {{"density_grid", config.builder.density_grid},
                    {"max_neurons", config.builder.max_neurons},
                    {"min_relative_gain", config.builder.min_relative_gain},
                    {"window_set", config.builder.window_set},
                    {"k", config.builder.k},
                    {"stride", config.builder.stride},
                    {"sample_cap", config.builder.sample_cap},
                    {"max_shift", config.builder.max_shift},
                    {"decay", config.builder.decay},
                    {"estimation_subset_size", config.builder.estimation_subset_size}};
    if (config.run_eval) {
        j["eval"] = {{"bins", config.eval.bins},
                     {"overlap", config.eval.overlap},
                     {"neighbors", config.eval.neighbors},
                     {"train_fraction", config.eval.train_fraction}};
    }
    return j;
}

inline double mean_accuracy_over_splits(const Dataset& dataset,
                                        const PopulationConfig& population,
                                        const RunConfig& config,
                                        std::vector<double>* per_seed = nullptr) {
    double total = 0.0;
    for (int s = 0; s < kEvalSplitAverages; ++s) {
        EvalConfig eval = config.eval;
        eval.seed = derive_seed(config.builder.seed, "eval-split",
                                static_cast<std::uint64_t>(s));
        const double accuracy = evaluate_pipeline(dataset, population, eval).accuracy;
        if (per_seed) per_seed->push_back(accuracy);
        total += accuracy;
    }
    return total / kEvalSplitAverages;
}

}  // namespace detail

// Encodes the dataset with the given population and writes the spike-train
// JSON-lines file.
inline void cmd_encode(const RunConfig& config) {
    if (config.out_path.empty()) throw std::invalid_argument("missing --out");
    const Dataset dataset = detail::load_input_dataset(config);
    const PopulationConfig population = detail::population_from_config(config);
    const auto trains = encode_population(dataset, population);
    write_file_atomic(config.out_path, spike_trains_to_json_lines(dataset, trains));
}

// Runs the selected tuning objective and writes the JSON report.
inline void cmd_tune(const RunConfig& config) {
    if (config.out_path.empty()) throw std::invalid_argument("missing --out");
    const Dataset dataset = detail::load_input_dataset(config);

    nlohmann::json doc = detail::config_echo(config);
    doc["objective"] = config.objective;
    if (config.objective == "mi") {
        const TuneReport report = build_population(dataset, config.builder);
        doc["iterations"] = report.iterations;
        doc["final_config"] = report.final_config;
        if (config.run_eval) {
            nlohmann::json by_size = nlohmann::json::array();
            PopulationConfig prefix;
            for (std::size_t m = 0; m < report.iterations.size(); ++m) {
                prefix.neurons.push_back(report.final_config.neurons[m]);
                prefix.shifts.push_back(report.final_config.shifts[m]);
                std::vector<double> per_seed;
                const double mean =
                    detail::mean_accuracy_over_splits(dataset, prefix, config, &per_seed);
                by_size.push_back({{"neurons", m + 1},
                                   {"joint_mi_bits", report.iterations[m].best_joint_mi},
                                   {"mean_accuracy", mean},
                                   {"per_seed_accuracy", per_seed}});
            }
            doc["accuracy_by_size"] = by_size;
        }
    } else if (config.objective == "accuracy") {
        const ExhaustiveResult result =
            exhaustive_search(dataset, config.builder, config.builder.max_neurons,
                              SearchObjective::kAccuracy, config.eval);
        doc["final_config"] = result.config;
        doc["best"] = {{"densities", result.densities},
                       {"joint_mi_bits", result.joint_mi_bits},
                       {"accuracy", result.accuracy}};
        nlohmann::json combos = nlohmann::json::array();
        for (const auto& r : result.evaluations) {
            combos.push_back({{"densities", r.densities},
                              {"joint_mi_bits", r.joint_mi_bits},
                              {"accuracy", r.accuracy}});
        }
        doc["combinations"] = combos;
    } else if (config.objective == "random-baseline") {
        const auto trials =
            random_baseline(dataset, config.builder, config.builder.max_neurons,
                            config.trials, config.run_eval, config.eval);
        nlohmann::json out = nlohmann::json::array();
        for (const auto& t : trials) {
            nlohmann::json j = {{"densities", t.densities},
                                {"config", t.config},
                                {"joint_mi_bits", t.joint_mi_bits}};
            if (t.has_accuracy) j["accuracy"] = t.accuracy;
            out.push_back(std::move(j));
        }
        doc["random_trials"] = out;
    } else {
        throw std::invalid_argument("unknown objective '" + config.objective + "'");
    }
    write_file_atomic(config.out_path, doc.dump(2) + "\n");
}

namespace detail {

inline std::string densities_header(std::size_t count) {
    std::string header;
    for (std::size_t i = 0; i < count; ++i) {
        header += "density_" + std::to_string(i + 1) + ",";
    }
    return header;
}

}  // namespace detail

// Projects a tune report into plottable CSV tables under the output
// directory: one information curve per iteration plus a population-size
// summary row per iteration.
inline void cmd_report(const RunConfig& config) {
    if (config.report_path.empty()) throw std::invalid_argument("missing --report");
    if (config.out_path.empty()) throw std::invalid_argument("missing --out");
    std::ifstream in(config.report_path);
    if (!in) throw std::runtime_error("cannot open report " + config.report_path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed report " + config.report_path + ": " + e.what());
    }
    std::filesystem::create_directories(config.out_path);
    const std::filesystem::path out_dir = config.out_path;

    std::vector<std::pair<std::filesystem::path, std::string>> files;
    if (doc.contains("iterations")) {
        const auto iterations = doc["iterations"].get<std::vector<IterationRecord>>();
        for (std::size_t m = 0; m < iterations.size(); ++m) {
            std::ostringstream csv;
            csv << "grid_density,achieved_density,joint_mi_bits\n";
            for (const auto& p : iterations[m].mi_curve) {
                csv << format_number(p.grid_density) << ','
                    << format_number(p.achieved_density) << ','
                    << format_number(p.joint_mi_bits) << '\n';
            }
            files.emplace_back(out_dir / ("curve_m" + std::to_string(m + 1) + ".csv"),
                               csv.str());
        }
        std::ostringstream summary;
        summary << "neurons,joint_mi_bits,accuracy\n";
        for (std::size_t m = 0; m < iterations.size(); ++m) {
            summary << (m + 1) << ',' << format_number(iterations[m].best_joint_mi) << ',';
            if (doc.contains("accuracy_by_size") && m < doc["accuracy_by_size"].size()) {
                summary << format_number(
                    doc["accuracy_by_size"][m]["mean_accuracy"].get<double>());
            }
            summary << '\n';
        }
        files.emplace_back(out_dir / "summary.csv", summary.str());
    }
    if (doc.contains("random_trials")) {
        const auto& trials = doc["random_trials"];
        std::ostringstream csv;
        const std::size_t m = trials.empty() ? 0 : trials[0]["densities"].size();
        csv << "trial," << detail::densities_header(m) << "joint_mi_bits,accuracy\n";
        for (std::size_t t = 0; t < trials.size(); ++t) {
            csv << (t + 1) << ',';
            for (const auto& d : trials[t]["densities"]) {
                csv << format_number(d.get<double>()) << ',';
            }
            csv << format_number(trials[t]["joint_mi_bits"].get<double>()) << ',';
            if (trials[t].contains("accuracy")) {
                csv << format_number(trials[t]["accuracy"].get<double>());
            }
            csv << '\n';
        }
        files.emplace_back(out_dir / "trials.csv", csv.str());
    }
    if (doc.contains("combinations")) {
        const auto& combos = doc["combinations"];
        std::ostringstream csv;
        const std::size_t m = combos.empty() ? 0 : combos[0]["densities"].size();
        csv << detail::densities_header(m) << "joint_mi_bits,accuracy\n";
        for (const auto& r : combos) {
            for (const auto& d : r["densities"]) csv << format_number(d.get<double>()) << ',';
            csv << format_number(r["joint_mi_bits"].get<double>()) << ','
                << format_number(r["accuracy"].get<double>()) << '\n';
        }
        files.emplace_back(out_dir / "combinations.csv", csv.str());
        std::ostringstream best;
        best << detail::densities_header(m) << "joint_mi_bits,accuracy\n";
        for (const auto& d : doc["best"]["densities"]) {
            best << format_number(d.get<double>()) << ',';
        }
        best << format_number(doc["best"]["joint_mi_bits"].get<double>()) << ','
             << format_number(doc["best"]["accuracy"].get<double>()) << '\n';
        files.emplace_back(out_dir / "best.csv", best.str());
    }
    if (files.empty()) {
        throw std::runtime_error("malformed report " + config.report_path +
                                 ": no iterations, trials, or combinations");
    }
    for (const auto& [path, content] : files) write_file_atomic(path, content);
}

// One-shot extrapolated MI estimate of a fixed population on the dataset's
// estimation subset; returns the JSON document it writes.
inline std::string cmd_mi(const RunConfig& config) {
    const Dataset dataset = detail::load_input_dataset(config);
    const PopulationConfig population = detail::population_from_config(config);
    const Dataset subset = sample_estimation_subset(dataset, config.builder);
    const auto trains = encode_population(subset, population);
    const MiEstimate estimate =
        mi_windowed(subset, trains, config.builder.window_set, population.shifts,
                    config.builder.k, config.builder.stride, config.builder.sample_cap);
    nlohmann::json doc;
    doc["population"] = population;
    doc["estimate"] = estimate;
    doc["subset_size"] = subset.size();
    // human-facing summary value: estimator noise below zero reads as zero
    doc["mi_bits"] = std::max(0.0, estimate.bits);
    const std::string text = doc.dump(2) + "\n";
    if (!config.out_path.empty()) write_file_atomic(config.out_path, text);
    return text;
}

// One-shot classification run with a fixed population; returns the JSON
// document it writes.
inline std::string cmd_classify(const RunConfig& config) {
    const Dataset dataset = detail::load_input_dataset(config);
    const PopulationConfig population = detail::population_from_config(config);
    EvalConfig eval = config.eval;
    eval.seed = derive_seed(config.builder.seed, "eval-split", 0);
    const EvalResult result = evaluate_pipeline(dataset, population, eval);
    if (!config.features_out.empty()) {
        const auto trains = encode_population(dataset, population);
        std::vector<FeatureVector> features;
        features.reserve(dataset.size());
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            features.push_back(extract_features(trains[i], dataset.stimuli[i].label,
                                                config.eval.bins, config.eval.overlap));
        }
        write_file_atomic(config.features_out, features_to_csv(features));
    }
    nlohmann::json doc;
    doc["population"] = population;
    doc["result"] = result;
    const std::string text = doc.dump(2) + "\n";
    if (!config.out_path.empty()) write_file_atomic(config.out_path, text);
    return text;
}

}  // namespace popcode
