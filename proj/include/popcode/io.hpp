// File formats: JSON-lines datasets and spike trains, JSON tune reports,
// CSV feature/report tables.
#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "popcode/builder.hpp"
#include "popcode/eval.hpp"
#include "popcode/signal.hpp"

namespace popcode {

enum class DatasetFormat {
    kJsonLines,  // one {"label", "samples", ["sample_rate"]} object per line
};

// Loads a dataset, reporting the offending line number on malformed input.
inline Dataset load_dataset(const std::filesystem::path& path,
                            DatasetFormat format = DatasetFormat::kJsonLines) {
    if (format != DatasetFormat::kJsonLines) {
        throw std::invalid_argument("load_dataset: unsupported format");
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_dataset: cannot open " + path.string());
    Dataset dataset;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = path.string() + ":" + std::to_string(line_number);
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error(where + ": malformed record: " + e.what());
        }
        if (!record.is_object() || !record.contains("label") || !record["label"].is_string()) {
            throw std::runtime_error(where + ": malformed record: missing string 'label'");
        }
        if (!record.contains("samples") || !record["samples"].is_array() ||
            record["samples"].empty()) {
            throw std::runtime_error(where +
                                     ": malformed record: missing non-empty 'samples' array");
        }
        Stimulus stimulus;
        stimulus.label = record["label"].get<std::string>();
        stimulus.samples.reserve(record["samples"].size());
        for (const auto& v : record["samples"]) {
            if (!v.is_number() || !std::isfinite(v.get<double>())) {
                throw std::runtime_error(where + ": non-finite amplitude");
            }
            stimulus.samples.push_back(v.get<double>());
        }
        if (record.contains("sample_rate")) {
            if (!record["sample_rate"].is_number()) {
                throw std::runtime_error(where + ": malformed record: 'sample_rate' not a number");
            }
            stimulus.sample_rate = record["sample_rate"].get<double>();
        }
        dataset.stimuli.push_back(std::move(stimulus));
    }
    if (dataset.stimuli.empty()) {
        throw std::runtime_error("load_dataset: " + path.string() + ": empty dataset file");
    }
    return dataset;
}

// Writes content to a temporary sibling and renames it into place, so readers
// never observe a partial file and failures leave no output behind.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) {
            out.close();
            std::filesystem::remove(tmp);
            throw std::runtime_error("failed writing " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

inline std::string dataset_to_json_lines(const Dataset& dataset) {
    std::string out;
    for (const auto& s : dataset.stimuli) {
        nlohmann::json record;
        record["label"] = s.label;
        record["samples"] = s.samples;
        if (s.sample_rate) record["sample_rate"] = *s.sample_rate;
        out += record.dump();
        out += '\n';
    }
    return out;
}

inline void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
    write_file_atomic(path, dataset_to_json_lines(dataset));
}

// Spike-train records in stimulus-major, neuron-minor order.
inline std::string spike_trains_to_json_lines(
    const Dataset& dataset, const std::vector<std::vector<SpikeTrain>>& trains) {
    std::string out;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        for (std::size_t j = 0; j < trains[i].size(); ++j) {
            std::vector<std::size_t> spike_indices;
            for (std::size_t n = 0; n < trains[i][j].size(); ++n) {
                if (trains[i][j].bits[n]) spike_indices.push_back(n);
            }
            nlohmann::json record;
            record["label"] = dataset.stimuli[i].label;
            record["neuron_index"] = j;
            record["spike_indices"] = spike_indices;
            record["length"] = trains[i][j].size();
            out += record.dump();
            out += '\n';
        }
    }
    return out;
}

inline void to_json(nlohmann::json& j, const LifParams& p) {
    j = {{"threshold", p.threshold}, {"decay", p.decay}};
}
inline void from_json(const nlohmann::json& j, LifParams& p) {
    j.at("threshold").get_to(p.threshold);
    j.at("decay").get_to(p.decay);
}

inline void to_json(nlohmann::json& j, const PopulationConfig& c) {
    j = {{"neurons", c.neurons}, {"shifts", c.shifts}};
}
inline void from_json(const nlohmann::json& j, PopulationConfig& c) {
    j.at("neurons").get_to(c.neurons);
    j.at("shifts").get_to(c.shifts);
}

inline void to_json(nlohmann::json& j, const GridPoint& p) {
    j = {{"grid_density", p.grid_density},
         {"achieved_density", p.achieved_density},
         {"joint_mi_bits", p.joint_mi_bits}};
}
inline void from_json(const nlohmann::json& j, GridPoint& p) {
    j.at("grid_density").get_to(p.grid_density);
    j.at("achieved_density").get_to(p.achieved_density);
    j.at("joint_mi_bits").get_to(p.joint_mi_bits);
}

inline void to_json(nlohmann::json& j, const IterationRecord& r) {
    j = {{"chosen_density", r.chosen_density},
         {"achieved_density", r.achieved_density},
         {"chosen_threshold", r.chosen_threshold},
         {"chosen_shift", r.chosen_shift},
         {"best_joint_mi", r.best_joint_mi},
         {"mi_curve", r.mi_curve}};
}
inline void from_json(const nlohmann::json& j, IterationRecord& r) {
    j.at("chosen_density").get_to(r.chosen_density);
    j.at("achieved_density").get_to(r.achieved_density);
    j.at("chosen_threshold").get_to(r.chosen_threshold);
    j.at("chosen_shift").get_to(r.chosen_shift);
    j.at("best_joint_mi").get_to(r.best_joint_mi);
    j.at("mi_curve").get_to(r.mi_curve);
}

inline void to_json(nlohmann::json& j, const TuneReport& r) {
    j = {{"iterations", r.iterations}, {"final_config", r.final_config}};
}
inline void from_json(const nlohmann::json& j, TuneReport& r) {
    j.at("iterations").get_to(r.iterations);
    j.at("final_config").get_to(r.final_config);
}

inline void to_json(nlohmann::json& j, const MiEstimate& e) {
    j = {{"bits", e.bits},
         {"window_lengths", e.window_lengths},
         {"per_window_bits", e.per_window_bits},
         {"fit", {{"a", e.fit.a}, {"b", e.fit.b}, {"c", e.fit.c}}},
         {"sample_count", e.sample_count},
         {"k", e.k}};
}

inline void to_json(nlohmann::json& j, const EvalResult& r) {
    j = {{"accuracy", r.accuracy},
         {"per_class_accuracy", r.per_class_accuracy},
         {"train_size", r.train_size},
         {"test_size", r.test_size},
         {"seed", r.seed}};
}

// Shortest round-trip decimal form, shared by the CSV writers so regenerated
// tables are byte-identical.
inline std::string format_number(double value) {
    return nlohmann::json(value).dump();
}

inline std::string features_to_csv(const std::vector<FeatureVector>& features) {
    std::ostringstream out;
    if (features.empty()) return "label\n";
    out << "label";
    for (std::size_t i = 0; i < features.front().values.size(); ++i) out << ",f" << i;
    out << '\n';
    for (const auto& f : features) {
        out << f.label;
        for (double v : f.values) out << ',' << format_number(v);
        out << '\n';
    }
    return out.str();
}

}  // namespace popcode
