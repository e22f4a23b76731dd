// popcode command-line tool.
#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "popcode/cli.hpp"

namespace {

void add_common_options(CLI::App* cmd, popcode::RunConfig& config) {
    cmd->add_option("--dataset", config.dataset_path, "Input dataset (JSON lines)");
    cmd->add_option("--seed", config.builder.seed, "Top-level seed for all randomness");
    cmd->add_option("--decay", config.builder.decay, "Membrane decay constant in (0,1)");
    cmd->add_flag("--normalize", config.normalize,
                  "Min-max normalize each stimulus to [0,1] before encoding");
    cmd->add_option("--workers", config.builder.workers,
                    "Worker thread bound (0 = hardware concurrency)");
}

void add_estimation_options(CLI::App* cmd, popcode::RunConfig& config) {
    cmd->add_option("--window-set", config.builder.window_set,
                    "Window lengths for the extrapolated MI estimate")
        ->delimiter(',');
    cmd->add_option("--k", config.builder.k, "Neighbour count for the MI estimator");
    cmd->add_option("--max-shift", config.builder.max_shift,
                    "Largest latency shift searched per neuron");
    cmd->add_option("--stride", config.builder.stride, "Time-index stride for pattern pairs");
    cmd->add_option("--stride-cap", config.builder.sample_cap,
                    "Maximum pattern pairs per estimate (0 = unlimited)");
    cmd->add_option("--subset-size", config.builder.estimation_subset_size,
                    "Stimuli sampled for MI estimation (0 = all)");
}

void add_eval_options(CLI::App* cmd, popcode::RunConfig& config) {
    cmd->add_option("--bins", config.eval.bins, "Spike-count bins per neuron");
    cmd->add_option("--overlap", config.eval.overlap, "Bin overlap fraction in [0,1)");
    cmd->add_option("--neighbors", config.eval.neighbors, "Classifier neighbour count");
    cmd->add_option("--train-fraction", config.eval.train_fraction,
                    "Training fraction of the stratified split");
}

void add_population_options(CLI::App* cmd, popcode::RunConfig& config) {
    cmd->add_option("--thresholds", config.thresholds, "Inline population thresholds")
        ->delimiter(',');
    cmd->add_option("--shifts", config.shifts,
                    "Inline population latency shifts (defaults to zeros)")
        ->delimiter(',');
    cmd->add_option("--report", config.report_path,
                    "Take the population from a tune report's final_config");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Population spike encoding tuned by information maximization"};
    app.require_subcommand(1);
    app.fallthrough();  // lets --config appear after the subcommand name
    app.set_config("--config", "", "Key-value config file; command-line flags win");

    popcode::RunConfig config;

    auto* encode = app.add_subcommand("encode", "Encode a dataset into spike trains");
    add_common_options(encode, config);
    add_population_options(encode, config);
    encode->add_option("--out", config.out_path, "Spike-train JSON-lines output")->required();

    auto* tune = app.add_subcommand("tune", "Tune a neuron population on a dataset");
    add_common_options(tune, config);
    add_estimation_options(tune, config);
    add_eval_options(tune, config);
    tune->add_option("--out", config.out_path, "Tune report JSON output")->required();
    tune->add_option("--objective", config.objective,
                     "mi | accuracy | random-baseline");
    tune->add_option("--max-neurons", config.builder.max_neurons,
                     "Population size bound");
    tune->add_option("--density-grid", config.builder.density_grid,
                     "Target spike densities searched per neuron")
        ->delimiter(',');
    tune->add_option("--min-relative-gain", config.builder.min_relative_gain,
                     "Stop when the relative joint-MI gain drops below this (0 = off)");
    tune->add_option("--trials", config.trials, "Random-baseline trial count");
    tune->add_flag("!--no-eval", config.run_eval, "Skip accuracy evaluation");

    auto* report = app.add_subcommand("report", "Project a tune report into CSV tables");
    report->add_option("--report", config.report_path, "Tune report JSON")->required();
    report->add_option("--out", config.out_path, "Output directory")->required();

    auto* mi = app.add_subcommand("mi", "One-shot MI estimate for a population");
    add_common_options(mi, config);
    add_estimation_options(mi, config);
    add_population_options(mi, config);
    mi->add_option("--out", config.out_path, "Optional JSON output file");

    auto* classify = app.add_subcommand("classify", "One-shot classification run");
    add_common_options(classify, config);
    add_eval_options(classify, config);
    add_population_options(classify, config);
    classify->add_option("--out", config.out_path, "Optional JSON output file");
    classify->add_option("--features-out", config.features_out,
                         "Optional feature-matrix CSV output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (encode->parsed()) {
            popcode::cmd_encode(config);
        } else if (tune->parsed()) {
            popcode::cmd_tune(config);
        } else if (report->parsed()) {
            popcode::cmd_report(config);
        } else if (mi->parsed()) {
            std::cout << popcode::cmd_mi(config);
        } else if (classify->parsed()) {
            std::cout << popcode::cmd_classify(config);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
