// Command-line front end: train / eval / sweep / bounds.
//
// Exit codes: 0 success, 2 validation or usage error, 3 data/format error,
// 4 numeric-domain error.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "yomo/bounds.hpp"
#include "yomo/errors.hpp"
#include "yomo/experiment.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> overrides;
    uint64_t seed = 0;
    std::string out_dir;
    int threads = 1;
    CLI::Option* seed_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_config = true) {
    if (with_config)
        cmd->add_option("--config", o.config_path, "Experiment config file (INI-style sections)");
    o.seed_opt = cmd->add_option("--seed", o.seed, "Replace the config's seed list with this seed");
    cmd->add_option("--out-dir", o.out_dir, "Output directory (overrides output.dir)");
    cmd->add_option("--threads", o.threads, "Worker threads (used by sweep cells)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--set", o.overrides, "Override one config field: section.key=value")
        ->type_size(1);
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

void apply_cli(yomo::ExperimentConfig& cfg, const CommonOpts& o) {
    for (const std::string& kv : o.overrides) {
        size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw yomo::ConfigError("--set expects section.key=value, got '" + kv + "'");
        yomo::apply_override(cfg, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
    if (o.seed_opt != nullptr && o.seed_opt->count() > 0) cfg.seeds = {o.seed};
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
}

yomo::ExperimentConfig base_config(const CommonOpts& o) {
    if (o.config_path.empty()) return yomo::ExperimentConfig{};
    return yomo::load_config(o.config_path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum classifier experiment runner"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "yomo 0.1.0");

    CommonOpts train_opts;
    CLI::App* train_cmd = app.add_subcommand("train", "Train a model and write its checkpoint");
    add_common(train_cmd, train_opts);

    CommonOpts eval_opts;
    std::string eval_checkpoint;
    CLI::App* eval_cmd =
        app.add_subcommand("eval", "Evaluate a checkpoint across shots / noise / seeds");
    eval_cmd->add_option("--checkpoint", eval_checkpoint, "Checkpoint file to evaluate")
        ->required();
    add_common(eval_cmd, eval_opts);

    CommonOpts sweep_opts;
    std::string sweep_axis;
    std::vector<std::string> sweep_values;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Sweep one axis and combine the results");
    sweep_cmd->add_option("--axis", sweep_axis, "One of: shots, n_q, N_b, tau, noise")
        ->required();
    sweep_cmd->add_option("--values", sweep_values, "Comma-separated axis values")
        ->required()
        ->delimiter(',');
    add_common(sweep_cmd, sweep_opts);

    yomo::BoundInputs bound_inputs;
    std::string bounds_out_dir = "out";
    CLI::App* bounds_cmd =
        app.add_subcommand("bounds", "Shot-complexity bounds and thresholds as CSV");
    bounds_cmd->add_option("--p", bound_inputs.p, "Single-shot correct-class probability");
    bounds_cmd->add_option("--margin", bound_inputs.margin, "Top-two score margin");
    bounds_cmd->add_option("--lipschitz", bound_inputs.lipschitz, "Score-map Lipschitz constant");
    bounds_cmd->add_option("--classes", bound_inputs.K, "Class count K");
    bounds_cmd->add_option("--target-delta", bound_inputs.target_delta,
                           "Target misprediction probability");
    bounds_cmd->add_option("--shots", bound_inputs.shots, "Shot count N");
    bounds_cmd->add_option("--out-dir", bounds_out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*train_cmd) {
            yomo::ExperimentConfig cfg = base_config(train_opts);
            apply_cli(cfg, train_opts);
            yomo::TrainPaths paths = yomo::run_train(cfg);
            std::cout << paths.checkpoint << "\n" << paths.loss_csv << "\n";
        } else if (*eval_cmd) {
            yomo::ExperimentConfig cfg = eval_opts.config_path.empty()
                                             ? yomo::checkpoint_config(eval_checkpoint)
                                             : yomo::load_config(eval_opts.config_path);
            apply_cli(cfg, eval_opts);
            std::cout << yomo::run_eval(eval_checkpoint, cfg) << "\n";
        } else if (*sweep_cmd) {
            yomo::ExperimentConfig cfg = base_config(sweep_opts);
            apply_cli(cfg, sweep_opts);
            std::cout << yomo::run_sweep(cfg, sweep_axis, sweep_values, sweep_opts.threads)
                      << "\n";
        } else if (*bounds_cmd) {
            std::cout << yomo::run_bounds(bound_inputs, bounds_out_dir) << "\n";
        }
        return 0;
    } catch (const yomo::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const yomo::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const yomo::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const yomo::ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const yomo::IndexError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
