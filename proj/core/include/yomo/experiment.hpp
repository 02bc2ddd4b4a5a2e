#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "yomo/bounds.hpp"
#include "yomo/checkpoint.hpp"
#include "yomo/data_io.hpp"
#include "yomo/inference.hpp"
#include "yomo/losses.hpp"
#include "yomo/model.hpp"
#include "yomo/noise.hpp"

namespace yomo {

// Where training/evaluation data comes from: generated clusters, generated
// digit glyphs, or an IDX file pair.
struct DataSpec {
    std::string source = "synth_blobs";  // synth_blobs | synth_digits | idx
    // synth_blobs
    int n_per_class = 250;
    double spread = 0.1;
    int d = 8;
    // synth_digits
    int n_train = 2000;
    int n_test = 500;
    // idx
    std::string train_images;
    std::string train_labels;
    std::string test_images;
    std::string test_labels;
    // post-processing (square images): 0 keeps the native resolution
    int downsample_side = 0;
    uint64_t seed = 7;
};

// Full experiment description. File format: INI-style sections [model],
// [data], [train], [eval], [output] with key = value lines; every field has
// a default and can be overridden per-key (CLI > file > default).
struct ExperimentConfig {
    ModelConfig model;  // model.d is resolved from the dataset at run time
    DataSpec data;
    // [train]
    double tau = 0.6;
    double gamma = 0.05;
    double omega = 0.05;
    double lr = 5e-3;
    int epochs = 100;
    int batch = 128;
    // [eval]
    std::vector<Shots> shots = {Shots::inf()};
    std::vector<std::string> noise = {"none"};  // "none", preset name, or "custom"
    double noise_p1 = 0.0;  // used by "custom" entries
    double noise_p2 = 0.0;
    int trajectories = 2000;
    int repeats = 10;
    std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};
    // [output]
    std::string out_dir = "out";
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical full rendering (every field explicit, fixed order); parsing it
// back reproduces the config exactly.
std::string serialize_config(const ExperimentConfig& cfg);

// One key override, addressed as "section.key" (e.g. "train.lr"). Value
// parse errors name the field; range validation runs where the config is
// consumed (parse/load and every run_* entry point), so a series of
// overrides may pass through states that are only jointly valid.
void apply_override(ExperimentConfig& cfg, const std::string& dotted_key,
                    const std::string& value);

// The loss settings implied by the config.
LossConfig loss_config(const ExperimentConfig& cfg);

// "none" -> nullopt; a preset name -> its table entry; "custom" -> the
// config's explicit (p1, p2).
std::optional<NoiseModel> resolve_noise(const ExperimentConfig& cfg, const std::string& name);

// Materializes the (train, test) pair a config describes.
std::pair<Dataset, Dataset> load_datasets(const DataSpec& data, int K_for_blobs);

// Deterministic run identifier: a hash of the canonical config text and the
// seed, stable across runs and platforms.
std::string run_id(const ExperimentConfig& cfg, uint64_t seed);

struct EpochRecord {
    int epoch = 0;
    LossBreakdown train_loss;
    double test_loss = 0.0;
};

struct TrainOutput {
    Model model;
    std::vector<EpochRecord> history;
    uint64_t history_digest = 0;
    Dataset train_ds;
    Dataset test_ds;
};

// Pure training run (no file output): exact simulation, Adam over the joint
// (extractor, ansatz) parameter vector, per-epoch loss records.
TrainOutput train_model(const ExperimentConfig& cfg, uint64_t seed);

// Trains with the config's first seed, writes <out>/model_<runid>.ckpt and
// <out>/loss_<runid>.csv, returns the two paths.
struct TrainPaths {
    std::string checkpoint;
    std::string loss_csv;
};
TrainPaths run_train(const ExperimentConfig& cfg);

// Loads a checkpoint, rebuilds the model and test set from `cfg` (normally
// the checkpoint's embedded config plus eval-field overrides), writes one
// result row per (seed, noise, shots) to <out>/eval_<runid>.csv.
std::string run_eval(const std::string& checkpoint_path, const ExperimentConfig& cfg);

// Reads back the config a checkpoint was trained with.
ExperimentConfig checkpoint_config(const std::string& checkpoint_path);

// Sweep over one axis. Retraining axes (n_q, N_b, tau) train per
// (value, seed); reuse axes (shots, noise) train once per seed and evaluate
// every value against that checkpointed state. Cells run on `threads`
// workers; per-cell failures land in the row's status column and the sweep
// continues. Returns the CSV path <out>/sweep_<axis>_<runid>.csv.
std::string run_sweep(const ExperimentConfig& cfg, const std::string& axis,
                      const std::vector<std::string>& values, int threads);

// The closed-form comparison table plus thresholds and the exact
// majority-vote oracle, as "quantity,value" CSV text.
std::string bounds_table(const BoundInputs& inputs);

// Writes bounds_table to <out>/bounds.csv and returns the path.
std::string run_bounds(const BoundInputs& inputs, const std::string& out_dir);

// 64-bit FNV-1a over bytes; the project-wide digest for determinism checks.
uint64_t fnv1a64(const void* data, size_t size, uint64_t seed = 0xcbf29ce484222325ULL);

// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double v);

}  // namespace yomo
