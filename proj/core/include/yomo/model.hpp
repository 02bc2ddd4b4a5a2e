#pragma once

#include <span>
#include <string>
#include <vector>

#include "yomo/circuits.hpp"
#include "yomo/extractor.hpp"
#include "yomo/heads.hpp"
#include "yomo/losses.hpp"
#include "yomo/rng.hpp"

namespace yomo {

// Everything needed to instantiate a classifier: extractor shape, circuit
// shape, head, and class count.
struct ModelConfig {
    Head head = Head::yomo;
    int n_q = 4;
    int N_b = 5;
    int K = 4;
    int d = 8;    // raw input dimension
    int n_f = 0;  // encoding angles; 0 means the 3*n_q default
    ExtractorKind extractor = ExtractorKind::affine;
    int hidden = 0;  // mlp1 extractor width
    EncoderAxisMode axis_mode = EncoderAxisMode::layer_cycle;
    // Vanilla head: observable strings; empty selects the built-in set.
    std::vector<std::string> observables;
};

// A classifier with concrete parameters. The circuit is the composed
// encoder + ansatz; theta holds the ansatz angles.
struct Model {
    ModelConfig config;  // resolved copy (n_f filled in)
    FeatureExtractor extractor;
    CircuitSpec circuit;
    std::vector<double> theta;
    ClassPartition partition;             // yomo head
    std::vector<Observable> observables;  // vanilla head
};

// A training mini-batch materialized as plain vectors.
struct SampleBatch {
    std::vector<std::vector<double>> inputs;
    std::vector<int> labels;
};

// Validates the config, initializes extractor weights and ansatz angles
// (theta uniform in [-pi, pi]) from derived streams of `rng`.
Model build_model(const ModelConfig& config, RngStream& rng);

// Extractor output z for one input.
std::vector<double> model_features(const Model& model, std::span<const double> x);

// Exact-simulation class scores: aggregated mean probabilities (yomo) or
// softmax over Pauli expectations (vanilla).
std::vector<double> model_scores(const Model& model, std::span<const double> x);

// Scores for a whole batch assembled into a BatchPrediction.
BatchPrediction model_batch_prediction(const Model& model, const SampleBatch& batch,
                                       bool renormalize = false);

// Loss of the batch under exact simulation.
LossBreakdown model_loss(const Model& model, const SampleBatch& batch, const LossConfig& cfg);

// Extractor parameter count plus ansatz angle count.
int total_param_count(const Model& model);

}  // namespace yomo
