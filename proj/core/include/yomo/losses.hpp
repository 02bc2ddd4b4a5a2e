#pragma once

#include <span>
#include <string>
#include <vector>

#include "yomo/heads.hpp"

namespace yomo {

// Weights and threshold for the combined training loss. The vanilla head
// trains on cross-entropy alone, so gamma and omega are ignored for it.
struct LossConfig {
    double tau = 0.6;
    double gamma = 0.05;
    double omega = 0.05;
    Head head = Head::yomo;
    // Exploration switches, both off by default (the defaults are the
    // literal loss definitions):
    //  - entropy_on_distribution: entropy over the full K-class vector
    //    instead of the correct-class scalar.
    //  - renormalize_scores: divide each score vector by its sum before the
    //    loss (yomo mean scores need not sum to 1 on their own).
    bool entropy_on_distribution = false;
    bool renormalize_scores = false;
};

// Per-sample class scores with the derived quantities the losses consume.
// `scores` are the effective (possibly renormalized) values; `raw_scores`
// keeps the pre-normalization vectors so gradients can chain through.
struct BatchPrediction {
    std::vector<std::vector<double>> scores;
    std::vector<std::vector<double>> raw_scores;
    std::vector<int> labels;
    std::vector<int> predicted;
    std::vector<double> correct_prob;
    std::vector<double> predicted_prob;
    bool renormalized = false;

    int size() const { return static_cast<int>(labels.size()); }
};

// Validates shapes and labels, fills in the derived fields.
BatchPrediction make_batch_prediction(std::vector<std::vector<double>> scores,
                                      std::vector<int> labels, bool renormalize = false);

// -(1/N) * sum of log(correct-class probability), clamped below at 1e-12.
double ce_loss(const BatchPrediction& batch);

// 1 - mean of predicted-class probabilities strictly above tau; exactly 1
// when no sample qualifies.
double ps_loss(const BatchPrediction& batch, double tau);

// -(1/N) * sum of p*log(p) on the correct-class scalar (the literal
// definition); `on_distribution` switches to the full K-class entropy.
double entropy_loss(const BatchPrediction& batch, bool on_distribution = false);

struct LossBreakdown {
    double ce = 0.0;
    double ps = 0.0;
    double entropy = 0.0;
    double total = 0.0;
};

// total = ce + gamma*ps + omega*entropy for the yomo head; ce alone for
// vanilla (components still reported for logging).
LossBreakdown total_loss(const BatchPrediction& batch, const LossConfig& cfg);

// d(total)/d(raw score) for every sample and class. The qualifier set of
// ps_loss and each sample's argmax are held fixed (both are locally constant
// away from ties and threshold crossings).
std::vector<std::vector<double>> score_gradients(const BatchPrediction& batch,
                                                 const LossConfig& cfg);

// Column header for per-epoch loss-trace CSV files.
std::string loss_trace_csv_header();

}  // namespace yomo
