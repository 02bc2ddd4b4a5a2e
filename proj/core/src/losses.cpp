#include "yomo/losses.hpp"

#include <cmath>
#include <numeric>

#include "yomo/errors.hpp"

namespace yomo {

namespace {

constexpr double kProbFloor = 1e-12;

double clamped(double p) { return p < kProbFloor ? kProbFloor : p; }

void check_loss_config(const LossConfig& cfg) {
    if (!(cfg.tau > 0.0 && cfg.tau < 1.0)) {
        throw ConfigError("tau must lie strictly inside (0,1), got " + std::to_string(cfg.tau));
    }
    if (cfg.gamma < 0.0) throw ConfigError("gamma must be non-negative");
    if (cfg.omega < 0.0) throw ConfigError("omega must be non-negative");
}

}  // namespace

BatchPrediction make_batch_prediction(std::vector<std::vector<double>> scores,
                                      std::vector<int> labels, bool renormalize) {
    if (scores.empty()) throw ArgumentError("batch prediction: empty score list");
    if (scores.size() != labels.size()) {
        throw ArgumentError("batch prediction: " + std::to_string(scores.size()) +
                            " score rows vs " + std::to_string(labels.size()) + " labels");
    }
    const size_t K = scores.front().size();
    if (K == 0) throw ArgumentError("batch prediction: empty score row");

    BatchPrediction batch;
    batch.renormalized = renormalize;
    batch.raw_scores = scores;
    batch.labels = std::move(labels);
    batch.scores = std::move(scores);
    const int N = batch.size();
    batch.predicted.resize(N);
    batch.correct_prob.resize(N);
    batch.predicted_prob.resize(N);
    for (int i = 0; i < N; ++i) {
        std::vector<double>& row = batch.scores[i];
        if (row.size() != K) {
            throw ArgumentError("batch prediction: row " + std::to_string(i) + " has " +
                                std::to_string(row.size()) + " classes, expected " +
                                std::to_string(K));
        }
        if (batch.labels[i] < 0 || batch.labels[i] >= static_cast<int>(K)) {
            throw ArgumentError("batch prediction: label " + std::to_string(batch.labels[i]) +
                                " outside [0, " + std::to_string(K) + ")");
        }
        if (renormalize) {
            const double total = std::accumulate(row.begin(), row.end(), 0.0);
            if (!(total > 0.0)) {
                throw ArgumentError("batch prediction: row " + std::to_string(i) +
                                    " sums to a non-positive value, cannot renormalize");
            }
            for (double& v : row) v /= total;
        }
        batch.predicted[i] = predict_class(row);
        batch.correct_prob[i] = row[batch.labels[i]];
        batch.predicted_prob[i] = row[batch.predicted[i]];
    }
    return batch;
}

double ce_loss(const BatchPrediction& batch) {
    double total = 0.0;
    for (double p : batch.correct_prob) total -= std::log(clamped(p));
    return total / batch.size();
}

double ps_loss(const BatchPrediction& batch, double tau) {
    double qualifying_sum = 0.0;
    int qualifying = 0;
    for (double p : batch.predicted_prob) {
        if (p > tau) {
            qualifying_sum += p;
            ++qualifying;
        }
    }
    if (qualifying == 0) return 1.0;
    return 1.0 - qualifying_sum / qualifying;
}

double entropy_loss(const BatchPrediction& batch, bool on_distribution) {
    double total = 0.0;
    if (on_distribution) {
        for (const std::vector<double>& row : batch.scores) {
            for (double p : row) {
                const double c = clamped(p);
                total -= c * std::log(c);
            }
        }
    } else {
        for (double p : batch.correct_prob) {
            const double c = clamped(p);
            total -= c * std::log(c);
        }
    }
    return total / batch.size();
}

LossBreakdown total_loss(const BatchPrediction& batch, const LossConfig& cfg) {
    check_loss_config(cfg);
    LossBreakdown out;
    out.ce = ce_loss(batch);
    out.ps = ps_loss(batch, cfg.tau);
    out.entropy = entropy_loss(batch, cfg.entropy_on_distribution);
    if (cfg.head == Head::vanilla) {
        out.total = out.ce;
    } else {
        out.total = out.ce + cfg.gamma * out.ps + cfg.omega * out.entropy;
    }
    return out;
}

std::vector<std::vector<double>> score_gradients(const BatchPrediction& batch,
                                                 const LossConfig& cfg) {
    check_loss_config(cfg);
    const int N = batch.size();
    const size_t K = batch.scores.front().size();
    const double gamma = cfg.head == Head::vanilla ? 0.0 : cfg.gamma;
    const double omega = cfg.head == Head::vanilla ? 0.0 : cfg.omega;

    int qualifying = 0;
    for (double p : batch.predicted_prob) {
        if (p > cfg.tau) ++qualifying;
    }

    std::vector<std::vector<double>> grads(N, std::vector<double>(K, 0.0));
    for (int i = 0; i < N; ++i) {
        // d(loss)/d(effective score) first.
        std::vector<double> g(K, 0.0);
        const double pc = batch.correct_prob[i];
        if (pc > kProbFloor) {
            g[batch.labels[i]] += -1.0 / (N * pc);  // cross-entropy
            if (omega > 0.0 && !cfg.entropy_on_distribution) {
                g[batch.labels[i]] += omega * (-(std::log(pc) + 1.0) / N);
            }
        }
        if (omega > 0.0 && cfg.entropy_on_distribution) {
            for (size_t k = 0; k < K; ++k) {
                const double p = batch.scores[i][k];
                if (p > kProbFloor) g[k] += omega * (-(std::log(p) + 1.0) / N);
            }
        }
        if (gamma > 0.0 && qualifying > 0 && batch.predicted_prob[i] > cfg.tau) {
            g[batch.predicted[i]] += gamma * (-1.0 / qualifying);
        }

        if (!batch.renormalized) {
            grads[i] = std::move(g);
            continue;
        }
        // Chain through p_k = s_k / T: dL/ds_k = (g_k - sum_c g_c p_c) / T.
        const double T = std::accumulate(batch.raw_scores[i].begin(),
                                         batch.raw_scores[i].end(), 0.0);
        double weighted = 0.0;
        for (size_t k = 0; k < K; ++k) weighted += g[k] * batch.scores[i][k];
        for (size_t k = 0; k < K; ++k) grads[i][k] = (g[k] - weighted) / T;
    }
    return grads;
}

std::string loss_trace_csv_header() { return "epoch,ce,ps,entropy,total,test_loss"; }

}  // namespace yomo
