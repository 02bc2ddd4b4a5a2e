#pragma once

#include <optional>
#include <vector>

#include "yomo/model.hpp"

namespace yomo {

// Inputs to the shot-complexity calculators:
//   p            single-shot correct-class probability
//   margin       top-two score gap (Delta) in the infinite-shot limit
//   lipschitz    sensitivity L of the score map to expectation error
//   K            class count
//   target_delta target incorrect-prediction probability
//   shots        shot count N
struct BoundInputs {
    double p = 0.9;
    double margin = 0.2;
    double lipschitz = 1.0;
    int K = 10;
    double target_delta = 0.01;
    long long shots = 1;
};

// ceil( ln(1/delta) / (2 (p - 1/2)^2) ); requires p > 1/2.
long long yomo_shots(double p, double target_delta);

// ceil( (8 L^2 / margin^2) ln(2K/delta) ).
long long vanilla_shots(double margin, double lipschitz, int K, double target_delta);

// exp(-2 N (p - 1/2)^2); requires p >= 1/2.
double yomo_error_bound(double p, long long shots);

// min(1, 2K exp(-2 N (margin / 4L)^2)).
double vanilla_error_bound(double margin, double lipschitz, int K, long long shots);

// p* = 1/2 + (margin/4L) sqrt( ln(1/delta) / ln(2K/delta) ): above it the
// yomo shot bound is the smaller of the two.
double fewer_shots_threshold(double margin, double lipschitz, int K, double target_delta);

// p* = 1/2 + sqrt( (margin/4L)^2 - ln(2K)/(2N) ), or nullopt when the
// radicand is negative (the comparison holds vacuously for every p).
std::optional<double> smaller_delta_threshold(double margin, double lipschitz, int K,
                                              long long shots);

// p* = max(0, 1 - 2K exp(-margin^2 / 8L^2)) for the single-shot regime.
double single_shot_threshold(double margin, double lipschitz, int K);

// Exact majority-vote error: the binomial CDF at floor(N/2) correct votes
// out of N (even-N ties count as errors). Stable in log space up to N ~ 1e6.
double majority_vote_error_exact(double p, long long shots);

// Top-two score gaps of a vanilla model's exact expectations over a set of
// inputs; the identity score map makes the effective Lipschitz constant 1.
struct MarginReport {
    std::vector<double> per_sample;
    double min = 0.0;
    double median = 0.0;
    double lipschitz = 1.0;
};

MarginReport measure_margin(const Model& model,
                            const std::vector<std::vector<double>>& inputs);

}  // namespace yomo
