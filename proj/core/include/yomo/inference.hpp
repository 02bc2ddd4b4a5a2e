#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "yomo/data_io.hpp"
#include "yomo/heads.hpp"
#include "yomo/model.hpp"
#include "yomo/noise.hpp"
#include "yomo/rng.hpp"

namespace yomo {

// A shot budget: a positive count or the infinite-shot marker (spelled
// "inf" in configs and CSV output).
struct Shots {
    bool infinite = false;
    long long count = 0;

    static Shots inf() { return {true, 0}; }
    static Shots finite(long long n) { return {false, n}; }
};

Shots parse_shots(const std::string& text);
std::string format_shots(const Shots& shots);

// How a finite vanilla budget splits over the two measurement bases:
// Z-only strings read computational-basis samples, Y-only strings read
// samples taken after an R_x(pi/2) on every qubit (which maps Y to Z).
// Strings mixing Y with other non-identity operators (or containing X) have
// no home in this two-basis scheme and are rejected.
struct ShotPlan {
    Shots total;
    std::vector<int> group_of;  // per observable: 0 computational, 1 rotated
    long long comp_shots = 0;
    long long y_shots = 0;
};

// Round-robin allocation starting with the computational group, so that
// group gets ceil(N/2) when both bases are needed.
ShotPlan plan_shots(const std::vector<Observable>& observables, Shots total);

struct PredictionOutcome {
    int predicted = 0;
    // Per-class vote counts (finite yomo), aggregated means (infinite yomo),
    // or softmax over estimated expectations (vanilla).
    std::vector<double> scores;
    Shots shots;
};

// Yomo: draw N bitstrings from the basis distribution P (noiseless or
// trajectory-averaged), map each to its class, majority vote with
// smallest-index tie-break; infinite N takes the argmax of the aggregated
// means instead.
PredictionOutcome predict_yomo_shots(std::span<const double> P, const ClassPartition& part,
                                     Shots shots, RngStream& rng);

// Vanilla: estimate each expectation from its basis group's samples (signed
// eigenvalue average); a group with zero allocated shots contributes
// mu-hat = 0. P_y is the distribution after the all-qubit basis change.
PredictionOutcome predict_vanilla_shots(std::span<const double> P, std::span<const double> P_y,
                                        const std::vector<Observable>& observables, Shots shots,
                                        RngStream& rng);

// The (computational, rotated) distribution pair for one encoded sample,
// exact or averaged over cfg.trajectories noise draws.
struct DistributionPair {
    std::vector<double> comp;
    std::vector<double> rotated;
};

DistributionPair model_distributions(const Model& model, std::span<const double> z,
                                     const NoiseModel* noise, const NoiseEvalConfig& cfg,
                                     bool want_rotated);

struct AccuracyReport {
    double mean = 0.0;
    double std_err = 0.0;
    std::vector<double> per_repeat;
    Shots shots;
    int repeats = 0;
};

// Per test sample: compute the distribution(s) once (trajectory-averaged
// under noise, stream derived from (noise seed, sample)), then rerun the
// finite-shot predictor `repeats` times with streams derived from
// (seed, sample, repeat); reports mean accuracy and the standard error over
// repeats. Infinite shots collapse to a single deterministic pass.
AccuracyReport evaluate_accuracy(const Model& model, const Dataset& ds, Shots shots,
                                 const NoiseModel* noise, const NoiseEvalConfig& noise_cfg,
                                 int repeats, uint64_t seed);

// Header for evaluation result CSV rows.
std::string eval_csv_header();

}  // namespace yomo
