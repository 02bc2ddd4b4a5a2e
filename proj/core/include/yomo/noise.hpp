#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "yomo/circuits.hpp"
#include "yomo/rng.hpp"
#include "yomo/simcore.hpp"

namespace yomo {

// Depolarizing gate-error model: after every rotation a 1-qubit channel with
// probability p1, after every CNOT a 2-qubit channel with probability p2.
// Operational form: with probability p a uniformly random non-identity Pauli
// (or Pauli pair) is applied; readout error is not modeled.
struct NoiseModel {
    std::string name;
    double p1 = 0.0;
    double p2 = 0.0;
};

// Monte-Carlo settings for trajectory averaging.
struct NoiseEvalConfig {
    int trajectories = 2000;
    uint64_t seed = 0;
};

// The four built-in hardware calibration points. p1 < p2 for every entry.
std::vector<NoiseModel> presets();

// Preset with the given name, or a configuration error listing valid names.
NoiseModel preset_by_name(const std::string& name);

// CSV "name,p1,p2" rows (with header) using the canonical decimal strings the
// presets are defined from, so a round-trip through the file is exact.
std::string presets_csv();

// One draw of the 1-qubit channel: I with probability 1-p1, else X/Y/Z each
// with probability p1/3.
PauliOp sample_noise_1q(double p1, RngStream& rng);

// One draw of the 2-qubit channel: (I,I) with probability 1-p2, else one of
// the 15 non-identity Pauli pairs, each with probability p2/15.
std::pair<PauliOp, PauliOp> sample_noise_2q(double p2, RngStream& rng);

// Mean of probabilities(execute(...)) over cfg.trajectories independent
// Pauli-insertion runs; trajectory m uses the stream derived from
// (cfg.seed, m), so the result is reproducible and order-independent.
std::vector<double> noisy_probabilities(const CircuitSpec& circuit, std::span<const double> z,
                                        std::span<const double> theta, const NoiseModel& noise,
                                        const NoiseEvalConfig& cfg);

// Exact reference: composes every gate and depolarizing channel as a
// completely-positive map on the dense density matrix and returns its
// diagonal. Memory is 4^n_q entries, so n_q is capped at 6.
std::vector<double> density_matrix_probabilities(const CircuitSpec& circuit,
                                                 std::span<const double> z,
                                                 std::span<const double> theta,
                                                 const NoiseModel& noise);

}  // namespace yomo
