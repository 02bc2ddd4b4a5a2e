#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "yomo/simcore.hpp"

namespace yomo {

// Which classifier output mechanism a model uses.
enum class Head { yomo, vanilla };

// K disjoint, consecutive blocks of basis indices covering [0, 2^n_q).
// Block sizes follow the index-order rule: with base = floor(2^n_q / K) and
// r = 2^n_q - base*K, the first r classes hold base+1 states, the rest base.
struct ClassPartition {
    int n_q = 0;
    int K = 0;
    std::vector<std::vector<uint64_t>> sets;
};

// A tensor-product Pauli string, one operator per qubit.
struct Observable {
    std::vector<PauliOp> ops;
};

ClassPartition build_partition(int n_q, int K);

// Class scores p_k = (1/|S_k|) * sum of P over S_k. The identity
// sum_k |S_k| * p_k = 1 holds whenever P is a distribution.
std::vector<double> aggregate_mean(std::span<const double> P, const ClassPartition& part);

// Class masses m_k = sum of P over S_k; these sum to 1 and are the
// distribution a single measured bitstring's class label follows.
std::vector<double> aggregate_sum(std::span<const double> P, const ClassPartition& part);

// Argmax with ties broken toward the smallest index (the project-wide rule).
int predict_class(std::span<const double> scores);

// First K of the fixed 10-string observable set {ZIII, IZII, IIZI, IIIZ,
// ZZII, ZIZI, IZZI, IIZZ, YIYI, IYIY}, each right-padded with I to n_q.
std::vector<Observable> default_observables(int n_q, int K = 10);

// Case-insensitive text over {I, X, Y, Z}; printer emits upper case.
Observable parse_observable(const std::string& text);
std::string format_observable(const Observable& obs);

// Exact <psi|O|psi>; real by Hermiticity, in [-1, 1] for Pauli strings.
double expectation(const StateVector& state, const Observable& obs);

// Softmax over expectation values (computed with max-shift for stability).
std::vector<double> vanilla_probs(std::span<const double> mu);

}  // namespace yomo
