#include "yomo/heads.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "yomo/errors.hpp"

namespace yomo {

namespace {

void check_distribution(std::span<const double> P, const ClassPartition& part) {
    const uint64_t dim = 1ULL << part.n_q;
    if (P.size() != dim) {
        throw ArgumentError("distribution has " + std::to_string(P.size()) +
                            " entries but the partition covers " + std::to_string(dim));
    }
    const double total = std::accumulate(P.begin(), P.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-6) {
        throw ArgumentError("distribution entries sum to " + std::to_string(total) +
                            ", expected 1 within 1e-6");
    }
}

constexpr const char* kDefaultStrings[10] = {
    "ZIII", "IZII", "IIZI", "IIIZ", "ZZII",
    "ZIZI", "IZZI", "IIZZ", "YIYI", "IYIY",
};

}  // namespace

ClassPartition build_partition(int n_q, int K) {
    if (n_q < 1 || n_q > 20) {
        throw ConfigError("partition n_q must lie in [1, 20], got " + std::to_string(n_q));
    }
    const uint64_t dim = 1ULL << n_q;
    if (K < 1) throw ConfigError("class count K must be positive, got " + std::to_string(K));
    if (static_cast<uint64_t>(K) > dim) {
        throw ConfigError("more classes than basis states: K=" + std::to_string(K) +
                          " exceeds 2^" + std::to_string(n_q) + "=" + std::to_string(dim));
    }
    ClassPartition part;
    part.n_q = n_q;
    part.K = K;
    part.sets.resize(K);
    const uint64_t base = dim / static_cast<uint64_t>(K);
    const uint64_t r = dim - base * static_cast<uint64_t>(K);
    uint64_t next = 0;
    for (int k = 0; k < K; ++k) {
        const uint64_t size = base + (static_cast<uint64_t>(k) < r ? 1 : 0);
        part.sets[k].reserve(size);
        for (uint64_t j = 0; j < size; ++j) part.sets[k].push_back(next++);
    }
    return part;
}

std::vector<double> aggregate_mean(std::span<const double> P, const ClassPartition& part) {
    check_distribution(P, part);
    std::vector<double> scores(part.K);
    for (int k = 0; k < part.K; ++k) {
        double total = 0.0;
        for (uint64_t idx : part.sets[k]) total += P[idx];
        scores[k] = total / static_cast<double>(part.sets[k].size());
    }
    return scores;
}

std::vector<double> aggregate_sum(std::span<const double> P, const ClassPartition& part) {
    check_distribution(P, part);
    std::vector<double> masses(part.K);
    for (int k = 0; k < part.K; ++k) {
        double total = 0.0;
        for (uint64_t idx : part.sets[k]) total += P[idx];
        masses[k] = total;
    }
    return masses;
}

int predict_class(std::span<const double> scores) {
    if (scores.empty()) throw ArgumentError("predict_class: empty score vector");
    int best = 0;
    for (int k = 1; k < static_cast<int>(scores.size()); ++k) {
        if (scores[k] > scores[best]) best = k;
    }
    return best;
}

std::vector<Observable> default_observables(int n_q, int K) {
    if (n_q < 4) {
        throw ConfigError("default observables need n_q >= 4 (strings are 4 qubits wide), got " +
                          std::to_string(n_q));
    }
    if (K < 1 || K > 10) {
        throw ConfigError("default observable count must lie in [1, 10], got " +
                          std::to_string(K));
    }
    std::vector<Observable> out;
    out.reserve(K);
    for (int k = 0; k < K; ++k) {
        std::string text = kDefaultStrings[k];
        text.append(static_cast<size_t>(n_q) - text.size(), 'I');
        out.push_back(parse_observable(text));
    }
    return out;
}

Observable parse_observable(const std::string& text) {
    if (text.empty()) throw ArgumentError("observable string is empty");
    Observable obs;
    obs.ops.reserve(text.size());
    for (char c : text) {
        switch (std::toupper(static_cast<unsigned char>(c))) {
            case 'I': obs.ops.push_back(PauliOp::I); break;
            case 'X': obs.ops.push_back(PauliOp::X); break;
            case 'Y': obs.ops.push_back(PauliOp::Y); break;
            case 'Z': obs.ops.push_back(PauliOp::Z); break;
            default:
                throw ArgumentError("observable string \"" + text +
                                    "\" contains a character outside {I,X,Y,Z}");
        }
    }
    return obs;
}

std::string format_observable(const Observable& obs) {
    std::string out;
    out.reserve(obs.ops.size());
    for (PauliOp op : obs.ops) {
        switch (op) {
            case PauliOp::I: out.push_back('I'); break;
            case PauliOp::X: out.push_back('X'); break;
            case PauliOp::Y: out.push_back('Y'); break;
            case PauliOp::Z: out.push_back('Z'); break;
        }
    }
    return out;
}

double expectation(const StateVector& state, const Observable& obs) {
    if (static_cast<int>(obs.ops.size()) != state.n_q) {
        throw ArgumentError("observable acts on " + std::to_string(obs.ops.size()) +
                            " qubits but the state has " + std::to_string(state.n_q));
    }
    StateVector transformed = state;
    for (int q = 0; q < state.n_q; ++q) {
        if (obs.ops[q] != PauliOp::I) apply_pauli(transformed, obs.ops[q], q);
    }
    complexd inner(0.0, 0.0);
    for (uint64_t i = 0; i < state.dim(); ++i) {
        inner += std::conj(state.amplitudes[i]) * transformed.amplitudes[i];
    }
    return inner.real();
}

std::vector<double> vanilla_probs(std::span<const double> mu) {
    if (mu.empty()) throw ArgumentError("vanilla_probs: empty expectation vector");
    const double shift = *std::max_element(mu.begin(), mu.end());
    std::vector<double> probs(mu.size());
    double total = 0.0;
    for (size_t k = 0; k < mu.size(); ++k) {
        probs[k] = std::exp(mu[k] - shift);
        total += probs[k];
    }
    for (double& p : probs) p /= total;
    return probs;
}

}  // namespace yomo
