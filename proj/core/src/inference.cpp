#include "yomo/inference.hpp"

#include <cmath>
#include <cstdlib>

#include "yomo/errors.hpp"

namespace yomo {

namespace {

constexpr double kHalfPi = 1.57079632679489661923;

// +1 / -1 eigenvalue of a basis index for a diagonal (Z-like) mask.
double eigen_sign(uint64_t index, uint64_t mask) {
    return __builtin_parityll(index & mask) ? -1.0 : 1.0;
}

uint64_t observable_mask(const Observable& obs) {
    const int n_q = static_cast<int>(obs.ops.size());
    uint64_t mask = 0;
    for (int q = 0; q < n_q; ++q) {
        if (obs.ops[q] != PauliOp::I) mask |= 1ULL << (n_q - 1 - q);
    }
    return mask;
}

double estimate_from_counts(const BitstringSample& sample, uint64_t mask) {
    double total = 0.0;
    for (const auto& [index, count] : sample.counts) {
        total += eigen_sign(index, mask) * static_cast<double>(count);
    }
    return total / static_cast<double>(sample.total_shots);
}

}  // namespace

Shots parse_shots(const std::string& text) {
    if (text == "inf") return Shots::inf();
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
        throw ConfigError("shot count \"" + text + "\" is neither a positive integer nor \"inf\"");
    }
    errno = 0;
    const long long value = std::strtoll(text.c_str(), nullptr, 10);
    if (errno != 0 || value < 1) {
        throw ConfigError("shot count \"" + text + "\" is out of range");
    }
    return Shots::finite(value);
}

std::string format_shots(const Shots& shots) {
    return shots.infinite ? "inf" : std::to_string(shots.count);
}

ShotPlan plan_shots(const std::vector<Observable>& observables, Shots total) {
    if (observables.empty()) throw ArgumentError("shot plan needs at least one observable");
    if (!total.infinite && total.count < 1) {
        throw ArgumentError("shot count must be at least 1");
    }
    ShotPlan plan;
    plan.total = total;
    plan.group_of.reserve(observables.size());
    bool comp_present = false;
    bool y_present = false;
    for (const Observable& obs : observables) {
        bool has_y = false;
        bool has_other = false;
        for (PauliOp op : obs.ops) {
            if (op == PauliOp::Y) has_y = true;
            if (op == PauliOp::X) {
                throw ArgumentError("observable " + format_observable(obs) +
                                    " contains X; the two-basis scheme measures only Z-only and "
                                    "Y-only strings");
            }
            if (op == PauliOp::Z) has_other = true;
        }
        if (has_y && has_other) {
            throw ArgumentError("observable " + format_observable(obs) +
                                " mixes Y with Z; the two-basis scheme measures only Z-only and "
                                "Y-only strings");
        }
        plan.group_of.push_back(has_y ? 1 : 0);
        (has_y ? y_present : comp_present) = true;
    }
    if (total.infinite) return plan;
    const long long N = total.count;
    if (comp_present && y_present) {
        plan.comp_shots = (N + 1) / 2;  // computational basis leads the round-robin
        plan.y_shots = N / 2;
    } else if (comp_present) {
        plan.comp_shots = N;
    } else {
        plan.y_shots = N;
    }
    return plan;
}

PredictionOutcome predict_yomo_shots(std::span<const double> P, const ClassPartition& part,
                                     Shots shots, RngStream& rng) {
    PredictionOutcome outcome;
    outcome.shots = shots;
    if (shots.infinite) {
        outcome.scores = aggregate_mean(P, part);
        outcome.predicted = predict_class(outcome.scores);
        return outcome;
    }
    if (shots.count < 1) throw ArgumentError("shot count must be at least 1");
    const uint64_t dim = 1ULL << part.n_q;
    if (P.size() != dim) {
        throw ArgumentError("distribution has " + std::to_string(P.size()) +
                            " entries, partition covers " + std::to_string(dim));
    }
    std::vector<int> class_of(dim, 0);
    for (int k = 0; k < part.K; ++k) {
        for (uint64_t idx : part.sets[k]) class_of[idx] = k;
    }
    const BitstringSample sample = sample_bitstrings(
        std::vector<double>(P.begin(), P.end()), static_cast<uint64_t>(shots.count), rng);
    outcome.scores.assign(part.K, 0.0);
    for (const auto& [index, count] : sample.counts) {
        outcome.scores[class_of[index]] += static_cast<double>(count);
    }
    outcome.predicted = predict_class(outcome.scores);
    return outcome;
}

PredictionOutcome predict_vanilla_shots(std::span<const double> P, std::span<const double> P_y,
                                        const std::vector<Observable>& observables, Shots shots,
                                        RngStream& rng) {
    const ShotPlan plan = plan_shots(observables, shots);
    const uint64_t dim = 1ULL << observables.front().ops.size();
    if (P.size() != dim) {
        throw ArgumentError("computational-basis distribution has " + std::to_string(P.size()) +
                            " entries, observables need " + std::to_string(dim));
    }
    bool needs_y = false;
    for (int g : plan.group_of) needs_y = needs_y || g == 1;
    if (needs_y && P_y.size() != dim) {
        throw ArgumentError("rotated-basis distribution has " + std::to_string(P_y.size()) +
                            " entries, observables need " + std::to_string(dim));
    }
    std::vector<double> mu(observables.size(), 0.0);

    if (shots.infinite) {
        for (size_t k = 0; k < observables.size(); ++k) {
            const std::span<const double> dist = plan.group_of[k] == 0 ? P : P_y;
            const uint64_t mask = observable_mask(observables[k]);
            double value = 0.0;
            for (uint64_t i = 0; i < dist.size(); ++i) value += dist[i] * eigen_sign(i, mask);
            mu[k] = value;
        }
    } else {
        BitstringSample comp_sample;
        BitstringSample y_sample;
        if (plan.comp_shots > 0) {
            comp_sample = sample_bitstrings(std::vector<double>(P.begin(), P.end()),
                                            static_cast<uint64_t>(plan.comp_shots), rng);
        }
        if (plan.y_shots > 0) {
            y_sample = sample_bitstrings(std::vector<double>(P_y.begin(), P_y.end()),
                                         static_cast<uint64_t>(plan.y_shots), rng);
        }
        for (size_t k = 0; k < observables.size(); ++k) {
            const BitstringSample& sample = plan.group_of[k] == 0 ? comp_sample : y_sample;
            if (sample.total_shots == 0) continue;  // unmeasured group keeps mu-hat = 0
            mu[k] = estimate_from_counts(sample, observable_mask(observables[k]));
        }
    }

    PredictionOutcome outcome;
    outcome.shots = shots;
    outcome.scores = vanilla_probs(mu);
    outcome.predicted = predict_class(outcome.scores);
    return outcome;
}

DistributionPair model_distributions(const Model& model, std::span<const double> z,
                                     const NoiseModel* noise, const NoiseEvalConfig& cfg,
                                     bool want_rotated) {
    const uint64_t dim = 1ULL << model.config.n_q;
    auto rotated_probs = [&](const StateVector& state) {
        StateVector turned = state;
        for (int q = 0; q < model.config.n_q; ++q) apply_rotation(turned, Axis::x, q, kHalfPi);
        return probabilities(turned);
    };

    DistributionPair pair;
    if (noise == nullptr) {
        const StateVector state = execute(model.circuit, z, model.theta);
        pair.comp = probabilities(state);
        if (want_rotated) pair.rotated = rotated_probs(state);
        return pair;
    }

    if (cfg.trajectories < 1) {
        throw ConfigError("trajectories must be at least 1, got " +
                          std::to_string(cfg.trajectories));
    }
    pair.comp.assign(dim, 0.0);
    if (want_rotated) pair.rotated.assign(dim, 0.0);
    RngStream root(cfg.seed);
    for (int m = 0; m < cfg.trajectories; ++m) {
        RngStream traj = root.derive(static_cast<uint64_t>(m));
        const StateVector state = execute(model.circuit, z, model.theta, noise, &traj);
        const std::vector<double> probs = probabilities(state);
        for (uint64_t i = 0; i < dim; ++i) pair.comp[i] += probs[i];
        if (want_rotated) {
            const std::vector<double> rot = rotated_probs(state);
            for (uint64_t i = 0; i < dim; ++i) pair.rotated[i] += rot[i];
        }
    }
    const double inv = 1.0 / static_cast<double>(cfg.trajectories);
    for (double& v : pair.comp) v *= inv;
    for (double& v : pair.rotated) v *= inv;
    return pair;
}

AccuracyReport evaluate_accuracy(const Model& model, const Dataset& ds, Shots shots,
                                 const NoiseModel* noise, const NoiseEvalConfig& noise_cfg,
                                 int repeats, uint64_t seed) {
    if (ds.size() == 0) throw ArgumentError("accuracy evaluation needs a non-empty dataset");
    if (repeats < 1) throw ArgumentError("repeats must be at least 1");
    const int R = shots.infinite ? 1 : repeats;

    bool want_rotated = false;
    if (model.config.head == Head::vanilla) {
        const ShotPlan plan = plan_shots(model.observables, shots);
        for (int g : plan.group_of) want_rotated = want_rotated || g == 1;
    }

    std::vector<long long> correct(R, 0);
    RngStream sample_seed_stream(noise_cfg.seed);
    for (int i = 0; i < ds.size(); ++i) {
        const std::vector<double> z = forward(model.extractor, ds.inputs[i]);
        NoiseEvalConfig per_sample = noise_cfg;
        per_sample.seed = sample_seed_stream.derive(static_cast<uint64_t>(i)).next_u64();
        const DistributionPair dist =
            model_distributions(model, z, noise, per_sample, want_rotated);
        // An empty rotated distribution only ever reaches predictors that
        // will not read it (Z-only observable sets).
        const std::vector<double> empty;
        for (int r = 0; r < R; ++r) {
            RngStream rng =
                RngStream(seed).derive({static_cast<uint64_t>(i), static_cast<uint64_t>(r)});
            PredictionOutcome outcome;
            if (model.config.head == Head::yomo) {
                outcome = predict_yomo_shots(dist.comp, model.partition, shots, rng);
            } else {
                outcome = predict_vanilla_shots(
                    dist.comp, want_rotated ? dist.rotated : empty, model.observables, shots, rng);
            }
            if (outcome.predicted == ds.labels[i]) ++correct[r];
        }
    }

    AccuracyReport report;
    report.shots = shots;
    report.repeats = R;
    report.per_repeat.resize(R);
    double mean = 0.0;
    for (int r = 0; r < R; ++r) {
        report.per_repeat[r] = static_cast<double>(correct[r]) / ds.size();
        mean += report.per_repeat[r];
    }
    mean /= R;
    report.mean = mean;
    if (R > 1) {
        double ss = 0.0;
        for (double a : report.per_repeat) ss += (a - mean) * (a - mean);
        report.std_err = std::sqrt(ss / (R - 1)) / std::sqrt(static_cast<double>(R));
    }
    return report;
}

std::string eval_csv_header() {
    return "run_id,head,n_q,N_b,tau,noise_name,shots,repeat_count,accuracy,std_err,seed";
}

}  // namespace yomo
