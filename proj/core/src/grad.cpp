#include "yomo/grad.hpp"

#include <cmath>

#include "yomo/errors.hpp"

namespace yomo {

namespace {

constexpr double kHalfPi = 1.57079632679489661923;

PauliOp rotation_generator(Axis axis) {
    switch (axis) {
        case Axis::x: return PauliOp::X;
        case Axis::y: return PauliOp::Y;
        case Axis::z: return PauliOp::Z;
    }
    return PauliOp::I;
}

// Per-sample forward intermediates needed by both gradient paths.
struct ForwardRecord {
    ExtractorCache cache;
    std::vector<double> z;
};

std::vector<ForwardRecord> run_forward(const Model& model, const SampleBatch& batch) {
    std::vector<ForwardRecord> records(batch.inputs.size());
    for (size_t i = 0; i < batch.inputs.size(); ++i) {
        records[i].z = forward(model.extractor, batch.inputs[i], &records[i].cache);
    }
    return records;
}

// Head outputs of an executed state: basis probabilities (yomo) or the K
// Pauli expectations (vanilla).
std::vector<double> head_outputs(const Model& model, const StateVector& state) {
    if (model.config.head == Head::yomo) return probabilities(state);
    std::vector<double> mu(model.observables.size());
    for (size_t k = 0; k < model.observables.size(); ++k) {
        mu[k] = expectation(state, model.observables[k]);
    }
    return mu;
}

std::vector<double> scores_from_outputs(const Model& model, const std::vector<double>& outputs) {
    if (model.config.head == Head::yomo) return aggregate_mean(outputs, model.partition);
    return vanilla_probs(outputs);
}

// dL/d(head output) per sample, from dL/d(raw score). For yomo the chain is
// the aggregation mean; for vanilla it is the softmax Jacobian.
std::vector<std::vector<double>> output_weights(const Model& model, const BatchPrediction& batch,
                                                const std::vector<std::vector<double>>& g_raw) {
    const int N = batch.size();
    std::vector<std::vector<double>> weights(N);
    if (model.config.head == Head::yomo) {
        const uint64_t dim = 1ULL << model.config.n_q;
        std::vector<int> class_of(dim, 0);
        std::vector<double> inv_size(model.partition.K, 0.0);
        for (int k = 0; k < model.partition.K; ++k) {
            inv_size[k] = 1.0 / static_cast<double>(model.partition.sets[k].size());
            for (uint64_t idx : model.partition.sets[k]) class_of[idx] = k;
        }
        for (int i = 0; i < N; ++i) {
            weights[i].resize(dim);
            for (uint64_t j = 0; j < dim; ++j) {
                weights[i][j] = g_raw[i][class_of[j]] * inv_size[class_of[j]];
            }
        }
        return weights;
    }
    for (int i = 0; i < N; ++i) {
        const std::vector<double>& p = batch.raw_scores[i];  // softmax outputs
        const size_t K = p.size();
        double dot = 0.0;
        for (size_t c = 0; c < K; ++c) dot += g_raw[i][c] * p[c];
        weights[i].resize(K);
        for (size_t k = 0; k < K; ++k) weights[i][k] = p[k] * (g_raw[i][k] - dot);
    }
    return weights;
}

// Forward pass with one gate's angle offset by delta (shift rule operates on
// gate occurrences, not parameter values, so shared parameters stay exact).
StateVector execute_shifted(const CircuitSpec& circuit, std::span<const double> z,
                            std::span<const double> theta, size_t shifted_gate, double delta) {
    StateVector state = init_zero(circuit.n_q);
    for (size_t t = 0; t < circuit.gates.size(); ++t) {
        const GateOp& gate = circuit.gates[t];
        if (gate.kind == GateKind::rotation) {
            double angle = gate_angle(gate, z, theta);
            if (t == shifted_gate) angle += delta;
            apply_rotation(state, gate.axis, gate.q0, angle);
        } else {
            apply_cnot(state, gate.q0, gate.q1);
        }
    }
    return state;
}

// Shift-rule derivative of the loss through one gate occurrence for one
// sample: [f(+pi/2) - f(-pi/2)] / 2 on each head output, dotted with the
// loss derivative at the unshifted point.
double gate_shift_term(const Model& model, std::span<const double> z, size_t gate_index,
                       const std::vector<double>& weights) {
    const StateVector plus =
        execute_shifted(model.circuit, z, model.theta, gate_index, kHalfPi);
    const StateVector minus =
        execute_shifted(model.circuit, z, model.theta, gate_index, -kHalfPi);
    const std::vector<double> out_plus = head_outputs(model, plus);
    const std::vector<double> out_minus = head_outputs(model, minus);
    double total = 0.0;
    for (size_t o = 0; o < weights.size(); ++o) {
        total += weights[o] * 0.5 * (out_plus[o] - out_minus[o]);
    }
    return total;
}

struct UnshiftedBatch {
    std::vector<ForwardRecord> records;
    BatchPrediction prediction;
    std::vector<std::vector<double>> weights;  // dL/d(head output) per sample
    LossBreakdown loss;
};

UnshiftedBatch evaluate_batch(const Model& model, const SampleBatch& batch,
                              const LossConfig& cfg) {
    UnshiftedBatch out;
    out.records = run_forward(model, batch);
    std::vector<std::vector<double>> scores;
    scores.reserve(batch.inputs.size());
    for (const ForwardRecord& rec : out.records) {
        const StateVector state = execute(model.circuit, rec.z, model.theta);
        scores.push_back(scores_from_outputs(model, head_outputs(model, state)));
    }
    out.prediction = make_batch_prediction(std::move(scores), batch.labels,
                                           cfg.renormalize_scores);
    out.loss = total_loss(out.prediction, cfg);
    out.weights = output_weights(model, out.prediction, score_gradients(out.prediction, cfg));
    return out;
}

}  // namespace

GradientBundle backprop_gradients(const Model& model, const SampleBatch& batch,
                                  const LossConfig& cfg, const NoiseModel* noise) {
    if (noise != nullptr) {
        throw ConfigError(
            "gradients require exact noiseless simulation; training under a noise model is "
            "unsupported");
    }
    UnshiftedBatch fwd = evaluate_batch(model, batch, cfg);

    GradientBundle bundle;
    bundle.loss = fwd.loss;
    bundle.d_theta.assign(model.theta.size(), 0.0);
    bundle.d_theta_c.assign(model.extractor.params.size(), 0.0);
    bundle.d_z_total.assign(model.config.n_f, 0.0);

    const uint64_t dim = 1ULL << model.config.n_q;
    for (size_t i = 0; i < batch.inputs.size(); ++i) {
        const std::vector<double>& z = fwd.records[i].z;
        StateVector phi = execute(model.circuit, z, model.theta);

        // Adjoint seed lambda = dL/d(conj(psi)).
        StateVector lambda;
        lambda.n_q = model.config.n_q;
        lambda.amplitudes.assign(dim, complexd(0.0, 0.0));
        if (model.config.head == Head::yomo) {
            // P_j = |psi_j|^2  =>  lambda_j = (dL/dP_j) psi_j.
            for (uint64_t j = 0; j < dim; ++j) {
                lambda.amplitudes[j] = fwd.weights[i][j] * phi.amplitudes[j];
            }
        } else {
            // mu_k = <psi|O_k|psi>  =>  lambda = sum_k (dL/dmu_k) O_k psi.
            for (size_t k = 0; k < model.observables.size(); ++k) {
                if (fwd.weights[i][k] == 0.0) continue;
                StateVector term = phi;
                for (int q = 0; q < model.config.n_q; ++q) {
                    if (model.observables[k].ops[q] != PauliOp::I) {
                        apply_pauli(term, model.observables[k].ops[q], q);
                    }
                }
                for (uint64_t j = 0; j < dim; ++j) {
                    lambda.amplitudes[j] += fwd.weights[i][k] * term.amplitudes[j];
                }
            }
        }

        // Walk the gates backward: grad_t = Im <lambda_t| G |psi_t>, then
        // un-apply the gate from both vectors.
        std::vector<double> d_z(model.config.n_f, 0.0);
        for (size_t t = model.circuit.gates.size(); t-- > 0;) {
            const GateOp& gate = model.circuit.gates[t];
            if (gate.kind == GateKind::cnot) {
                apply_cnot(phi, gate.q0, gate.q1);
                apply_cnot(lambda, gate.q0, gate.q1);
                continue;
            }
            if (gate.binding != BindingKind::fixed) {
                StateVector generated = phi;
                apply_pauli(generated, rotation_generator(gate.axis), gate.q0);
                double grad = 0.0;
                for (uint64_t j = 0; j < dim; ++j) {
                    grad += std::imag(std::conj(lambda.amplitudes[j]) * generated.amplitudes[j]);
                }
                if (gate.binding == BindingKind::theta) {
                    bundle.d_theta[gate.param_index] += grad;
                } else {
                    d_z[gate.param_index] += grad;
                }
            }
            const double angle = gate_angle(gate, z, model.theta);
            apply_rotation(phi, gate.axis, gate.q0, -angle);
            apply_rotation(lambda, gate.axis, gate.q0, -angle);
        }

        const ExtractorGradients ext = backward(model.extractor, fwd.records[i].cache, d_z);
        for (size_t p = 0; p < ext.d_params.size(); ++p) bundle.d_theta_c[p] += ext.d_params[p];
        for (int f = 0; f < model.config.n_f; ++f) bundle.d_z_total[f] += d_z[f];
    }
    return bundle;
}

double parameter_shift_gradient(const Model& model, const SampleBatch& batch,
                                const LossConfig& cfg, int param_index) {
    const int n_theta = model.circuit.n_theta;
    const int n_f = model.config.n_f;
    BindingKind want;
    int want_index;
    if (param_index >= 0 && param_index < n_theta) {
        want = BindingKind::theta;
        want_index = param_index;
    } else if (param_index < n_theta + n_f) {
        want = BindingKind::feature;
        want_index = param_index - n_theta;
    } else {
        throw ArgumentError("parameter index " + std::to_string(param_index) +
                            " is not a rotation angle (have " + std::to_string(n_theta) +
                            " ansatz angles and " + std::to_string(n_f) + " encoder angles)");
    }

    UnshiftedBatch fwd = evaluate_batch(model, batch, cfg);
    double total = 0.0;
    for (size_t i = 0; i < batch.inputs.size(); ++i) {
        for (size_t t = 0; t < model.circuit.gates.size(); ++t) {
            const GateOp& gate = model.circuit.gates[t];
            if (gate.kind != GateKind::rotation || gate.binding != want ||
                gate.param_index != want_index) {
                continue;
            }
            total += gate_shift_term(model, fwd.records[i].z, t, fwd.weights[i]);
        }
    }
    return total;
}

GradientBundle parameter_shift_gradients(const Model& model, const SampleBatch& batch,
                                         const LossConfig& cfg) {
    UnshiftedBatch fwd = evaluate_batch(model, batch, cfg);

    GradientBundle bundle;
    bundle.loss = fwd.loss;
    bundle.d_theta.assign(model.theta.size(), 0.0);
    bundle.d_theta_c.assign(model.extractor.params.size(), 0.0);
    bundle.d_z_total.assign(model.config.n_f, 0.0);

    for (size_t i = 0; i < batch.inputs.size(); ++i) {
        std::vector<double> d_z(model.config.n_f, 0.0);
        for (size_t t = 0; t < model.circuit.gates.size(); ++t) {
            const GateOp& gate = model.circuit.gates[t];
            if (gate.kind != GateKind::rotation || gate.binding == BindingKind::fixed) continue;
            const double term = gate_shift_term(model, fwd.records[i].z, t, fwd.weights[i]);
            if (gate.binding == BindingKind::theta) {
                bundle.d_theta[gate.param_index] += term;
            } else {
                d_z[gate.param_index] += term;
            }
        }
        const ExtractorGradients ext = backward(model.extractor, fwd.records[i].cache, d_z);
        for (size_t p = 0; p < ext.d_params.size(); ++p) bundle.d_theta_c[p] += ext.d_params[p];
        for (int f = 0; f < model.config.n_f; ++f) bundle.d_z_total[f] += d_z[f];
    }
    return bundle;
}

AdamState make_adam_state(size_t n_params, double lr) {
    AdamState state;
    state.m.assign(n_params, 0.0);
    state.v.assign(n_params, 0.0);
    state.lr = lr;
    return state;
}

void adam_step(AdamState& state, std::vector<double>& params, std::span<const double> grads) {
    if (params.size() != grads.size() || params.size() != state.m.size() ||
        params.size() != state.v.size()) {
        throw ArgumentError("adam_step: parameter/gradient/moment sizes disagree");
    }
    state.t += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (size_t i = 0; i < params.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        params[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
}

}  // namespace yomo
