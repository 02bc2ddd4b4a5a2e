#include "yomo/circuits.hpp"

#include <sstream>

#include "yomo/errors.hpp"
#include "yomo/noise.hpp"

namespace yomo {

namespace {

constexpr Axis kAxisCycle[3] = {Axis::y, Axis::z, Axis::x};

const char* axis_name(Axis axis) {
    switch (axis) {
        case Axis::x: return "x";
        case Axis::y: return "y";
        case Axis::z: return "z";
    }
    return "?";
}

}  // namespace

CircuitSpec build_encoder(int n_q, int n_f, EncoderAxisMode axis_mode) {
    if (n_q < 1) throw ConfigError("encoder n_q must be at least 1, got " + std::to_string(n_q));
    if (n_f < 1) throw ArgumentError("encoder n_f must be at least 1, got " + std::to_string(n_f));
    CircuitSpec spec;
    spec.n_q = n_q;
    spec.n_f = n_f;
    spec.gates.reserve(n_f);
    for (int i = 0; i < n_f; ++i) {
        GateOp gate;
        gate.kind = GateKind::rotation;
        gate.q0 = i % n_q;
        const int cycle_index =
            axis_mode == EncoderAxisMode::layer_cycle ? (i / n_q) % 3 : i % 3;
        gate.axis = kAxisCycle[cycle_index];
        gate.binding = BindingKind::feature;
        gate.param_index = i;
        spec.gates.push_back(gate);
    }
    return spec;
}

CircuitSpec build_ansatz(int n_q, int N_b) {
    if (n_q < 2) {
        throw ConfigError("ansatz n_q must be at least 2 (no entangler possible), got " +
                          std::to_string(n_q));
    }
    if (N_b < 1) throw ConfigError("ansatz N_b must be at least 1, got " + std::to_string(N_b));
    CircuitSpec spec;
    spec.n_q = n_q;
    spec.N_b = N_b;
    spec.n_theta = N_b * n_q;
    spec.gates.reserve(static_cast<size_t>(N_b) * (2 * n_q - 1));
    for (int block = 0; block < N_b; ++block) {
        for (int q = 0; q < n_q; ++q) {
            GateOp gate;
            gate.kind = GateKind::rotation;
            gate.axis = Axis::y;
            gate.q0 = q;
            gate.binding = BindingKind::theta;
            gate.param_index = block * n_q + q;
            spec.gates.push_back(gate);
        }
        for (int q = 0; q + 1 < n_q; ++q) {
            GateOp gate;
            gate.kind = GateKind::cnot;
            gate.q0 = q;
            gate.q1 = q + 1;
            spec.gates.push_back(gate);
        }
    }
    return spec;
}

CircuitSpec compose(const CircuitSpec& encoder, const CircuitSpec& ansatz) {
    if (encoder.n_q != ansatz.n_q) {
        throw ConfigError("compose: encoder has n_q=" + std::to_string(encoder.n_q) +
                          " but ansatz has n_q=" + std::to_string(ansatz.n_q));
    }
    if (encoder.n_f < 1) throw ArgumentError("compose: encoder must bind at least one feature");
    CircuitSpec spec;
    spec.n_q = encoder.n_q;
    spec.n_f = encoder.n_f;
    spec.n_theta = ansatz.n_theta;
    spec.N_b = ansatz.N_b;
    spec.gates = encoder.gates;
    spec.gates.insert(spec.gates.end(), ansatz.gates.begin(), ansatz.gates.end());
    return spec;
}

double gate_angle(const GateOp& gate, std::span<const double> z, std::span<const double> theta) {
    switch (gate.binding) {
        case BindingKind::feature: return z[gate.param_index];
        case BindingKind::theta: return theta[gate.param_index];
        case BindingKind::fixed: return gate.fixed_angle;
    }
    return 0.0;
}

StateVector execute(const CircuitSpec& circuit, std::span<const double> z,
                    std::span<const double> theta, const NoiseModel* noise, RngStream* rng) {
    if (static_cast<int>(z.size()) != circuit.n_f) {
        throw ArgumentError("execute: expected " + std::to_string(circuit.n_f) +
                            " features, got " + std::to_string(z.size()));
    }
    if (static_cast<int>(theta.size()) != circuit.n_theta) {
        throw ArgumentError("execute: expected " + std::to_string(circuit.n_theta) +
                            " thetas, got " + std::to_string(theta.size()));
    }
    if (noise != nullptr && rng == nullptr) {
        throw ArgumentError("execute: a noise model requires an rng stream");
    }
    StateVector state = init_zero(circuit.n_q);
    for (const GateOp& gate : circuit.gates) {
        if (gate.kind == GateKind::rotation) {
            apply_rotation(state, gate.axis, gate.q0, gate_angle(gate, z, theta));
            if (noise != nullptr) {
                const PauliOp p = sample_noise_1q(noise->p1, *rng);
                apply_pauli(state, p, gate.q0);
            }
        } else {
            apply_cnot(state, gate.q0, gate.q1);
            if (noise != nullptr) {
                const auto pair = sample_noise_2q(noise->p2, *rng);
                apply_pauli(state, pair.first, gate.q0);
                apply_pauli(state, pair.second, gate.q1);
            }
        }
    }
    return state;
}

std::string format_circuit(const CircuitSpec& circuit) {
    std::ostringstream out;
    out << "circuit n_q=" << circuit.n_q << " n_f=" << circuit.n_f
        << " n_theta=" << circuit.n_theta << " N_b=" << circuit.N_b << "\n";
    for (size_t i = 0; i < circuit.gates.size(); ++i) {
        const GateOp& gate = circuit.gates[i];
        out << "  " << i << ": ";
        if (gate.kind == GateKind::cnot) {
            out << "cnot q" << gate.q0 << " -> q" << gate.q1;
        } else {
            out << "r" << axis_name(gate.axis) << " q" << gate.q0 << " ";
            switch (gate.binding) {
                case BindingKind::feature: out << "z[" << gate.param_index << "]"; break;
                case BindingKind::theta: out << "theta[" << gate.param_index << "]"; break;
                case BindingKind::fixed: out << "angle=" << gate.fixed_angle; break;
            }
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace yomo
