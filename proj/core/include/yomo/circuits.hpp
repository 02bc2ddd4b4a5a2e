#pragma once

#include <span>
#include <string>
#include <vector>

#include "yomo/simcore.hpp"

namespace yomo {

struct NoiseModel;  // noise.hpp

enum class GateKind { rotation, cnot };

// Where a rotation gate takes its angle from.
enum class BindingKind { feature, theta, fixed };

struct GateOp {
    GateKind kind = GateKind::rotation;
    Axis axis = Axis::y;        // rotation only
    int q0 = 0;                 // rotation target / cnot control
    int q1 = 0;                 // cnot target
    BindingKind binding = BindingKind::fixed;
    int param_index = 0;        // feature or theta index
    double fixed_angle = 0.0;   // binding == fixed
};

// An ordered gate program. Immutable after construction; execution state is
// local to execute(), so specs can be shared across threads freely.
struct CircuitSpec {
    int n_q = 0;
    int n_f = 0;      // feature count consumed by the encoder part
    int n_theta = 0;  // trainable angle count (N_b * n_q for the standard ansatz)
    int N_b = 0;      // ansatz block count
    std::vector<GateOp> gates;
};

// How the encoder assigns rotation axes to feature gates. The layer cycle is
// the default: a full layer of R_y over all qubits, then R_z, then R_x. The
// per-gate cycle (axis = i mod 3) is an alternative reading kept behind this
// switch.
enum class EncoderAxisMode { layer_cycle, per_gate_cycle };

// Feature i -> rotation on qubit (i mod n_q); axis from the (y, z, x) cycle
// per EncoderAxisMode.
CircuitSpec build_encoder(int n_q, int n_f,
                          EncoderAxisMode axis_mode = EncoderAxisMode::layer_cycle);

// N_b blocks of [R_y(theta) on every qubit, then the CNOT ladder
// (0,1)(1,2)...(n_q-2, n_q-1)]. theta index = (block * n_q) + qubit.
CircuitSpec build_ansatz(int n_q, int N_b);

// Encoder gates followed by ansatz gates; qubit counts must match.
CircuitSpec compose(const CircuitSpec& encoder, const CircuitSpec& ansatz);

// Resolves a rotation gate's angle from the feature / theta vectors.
double gate_angle(const GateOp& gate, std::span<const double> z, std::span<const double> theta);

// Runs the program on |0...0>. With a noise model, a 1-qubit depolarizing
// draw follows every rotation and a 2-qubit draw follows every CNOT (both
// qubits); rng is required exactly when noise is given.
StateVector execute(const CircuitSpec& circuit, std::span<const double> z,
                    std::span<const double> theta, const NoiseModel* noise = nullptr,
                    RngStream* rng = nullptr);

// Plain-text gate listing for debugging and docs.
std::string format_circuit(const CircuitSpec& circuit);

}  // namespace yomo
