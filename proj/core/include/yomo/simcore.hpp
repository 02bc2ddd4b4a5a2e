#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "yomo/rng.hpp"

namespace yomo {

using complexd = std::complex<double>;

enum class Axis { x, y, z };
enum class PauliOp { I, X, Y, Z };

// Pure n_q-qubit state as a dense amplitude vector over the 2^n_q
// computational basis states. Basis index convention, fixed project-wide:
// qubit 0 is the MOST significant bit of the basis index, so |q0 q1 ... >
// reads left to right off the index bits.
struct StateVector {
    int n_q = 0;
    std::vector<complexd> amplitudes;

    uint64_t dim() const { return amplitudes.size(); }

    // Bit of `qubit` within basis index `i` under the MSB-first convention.
    int bit(uint64_t i, int qubit) const {
        return static_cast<int>((i >> (n_q - 1 - qubit)) & 1ULL);
    }
    uint64_t qubit_mask(int qubit) const { return 1ULL << (n_q - 1 - qubit); }
};

// Finite-shot measurement record: basis index -> observed count.
struct BitstringSample {
    std::map<uint64_t, uint64_t> counts;
    uint64_t total_shots = 0;
};

// |0...0> on n_q qubits. 1 <= n_q <= 20 (a 2^20 state is the memory guard).
StateVector init_zero(int n_q);

// exp(-i*angle/2 * P_axis) on the target qubit, in place over strided
// amplitude pairs.
void apply_rotation(StateVector& state, Axis axis, int qubit, double angle);

// CNOT with the given control and target (must differ).
void apply_cnot(StateVector& state, int control, int target);

// A bare Pauli X/Y/Z on the target qubit.
void apply_pauli(StateVector& state, PauliOp pauli, int qubit);

// |amplitude|^2 per basis state; sums to 1 for any unit state.
std::vector<double> probabilities(const StateVector& state);

// Euclidean norm of the amplitude vector.
double state_norm(const StateVector& state);

// n_shots i.i.d. computational-basis measurements, deterministic per stream.
BitstringSample sample_bitstrings(const StateVector& state, uint64_t n_shots, RngStream& rng);

// Same sampler over an explicit probability vector (used for noisy,
// trajectory-averaged distributions).
BitstringSample sample_bitstrings(const std::vector<double>& probs, uint64_t n_shots,
                                  RngStream& rng);

}  // namespace yomo
