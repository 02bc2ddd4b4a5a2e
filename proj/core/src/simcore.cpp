#include "yomo/simcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "yomo/errors.hpp"

namespace yomo {

namespace {

void check_qubit(const StateVector& state, int qubit, const char* what) {
    if (qubit < 0 || qubit >= state.n_q) {
        throw IndexError(std::string(what) + " qubit index " + std::to_string(qubit) +
                         " out of range for n_q=" + std::to_string(state.n_q));
    }
}

// Applies the 2x2 matrix [[u00,u01],[u10,u11]] to the target qubit.
void apply_single_qubit(StateVector& state, int qubit, complexd u00, complexd u01, complexd u10,
                        complexd u11) {
    const uint64_t dim = state.dim();
    const uint64_t step = state.qubit_mask(qubit);
    complexd* amp = state.amplitudes.data();
    for (uint64_t base = 0; base < dim; base += 2 * step) {
        for (uint64_t i = base; i < base + step; ++i) {
            const complexd a = amp[i];
            const complexd b = amp[i + step];
            amp[i] = u00 * a + u01 * b;
            amp[i + step] = u10 * a + u11 * b;
        }
    }
}

}  // namespace

StateVector init_zero(int n_q) {
    if (n_q < 1 || n_q > 20) {
        throw ConfigError("n_q must be between 1 and 20, got " + std::to_string(n_q));
    }
    StateVector state;
    state.n_q = n_q;
    state.amplitudes.assign(uint64_t{1} << n_q, complexd{0.0, 0.0});
    state.amplitudes[0] = complexd{1.0, 0.0};
    return state;
}

void apply_rotation(StateVector& state, Axis axis, int qubit, double angle) {
    check_qubit(state, qubit, "rotation");
    if (!std::isfinite(angle)) throw ArgumentError("rotation angle must be finite");
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    switch (axis) {
        case Axis::x:
            apply_single_qubit(state, qubit, {c, 0}, {0, -s}, {0, -s}, {c, 0});
            break;
        case Axis::y:
            apply_single_qubit(state, qubit, {c, 0}, {-s, 0}, {s, 0}, {c, 0});
            break;
        case Axis::z:
            apply_single_qubit(state, qubit, {c, -s}, {0, 0}, {0, 0}, {c, s});
            break;
    }
}

void apply_cnot(StateVector& state, int control, int target) {
    check_qubit(state, control, "cnot control");
    check_qubit(state, target, "cnot target");
    if (control == target) {
        throw IndexError("cnot control and target must differ, both are " +
                         std::to_string(control));
    }
    const uint64_t cmask = state.qubit_mask(control);
    const uint64_t tmask = state.qubit_mask(target);
    const uint64_t dim = state.dim();
    complexd* amp = state.amplitudes.data();
    for (uint64_t i = 0; i < dim; ++i) {
        if ((i & cmask) != 0 && (i & tmask) == 0) {
            std::swap(amp[i], amp[i | tmask]);
        }
    }
}

void apply_pauli(StateVector& state, PauliOp pauli, int qubit) {
    if (pauli == PauliOp::I) return;
    check_qubit(state, qubit, "pauli");
    const uint64_t dim = state.dim();
    const uint64_t step = state.qubit_mask(qubit);
    complexd* amp = state.amplitudes.data();
    for (uint64_t base = 0; base < dim; base += 2 * step) {
        for (uint64_t i = base; i < base + step; ++i) {
            complexd& a0 = amp[i];
            complexd& a1 = amp[i + step];
            switch (pauli) {
                case PauliOp::X:
                    std::swap(a0, a1);
                    break;
                case PauliOp::Y: {
                    const complexd t = a0;
                    a0 = complexd{0, -1} * a1;
                    a1 = complexd{0, 1} * t;
                    break;
                }
                case PauliOp::Z:
                    a1 = -a1;
                    break;
                case PauliOp::I:
                    break;
            }
        }
    }
}

std::vector<double> probabilities(const StateVector& state) {
    std::vector<double> probs(state.dim());
    for (uint64_t i = 0; i < state.dim(); ++i) probs[i] = std::norm(state.amplitudes[i]);
    return probs;
}

double state_norm(const StateVector& state) {
    double sum = 0.0;
    for (const complexd& a : state.amplitudes) sum += std::norm(a);
    return std::sqrt(sum);
}

BitstringSample sample_bitstrings(const std::vector<double>& probs, uint64_t n_shots,
                                  RngStream& rng) {
    if (n_shots == 0) throw ArgumentError("n_shots must be at least 1");
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        cdf[i] = acc;
    }
    BitstringSample sample;
    sample.total_shots = n_shots;
    for (uint64_t s = 0; s < n_shots; ++s) {
        const double u = rng.next_double() * acc;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        uint64_t idx = static_cast<uint64_t>(it - cdf.begin());
        if (idx >= probs.size()) idx = probs.size() - 1;
        ++sample.counts[idx];
    }
    return sample;
}

BitstringSample sample_bitstrings(const StateVector& state, uint64_t n_shots, RngStream& rng) {
    return sample_bitstrings(probabilities(state), n_shots, rng);
}

}  // namespace yomo
