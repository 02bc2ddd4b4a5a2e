#include "yomo/noise.hpp"

#include <cstdlib>
#include <sstream>

#include "yomo/errors.hpp"

namespace yomo {

namespace {

// Single source of truth for the preset table. The doubles handed to the
// simulator and the CSV export are both derived from these exact strings.
struct PresetRow {
    const char* name;
    const char* p1;
    const char* p2;
};

constexpr PresetRow kPresetTable[] = {
    {"IBM_Pittsburgh", "2.02e-4", "1.69e-3"},
    {"Google Willow", "3.5e-4", "3.3e-3"},
    {"Quantinuum H1-1", "1.8e-5", "9.7e-4"},
    {"IonQ Forte", "2e-4", "4e-3"},
};

double parse_rate(const char* text) { return std::strtod(text, nullptr); }

void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ArgumentError(std::string(what) + " must lie in [0,1], got " + std::to_string(p));
    }
}

}  // namespace

std::vector<NoiseModel> presets() {
    std::vector<NoiseModel> out;
    out.reserve(std::size(kPresetTable));
    for (const PresetRow& row : kPresetTable) {
        out.push_back({row.name, parse_rate(row.p1), parse_rate(row.p2)});
    }
    return out;
}

NoiseModel preset_by_name(const std::string& name) {
    for (const PresetRow& row : kPresetTable) {
        if (name == row.name) return {row.name, parse_rate(row.p1), parse_rate(row.p2)};
    }
    std::ostringstream msg;
    msg << "unknown noise preset \"" << name << "\"; available:";
    for (const PresetRow& row : kPresetTable) msg << " \"" << row.name << "\"";
    throw ConfigError(msg.str());
}

std::string presets_csv() {
    std::ostringstream out;
    out << "name,p1,p2\n";
    for (const PresetRow& row : kPresetTable) {
        out << row.name << "," << row.p1 << "," << row.p2 << "\n";
    }
    return out.str();
}

PauliOp sample_noise_1q(double p1, RngStream& rng) {
    check_probability(p1, "p1");
    if (rng.next_double() >= p1) return PauliOp::I;
    switch (rng.next_below(3)) {
        case 0: return PauliOp::X;
        case 1: return PauliOp::Y;
        default: return PauliOp::Z;
    }
}

std::pair<PauliOp, PauliOp> sample_noise_2q(double p2, RngStream& rng) {
    check_probability(p2, "p2");
    if (rng.next_double() >= p2) return {PauliOp::I, PauliOp::I};
    // Index the 16 Pauli pairs as 4*a + b and skip 0 = (I,I).
    const uint64_t k = rng.next_below(15) + 1;
    return {static_cast<PauliOp>(k / 4), static_cast<PauliOp>(k % 4)};
}

std::vector<double> noisy_probabilities(const CircuitSpec& circuit, std::span<const double> z,
                                        std::span<const double> theta, const NoiseModel& noise,
                                        const NoiseEvalConfig& cfg) {
    if (cfg.trajectories < 1) {
        throw ConfigError("trajectories must be at least 1, got " +
                          std::to_string(cfg.trajectories));
    }
    const uint64_t dim = 1ULL << circuit.n_q;
    std::vector<double> mean(dim, 0.0);
    RngStream root(cfg.seed);
    for (int m = 0; m < cfg.trajectories; ++m) {
        RngStream traj = root.derive(static_cast<uint64_t>(m));
        const StateVector state = execute(circuit, z, theta, &noise, &traj);
        const std::vector<double> probs = probabilities(state);
        for (uint64_t i = 0; i < dim; ++i) mean[i] += probs[i];
    }
    const double inv = 1.0 / static_cast<double>(cfg.trajectories);
    for (double& v : mean) v *= inv;
    return mean;
}

namespace {

// Dense row-major density matrix. Gates and Pauli conjugations are applied by
// reusing the statevector kernels: U rho U^dag is U applied to every column,
// then (via conjugation) to every row.
using DensityMatrix = std::vector<complexd>;

template <typename ApplyGate>
void conjugate_density(DensityMatrix& rho, int n_q, ApplyGate&& apply_gate) {
    const uint64_t d = 1ULL << n_q;
    StateVector tmp;
    tmp.n_q = n_q;
    tmp.amplitudes.resize(d);
    for (uint64_t c = 0; c < d; ++c) {
        for (uint64_t r = 0; r < d; ++r) tmp.amplitudes[r] = rho[r * d + c];
        apply_gate(tmp);
        for (uint64_t r = 0; r < d; ++r) rho[r * d + c] = tmp.amplitudes[r];
    }
    // rho U^dag: row r maps as conj(U . conj(row_r)).
    for (uint64_t r = 0; r < d; ++r) {
        for (uint64_t c = 0; c < d; ++c) tmp.amplitudes[c] = std::conj(rho[r * d + c]);
        apply_gate(tmp);
        for (uint64_t c = 0; c < d; ++c) rho[r * d + c] = std::conj(tmp.amplitudes[c]);
    }
}

void depolarize_1q(DensityMatrix& rho, int n_q, int qubit, double p) {
    if (p <= 0.0) return;
    const DensityMatrix input = rho;
    for (complexd& v : rho) v *= 1.0 - p;
    for (PauliOp pauli : {PauliOp::X, PauliOp::Y, PauliOp::Z}) {
        DensityMatrix term = input;
        conjugate_density(term, n_q, [&](StateVector& s) { apply_pauli(s, pauli, qubit); });
        for (size_t i = 0; i < rho.size(); ++i) rho[i] += (p / 3.0) * term[i];
    }
}

void depolarize_2q(DensityMatrix& rho, int n_q, int q0, int q1, double p) {
    if (p <= 0.0) return;
    const DensityMatrix input = rho;
    for (complexd& v : rho) v *= 1.0 - p;
    for (int k = 1; k < 16; ++k) {
        const PauliOp a = static_cast<PauliOp>(k / 4);
        const PauliOp b = static_cast<PauliOp>(k % 4);
        DensityMatrix term = input;
        conjugate_density(term, n_q, [&](StateVector& s) {
            if (a != PauliOp::I) apply_pauli(s, a, q0);
            if (b != PauliOp::I) apply_pauli(s, b, q1);
        });
        for (size_t i = 0; i < rho.size(); ++i) rho[i] += (p / 15.0) * term[i];
    }
}

}  // namespace

std::vector<double> density_matrix_probabilities(const CircuitSpec& circuit,
                                                 std::span<const double> z,
                                                 std::span<const double> theta,
                                                 const NoiseModel& noise) {
    if (circuit.n_q > 6) {
        throw ConfigError("density-matrix evaluation is capped at 6 qubits, got " +
                          std::to_string(circuit.n_q));
    }
    if (static_cast<int>(z.size()) != circuit.n_f) {
        throw ArgumentError("density_matrix_probabilities: expected " +
                            std::to_string(circuit.n_f) + " features, got " +
                            std::to_string(z.size()));
    }
    if (static_cast<int>(theta.size()) != circuit.n_theta) {
        throw ArgumentError("density_matrix_probabilities: expected " +
                            std::to_string(circuit.n_theta) + " thetas, got " +
                            std::to_string(theta.size()));
    }
    check_probability(noise.p1, "p1");
    check_probability(noise.p2, "p2");

    const uint64_t d = 1ULL << circuit.n_q;
    DensityMatrix rho(d * d, complexd(0.0, 0.0));
    rho[0] = 1.0;  // |0...0><0...0|
    for (const GateOp& gate : circuit.gates) {
        if (gate.kind == GateKind::rotation) {
            const double angle = gate_angle(gate, z, theta);
            conjugate_density(rho, circuit.n_q,
                              [&](StateVector& s) { apply_rotation(s, gate.axis, gate.q0, angle); });
            depolarize_1q(rho, circuit.n_q, gate.q0, noise.p1);
        } else {
            conjugate_density(rho, circuit.n_q,
                              [&](StateVector& s) { apply_cnot(s, gate.q0, gate.q1); });
            depolarize_2q(rho, circuit.n_q, gate.q0, gate.q1, noise.p2);
        }
    }
    std::vector<double> diag(d);
    for (uint64_t i = 0; i < d; ++i) diag[i] = rho[i * d + i].real();
    return diag;
}

}  // namespace yomo
