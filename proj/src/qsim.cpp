#include "entanglekit/qsim.hpp"

#include <algorithm>
#include <cmath>

#include "entanglekit/features.hpp"

namespace entanglekit {

namespace {

/// Hadamard on one qubit of a dense register.
void apply_h(CVector& state, int qubit) {
    const Eigen::Index stride = Eigen::Index(1) << qubit;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (Eigen::Index base = 0; base < state.size(); base += 2 * stride)
        for (Eigen::Index k = 0; k < stride; ++k) {
            const Complex a = state[base + k];
            const Complex b = state[base + k + stride];
            state[base + k] = inv_sqrt2 * (a + b);
            state[base + k + stride] = inv_sqrt2 * (a - b);
        }
}

/// Phase gate diag(1, -i) on one qubit.
void apply_phase_minus_i(CVector& state, int qubit) {
    const Eigen::Index stride = Eigen::Index(1) << qubit;
    const Complex minus_i(0.0, -1.0);
    for (Eigen::Index base = 0; base < state.size(); base += 2 * stride)
        for (Eigen::Index k = 0; k < stride; ++k) state[base + k + stride] *= minus_i;
}

double p0_of(const CVector& state, int ancilla_qubit) {
    const Eigen::Index bit = Eigen::Index(1) << ancilla_qubit;
    double p0 = 0.0;
    for (Eigen::Index i = 0; i < state.size(); ++i)
        if (!(i & bit)) p0 += std::norm(state[i]);
    return p0;
}

int qubits_for_length(Eigen::Index len) {
    int n = 1;
    while ((Eigen::Index(1) << n) < len) ++n;
    return n;
}

}  // namespace

StateVector::StateVector(int n, CVector amps) : n_qubits(n), amplitudes(std::move(amps)) {
    if (n_qubits < 1 || n_qubits > kMaxRegisterQubits)
        throw CapacityError("state register must hold 1.." + std::to_string(kMaxRegisterQubits) +
                            " qubits");
    if (amplitudes.size() != (Eigen::Index(1) << n_qubits))
        throw DimensionError("statevector length must be 2^n");
    if (std::abs(amplitudes.norm() - 1.0) > 1e-12)
        throw ContractViolation("statevector must have unit norm");
}

StateVector encode(const RVector& x, int n_qubits) {
    const RVector amps = amplitude_prepare(x, n_qubits);
    return StateVector(n_qubits, amps.cast<Complex>());
}

double swap_test_p0(const StateVector& psi, const StateVector& phi) {
    if (psi.n_qubits != phi.n_qubits)
        throw DimensionError("swap_test: register sizes must match");
    const int n = psi.n_qubits;
    const int total = swap_test_register(n);
    if (total > kMaxRegisterQubits)
        throw CapacityError("swap_test register exceeds " + std::to_string(kMaxRegisterQubits) +
                            " qubits");

    // Layout: ancilla is the top bit, |psi> occupies bits [n, 2n), |phi> bits [0, n).
    const Eigen::Index dim_state = Eigen::Index(1) << n;
    CVector reg = CVector::Zero(Eigen::Index(1) << total);
    for (Eigen::Index i = 0; i < dim_state; ++i)
        for (Eigen::Index j = 0; j < dim_state; ++j)
            reg[(i << n) | j] = psi.amplitudes[i] * phi.amplitudes[j];

    apply_h(reg, 2 * n);
    // Controlled SWAP: in the ancilla=1 half, exchange the two registers.
    const Eigen::Index anc = Eigen::Index(1) << (2 * n);
    for (Eigen::Index i = 0; i < dim_state; ++i)
        for (Eigen::Index j = 0; j < i; ++j)
            std::swap(reg[anc | (i << n) | j], reg[anc | (j << n) | i]);
    apply_h(reg, 2 * n);

    return p0_of(reg, 2 * n);
}

double hadamard_test_p0(const StateVector& psi, const StateVector& phi, OverlapPart part) {
    if (psi.n_qubits != phi.n_qubits)
        throw DimensionError("hadamard_test: register sizes must match");
    const int n = psi.n_qubits;
    const int total = hadamard_test_register(n);
    if (total > kMaxRegisterQubits)
        throw CapacityError("hadamard_test register exceeds " +
                            std::to_string(kMaxRegisterQubits) + " qubits");

    // Ancilla is the top bit. After H the register is
    // (|0>|0..0> + |1>|0..0>)/sqrt(2); the controlled preparation pair
    // (U0 when ancilla=0, U1 when ancilla=1) then produces
    // (|0>|psi> + |1>|phi>)/sqrt(2), applied here as the isometry it is.
    const Eigen::Index dim_state = Eigen::Index(1) << n;
    CVector reg = CVector::Zero(Eigen::Index(1) << total);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (Eigen::Index i = 0; i < dim_state; ++i) {
        reg[i] = inv_sqrt2 * psi.amplitudes[i];
        reg[dim_state + i] = inv_sqrt2 * phi.amplitudes[i];
    }
    if (part == OverlapPart::Im) apply_phase_minus_i(reg, n);
    apply_h(reg, n);
    return p0_of(reg, n);
}

ShotPlan shots_required(double epsilon, double delta) {
    if (!(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0))
        throw std::domain_error("shots_required: epsilon and delta must lie in (0, 1)");
    const double nu = std::log(2.0 / delta) / (2.0 * epsilon * epsilon);
    return {epsilon, delta, static_cast<long>(std::ceil(nu))};
}

double sampled_kernel(const RVector& x, const RVector& y, long shots, RandomStream& rng) {
    if (shots < 1) throw ContractViolation("sampled_kernel: shots must be >= 1");
    const int n = qubits_for_length(std::max(x.size(), y.size()));
    const double p0 = swap_test_p0(encode(x, n), encode(y, n));
    long zeros = 0;
    for (long s = 0; s < shots; ++s)
        if (rng.bernoulli(p0)) ++zeros;
    const double estimate = 2.0 * (static_cast<double>(zeros) / static_cast<double>(shots)) - 1.0;
    return std::clamp(estimate, 0.0, 1.0);
}

}  // namespace entanglekit
