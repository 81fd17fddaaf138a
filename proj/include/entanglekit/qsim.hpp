#pragma once

#include "entanglekit/qstate.hpp"
#include "entanglekit/rng.hpp"

namespace entanglekit {

/// Dense statevector of an n-qubit register, unit norm.
struct StateVector {
    int n_qubits = 0;
    CVector amplitudes;

    StateVector(int n, CVector amps);
};

/// Registers the test circuits occupy (state qubits plus ancilla).
constexpr int swap_test_register(int n_qubits) { return 2 * n_qubits + 1; }
constexpr int hadamard_test_register(int n_qubits) { return n_qubits + 1; }

/// Largest simulable register: covers the 9-qubit encodings, whose swap
/// test needs 2*9+1 qubits.
constexpr int kMaxRegisterQubits = 20;

/// Amplitude-encode a real vector (pad to 2^n, normalize); imaginary parts zero.
StateVector encode(const RVector& x, int n_qubits);

/// Exact simulation of the swap-test circuit (H on the ancilla,
/// controlled-SWAP of the two registers, H, measure): returns
/// p0 = (1 + |<psi|phi>|^2) / 2.
double swap_test_p0(const StateVector& psi, const StateVector& phi);

enum class OverlapPart { Re, Im };

/// Exact simulation of the Hadamard-test circuit. The controlled state
/// preparation pair is applied as the isometry it denotes; the remaining
/// gates (S on the Im branch, final H) act on the full register. Returns
/// p0 = (1 + Re<psi|phi>)/2 or (1 + Im<psi|phi>)/2.
double hadamard_test_p0(const StateVector& psi, const StateVector& phi, OverlapPart part);

struct ShotPlan {
    double epsilon;
    double delta;
    long shots;  // ceil(ln(2/delta) / (2 epsilon^2))
};

ShotPlan shots_required(double epsilon, double delta);

/// Finite-shot estimate of the amplitude kernel: `shots` Bernoulli draws at
/// the exact swap-test p0, returning 2*p0_hat - 1 clamped to [0, 1].
double sampled_kernel(const RVector& x, const RVector& y, long shots, RandomStream& rng);

}  // namespace entanglekit
