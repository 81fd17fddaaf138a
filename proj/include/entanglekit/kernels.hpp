#pragma once

#include <string>

#include "entanglekit/qstate.hpp"

namespace entanglekit {

enum class KernelKind { Amplitude, Poly, Rbf, Sigmoid };

const char* kernel_kind_name(KernelKind k);
KernelKind kernel_kind_from_name(const std::string& name);

struct KernelSpec {
    KernelKind kind = KernelKind::Amplitude;
    double gamma = 1.0;
    int degree = 2;  // POLY only

    void validate() const {
        if (gamma <= 0.0) throw ContractViolation("kernel gamma must be positive");
        if (kind == KernelKind::Poly && (degree < 2 || degree > 7))
            throw ContractViolation("poly kernel degree must be in [2, 7]");
    }
    std::string to_string() const;
};

/// AMPLITUDE: (x.y / |x||y|)^2   POLY: gamma (x.y)^degree
/// RBF: exp(-gamma |x-y|^2)      SIGMOID: tanh(gamma x.y)
/// Dot products use compensated summation so the amplitude/poly-degree-2
/// identity holds entrywise to 1e-12 even for 625-dim inputs.
double kernel_eval(const KernelSpec& spec, const RVector& x, const RVector& y);

/// G[i][j] = k(X_i, Y_j); with Y omitted the symmetric matrix is built from
/// its upper triangle. Rows may be computed in parallel (`jobs`); the result
/// does not depend on the job count.
RMatrix gram_matrix(const KernelSpec& spec, const RMatrix& x_rows, int jobs = 1);
RMatrix gram_matrix(const KernelSpec& spec, const RMatrix& x_rows, const RMatrix& y_rows,
                    int jobs = 1);

/// Compensated (Neumaier) dot product; exposed for reuse in tests.
double compensated_dot(const RVector& x, const RVector& y);

}  // namespace entanglekit
