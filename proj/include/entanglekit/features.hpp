#pragma once

#include "entanglekit/qstate.hpp"

namespace entanglekit {

/// Linear dimensionality reduction fitted on the training split only.
struct PcaModel {
    int input_dim = 0;
    int n_components = 0;
    RVector mean;
    RMatrix components;          // n_components x input_dim, orthonormal rows
    RVector explained_variance;  // descending
};

/// Mean-centered covariance eigendecomposition. Components carry a fixed
/// sign convention (largest-magnitude entry positive) so fitted models are
/// byte-reproducible.
PcaModel fit_pca(const RMatrix& samples_by_row, int n_components);

RVector pca_transform(const PcaModel& model, const RVector& x);
RMatrix pca_transform(const PcaModel& model, const RMatrix& samples_by_row);

/// Zero-pad to 2^n_qubits and normalize. Throws NormalizationError on the
/// zero vector, DimensionError when x does not fit.
RVector amplitude_prepare(const RVector& x, int n_qubits);

struct QubitPlan {
    int n_qubits;
    int n_components;  // 2^n_qubits when PCA is used, d^4 (raw size) otherwise
};

/// Qubit budget for a d x d bipartite system: full feature size is d^4;
/// the PCA strategy uses one qubit fewer than the full encoding needs.
QubitPlan qubits_for(int system_d, bool use_pca);

}  // namespace entanglekit
