#include "entanglekit/features.hpp"

#include <cmath>

namespace entanglekit {

PcaModel fit_pca(const RMatrix& samples_by_row, int n_components) {
    const Eigen::Index n = samples_by_row.rows();
    const Eigen::Index dim = samples_by_row.cols();
    if (n_components < 1 || n_components > dim)
        throw DimensionError("fit_pca: n_components must be in [1, input_dim]");
    if (n < n_components)
        throw DimensionError("fit_pca: need at least n_components samples");

    PcaModel model;
    model.input_dim = static_cast<int>(dim);
    model.n_components = n_components;
    model.mean = samples_by_row.colwise().mean();
    RMatrix centered = samples_by_row.rowwise() - model.mean.transpose();
    RMatrix cov = (centered.transpose() * centered) / static_cast<double>(n - 1);

    RealEigResult eig = symmetric_eig(cov);
    model.components.resize(n_components, dim);
    model.explained_variance.resize(n_components);
    for (int k = 0; k < n_components; ++k) {
        RVector comp = eig.vectors.col(k);
        // Sign convention: the entry of largest magnitude is positive.
        Eigen::Index arg = 0;
        comp.cwiseAbs().maxCoeff(&arg);
        if (comp[arg] < 0.0) comp = -comp;
        model.components.row(k) = comp.transpose();
        model.explained_variance[k] = eig.values[k];
    }
    return model;
}

RVector pca_transform(const PcaModel& model, const RVector& x) {
    if (x.size() != model.input_dim)
        throw DimensionError("pca_transform: input length must match model.input_dim");
    return model.components * (x - model.mean);
}

RMatrix pca_transform(const PcaModel& model, const RMatrix& samples_by_row) {
    if (samples_by_row.cols() != model.input_dim)
        throw DimensionError("pca_transform: input width must match model.input_dim");
    return (samples_by_row.rowwise() - model.mean.transpose()) * model.components.transpose();
}

RVector amplitude_prepare(const RVector& x, int n_qubits) {
    if (n_qubits < 0 || n_qubits > 62) throw DimensionError("amplitude_prepare: bad qubit count");
    const Eigen::Index len = Eigen::Index(1) << n_qubits;
    if (x.size() > len)
        throw DimensionError("amplitude_prepare: vector does not fit in 2^n amplitudes");
    const double norm = x.norm();
    if (norm == 0.0) throw NormalizationError("amplitude_prepare: zero vector");
    RVector out = RVector::Zero(len);
    out.head(x.size()) = x / norm;
    return out;
}

QubitPlan qubits_for(int system_d, bool use_pca) {
    if (system_d < 2) throw DimensionError("qubits_for: system dimension must be >= 2");
    const double full_size = std::pow(static_cast<double>(system_d), 4);
    const int n_full = static_cast<int>(std::ceil(std::log2(full_size)));
    if (!use_pca) return {n_full, system_d * system_d * system_d * system_d};
    const int n = n_full - 1;
    return {n, 1 << n};
}

}  // namespace entanglekit
