"""Bipartite entanglement classification toolkit (C++ core)."""

from entanglekit._core import (  # noqa: F401
    BipartiteDims,
    CalibrationError,
    CapacityError,
    ContractViolation,
    DimensionError,
    GenerationExhausted,
    KernelSpec,
    NormalizationError,
    PcaModel,
    RandomStream,
    SvmModel,
    amplitude_prepare,
    bloch_vector,
    decision_values,
    devectorize,
    fit_pca,
    frank_wolfe_nearest_separable,
    gram_matrix,
    gram_matrix_cross,
    hadamard_test_p0,
    hermitian_eig,
    is_ppt,
    kernel_eval,
    partial_transpose,
    pca_transform,
    purity,
    qubits_for,
    random_density,
    random_nppt,
    random_separable,
    sampled_kernel,
    schmidt_decompose,
    shots_required,
    stratified_kfold,
    svm_predict,
    svm_train,
    svm_train_on_gram,
    swap_test_p0,
    tensor_product,
    vectorize,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
