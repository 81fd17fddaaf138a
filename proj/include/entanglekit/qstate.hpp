#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "entanglekit/errors.hpp"

namespace entanglekit {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Dimensions of a bipartite system; composite dimension is dA*dB.
struct BipartiteDims {
    int dA;
    int dB;

    BipartiteDims(int a, int b) : dA(a), dB(b) {
        if (a < 2 || b < 2) throw DimensionError("bipartite dims must each be >= 2");
    }
    int total() const { return dA * dB; }
};

enum class Subsystem { A, B };

/// Validated density matrix: Hermitian (1e-12), unit trace (1e-10),
/// positive semi-definite (min eigenvalue >= -1e-10).
class DensityMatrix {
public:
    static constexpr double kHermitianTol = 1e-12;
    static constexpr double kTraceTol = 1e-10;
    static constexpr double kPsdTol = 1e-10;

    explicit DensityMatrix(CMatrix m);

    int dim() const { return static_cast<int>(m_.rows()); }
    const CMatrix& matrix() const { return m_; }

private:
    CMatrix m_;
};

/// Schmidt decomposition of a bipartite pure state:
/// psi = sum_k coefficients[k] * left.col(k) (x) right.col(k).
/// Coefficients are descending; degenerate blocks are canonicalized by
/// pivot index so the output is deterministic.
struct SchmidtForm {
    RVector coefficients;  // descending, squares sum to 1 (up to rank cutoff)
    CMatrix left_vectors;   // dA x rank, orthonormal columns
    CMatrix right_vectors;  // dB x rank, orthonormal columns
    int rank;
};

/// Coherence-vector (Bloch) representation: rho = (I + r . G)/d with the
/// traceless Hermitian basis normalized so that |r|^2 = d tr(rho^2) - 1.
struct BlochVector {
    int dim;
    RVector components;  // length d^2 - 1
};

struct EigResult {
    RVector values;   // descending
    CMatrix vectors;  // orthonormal columns, vectors.col(k) <-> values[k]
};

/// Kronecker product of two square matrices; trace multiplies.
CMatrix tensor_product(const CMatrix& a, const CMatrix& b);

/// Partial transpose over subsystem A or B. Exact involution (pure index
/// permutation), preserves trace and Hermiticity.
CMatrix partial_transpose(const CMatrix& rho, const BipartiteDims& dims, Subsystem which);

/// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
/// Sweeps until the off-diagonal Frobenius norm drops below 1e-12
/// (at most 100 sweeps). Throws ContractViolation when the input is not
/// Hermitian to 1e-10.
EigResult hermitian_eig(const CMatrix& m);

/// Eigenvalues only, descending.
RVector hermitian_eigenvalues(const CMatrix& m);

/// Real symmetric variant (used for PCA covariances).
struct RealEigResult {
    RVector values;
    RMatrix vectors;
};
RealEigResult symmetric_eig(const RMatrix& m);

/// Minimum eigenvalue of the partial transpose >= -tol.
bool is_ppt(const CMatrix& rho, const BipartiteDims& dims, double tol = 1e-10);
bool is_ppt(const DensityMatrix& rho, const BipartiteDims& dims, double tol = 1e-10);

/// tr(rho^2); 1 iff pure, >= 1/d.
double purity(const CMatrix& rho);
inline double purity(const DensityMatrix& rho) { return purity(rho.matrix()); }

SchmidtForm schmidt_decompose(const CVector& psi, const BipartiteDims& dims);

/// Real embedding of a Hermitian matrix: d diagonal entries, then
/// sqrt(2)*Re(upper triangle), then sqrt(2)*Im(upper triangle), both in
/// row-major (row, column) order. Isometry: dot(vec(rho), vec(sigma)) = tr(rho sigma).
RVector vectorize(const CMatrix& rho);
inline RVector vectorize(const DensityMatrix& rho) { return vectorize(rho.matrix()); }

/// Inverse of vectorize.
CMatrix devectorize(const RVector& v);

/// Generalized Gell-Mann basis for dimension d, normalized tr(Gi Gj) = 2 dij;
/// ordering: symmetric off-diagonal (row-major), antisymmetric, diagonal.
std::vector<CMatrix> gell_mann_basis(int d);

BlochVector bloch_vector(const CMatrix& rho);
inline BlochVector bloch_vector(const DensityMatrix& rho) { return bloch_vector(rho.matrix()); }

/// Rebuilds the density matrix from its Bloch components.
CMatrix bloch_reconstruct(const BlochVector& r);

}  // namespace entanglekit
