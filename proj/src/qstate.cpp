#include "entanglekit/qstate.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace entanglekit {

namespace {

double max_hermiticity_defect(const CMatrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline double conjugate(double x) { return x; }
inline Complex conjugate(const Complex& z) { return std::conj(z); }

// One cyclic-by-row Jacobi pass over all (p, q) pairs. Works for
// double (symmetric) and std::complex<double> (Hermitian) scalars.
template <typename Scalar>
void jacobi_sweep(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a,
                  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& v,
                  double skip_threshold) {
    const Eigen::Index n = a.rows();
    for (Eigen::Index p = 0; p < n - 1; ++p) {
        for (Eigen::Index q = p + 1; q < n; ++q) {
            const Scalar apq = a(p, q);
            const double mag = std::abs(apq);
            if (mag <= skip_threshold) continue;

            const double app = std::real(a(p, p));
            const double aqq = std::real(a(q, q));
            const Scalar phase = apq / mag;  // unit modulus

            // Zero a(p,q) with the unitary [[c, -s], [conj(phase) s, conj(phase) c]]
            // acting on columns (p, q); t is the smaller root of t^2 - 2 tau t - 1.
            const double tau = (aqq - app) / (2.0 * mag);
            double t;
            if (tau >= 0.0)
                t = -1.0 / (tau + std::sqrt(1.0 + tau * tau));
            else
                t = 1.0 / (-tau + std::sqrt(1.0 + tau * tau));
            const double c = 1.0 / std::sqrt(1.0 + t * t);
            const double s = t * c;

            const Scalar jpp = Scalar(c);
            const Scalar jpq = Scalar(-s);
            const Scalar jqp = conjugate(phase) * s;
            const Scalar jqq = conjugate(phase) * c;

            // a <- J^dagger a J
            for (Eigen::Index i = 0; i < n; ++i) {
                const Scalar aip = a(i, p);
                const Scalar aiq = a(i, q);
                a(i, p) = aip * jpp + aiq * jqp;
                a(i, q) = aip * jpq + aiq * jqq;
            }
            for (Eigen::Index i = 0; i < n; ++i) {
                const Scalar api = a(p, i);
                const Scalar aqi = a(q, i);
                a(p, i) = conjugate(jpp) * api + conjugate(jqp) * aqi;
                a(q, i) = conjugate(jpq) * api + conjugate(jqq) * aqi;
            }
            for (Eigen::Index i = 0; i < n; ++i) {
                const Scalar vip = v(i, p);
                const Scalar viq = v(i, q);
                v(i, p) = vip * jpp + viq * jqp;
                v(i, q) = vip * jpq + viq * jqq;
            }
        }
    }
}

template <typename Scalar>
double off_diagonal_norm(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a) {
    const Eigen::Index n = a.rows();
    double sum = 0.0;
    for (Eigen::Index p = 0; p < n - 1; ++p)
        for (Eigen::Index q = p + 1; q < n; ++q) sum += std::norm(a(p, q));
    return std::sqrt(2.0 * sum);
}

constexpr int kMaxSweeps = 100;
constexpr double kOffDiagonalTol = 1e-12;

template <typename Scalar>
void jacobi_eig(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a,
                RVector& values,
                Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& vectors) {
    const Eigen::Index n = a.rows();
    vectors.setIdentity(n, n);
    // Skipping rotations below tol/sqrt(n(n-1)) cannot keep the off-diagonal
    // norm above the target.
    const double skip = kOffDiagonalTol / std::sqrt(static_cast<double>(n) * (n - 1) + 1.0);
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        if (off_diagonal_norm(a) < kOffDiagonalTol) break;
        jacobi_sweep(a, vectors, skip);
    }
    // Sort descending; stable so equal eigenvalues keep sweep order.
    std::vector<Eigen::Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
        return std::real(a(i, i)) > std::real(a(j, j));
    });
    values.resize(n);
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> sorted(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        values[k] = std::real(a(order[static_cast<size_t>(k)], order[static_cast<size_t>(k)]));
        sorted.col(k) = vectors.col(order[static_cast<size_t>(k)]);
    }
    vectors = std::move(sorted);
}

}  // namespace

DensityMatrix::DensityMatrix(CMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1)
        throw DimensionError("density matrix must be square and non-empty");
    if (max_hermiticity_defect(m_) > kHermitianTol)
        throw ContractViolation("density matrix is not Hermitian to 1e-12");
    if (std::abs(m_.trace() - Complex(1.0, 0.0)) > kTraceTol)
        throw ContractViolation("density matrix trace differs from 1 by more than 1e-10");
    // LLT of m + tol*I succeeds iff min eigenvalue >= -tol (up to rounding);
    // cheaper than a full eigensolve on the generation hot path.
    CMatrix shifted = m_ + kPsdTol * CMatrix::Identity(m_.rows(), m_.cols());
    Eigen::LLT<CMatrix> llt(shifted);
    if (llt.info() != Eigen::Success) {
        // Rounding near the boundary: fall back to the exact spectral check.
        if (hermitian_eigenvalues(m_).minCoeff() < -kPsdTol)
            throw ContractViolation("density matrix has eigenvalue below -1e-10");
    }
}

CMatrix tensor_product(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols())
        throw DimensionError("tensor_product requires square factors");
    const Eigen::Index m = a.rows(), n = b.rows();
    CMatrix out(m * n, m * n);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            out.block(i * n, j * n, n, n) = a(i, j) * b;
    return out;
}

CMatrix partial_transpose(const CMatrix& rho, const BipartiteDims& dims, Subsystem which) {
    const int dA = dims.dA, dB = dims.dB;
    if (rho.rows() != rho.cols() || rho.rows() != dims.total())
        throw DimensionError("partial_transpose: matrix dimension must equal dA*dB");
    CMatrix out(rho.rows(), rho.cols());
    for (int a = 0; a < dA; ++a)
        for (int b = 0; b < dB; ++b)
            for (int ap = 0; ap < dA; ++ap)
                for (int bp = 0; bp < dB; ++bp) {
                    const int row = a * dB + b, col = ap * dB + bp;
                    if (which == Subsystem::B)
                        out(a * dB + bp, ap * dB + b) = rho(row, col);
                    else
                        out(ap * dB + b, a * dB + bp) = rho(row, col);
                }
    return out;
}

EigResult hermitian_eig(const CMatrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("hermitian_eig requires a square matrix");
    if (max_hermiticity_defect(m) > 1e-10)
        throw ContractViolation("hermitian_eig: input is not Hermitian to 1e-10");
    EigResult r;
    CMatrix vectors;
    jacobi_eig<Complex>(m, r.values, vectors);
    r.vectors = std::move(vectors);
    return r;
}

RVector hermitian_eigenvalues(const CMatrix& m) { return hermitian_eig(m).values; }

RealEigResult symmetric_eig(const RMatrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("symmetric_eig requires a square matrix");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw ContractViolation("symmetric_eig: input is not symmetric to 1e-10");
    RealEigResult r;
    RMatrix vectors;
    jacobi_eig<double>(m, r.values, vectors);
    r.vectors = std::move(vectors);
    return r;
}

bool is_ppt(const CMatrix& rho, const BipartiteDims& dims, double tol) {
    if (tol < 0.0) throw ContractViolation("is_ppt: tolerance must be >= 0");
    const CMatrix pt = partial_transpose(rho, dims, Subsystem::B);
    // Cholesky of pt + tol*I succeeds iff min eigenvalue >= -tol (up to
    // factorization rounding); orders of magnitude cheaper than an
    // eigensolve on the rejection-sampling path.
    CMatrix shifted = pt + tol * CMatrix::Identity(pt.rows(), pt.cols());
    Eigen::LLT<CMatrix> llt(shifted);
    return llt.info() == Eigen::Success;
}

bool is_ppt(const DensityMatrix& rho, const BipartiteDims& dims, double tol) {
    return is_ppt(rho.matrix(), dims, tol);
}

double purity(const CMatrix& rho) {
    // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return rho.squaredNorm();
}

SchmidtForm schmidt_decompose(const CVector& psi, const BipartiteDims& dims) {
    const int dA = dims.dA, dB = dims.dB;
    if (psi.size() != dims.total())
        throw DimensionError("schmidt_decompose: vector length must equal dA*dB");
    if (std::abs(psi.norm() - 1.0) > 1e-10)
        throw ContractViolation("schmidt_decompose: state vector must be normalized");

    // psi[(a,b)] = C(a,b); left vectors are eigenvectors of C C^dagger.
    CMatrix c(dA, dB);
    for (int a = 0; a < dA; ++a)
        for (int b = 0; b < dB; ++b) c(a, b) = psi[a * dB + b];

    EigResult eig = hermitian_eig(c * c.adjoint());

    // Coefficients below 1e-6 are numerically zero at the precision the
    // Jacobi eigenvalues carry for a unit-norm state.
    constexpr double kCoeffCutoff = 1e-6;
    int rank = 0;
    std::vector<double> coeffs;
    for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
        const double s = std::sqrt(std::max(eig.values[k], 0.0));
        if (s <= kCoeffCutoff) break;
        coeffs.push_back(s);
        ++rank;
    }

    CMatrix left = eig.vectors.leftCols(rank);

    // Canonicalize degenerate blocks: rebuild each equal-coefficient
    // eigenspace from the standard basis so ties resolve to the
    // lexicographically smallest pivot index, then fix phases so the pivot
    // entry is real positive.
    constexpr double kTieTol = 1e-10;
    constexpr double kPivotTol = 1e-6;
    int g0 = 0;
    while (g0 < rank) {
        int g1 = g0 + 1;
        while (g1 < rank && std::abs(coeffs[static_cast<size_t>(g1)] - coeffs[static_cast<size_t>(g0)]) <= kTieTol)
            ++g1;
        const int gsize = g1 - g0;
        if (gsize > 1) {
            CMatrix block = left.middleCols(g0, gsize);
            CMatrix projector = block * block.adjoint();
            int filled = 0;
            for (int e = 0; e < dA && filled < gsize; ++e) {
                CVector cand = projector.col(e);
                for (int k = 0; k < filled; ++k)
                    cand -= block.col(k).dot(cand) * block.col(k);
                const double nrm = cand.norm();
                if (nrm > kPivotTol) block.col(filled++) = cand / nrm;
            }
            if (filled == gsize) left.middleCols(g0, gsize) = block;
        }
        g0 = g1;
    }
    for (int k = 0; k < rank; ++k) {
        int pivot = 0;
        while (pivot < dA - 1 && std::abs(left(pivot, k)) <= kPivotTol) ++pivot;
        const Complex ph = left(pivot, k) / std::abs(left(pivot, k));
        left.col(k) *= std::conj(ph);
    }

    SchmidtForm out;
    out.rank = rank;
    out.coefficients = Eigen::Map<RVector>(coeffs.data(), rank);
    out.left_vectors = left;
    out.right_vectors.resize(dB, rank);
    // psi = sum_k s_k u_k (x) v_k requires v_k = (C^T conj(u_k)) / s_k.
    for (int k = 0; k < rank; ++k)
        out.right_vectors.col(k) = (c.transpose() * left.col(k).conjugate()) / coeffs[static_cast<size_t>(k)];
    return out;
}

RVector vectorize(const CMatrix& rho) {
    const Eigen::Index d = rho.rows();
    if (d != rho.cols()) throw DimensionError("vectorize requires a square matrix");
    RVector v(d * d);
    Eigen::Index pos = 0;
    for (Eigen::Index i = 0; i < d; ++i) v[pos++] = std::real(rho(i, i));
    const double s = std::sqrt(2.0);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i + 1; j < d; ++j) v[pos++] = s * std::real(rho(i, j));
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i + 1; j < d; ++j) v[pos++] = s * std::imag(rho(i, j));
    return v;
}

CMatrix devectorize(const RVector& v) {
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (d * d != v.size()) throw DimensionError("devectorize: length must be a perfect square");
    CMatrix m(d, d);
    Eigen::Index pos = 0;
    for (Eigen::Index i = 0; i < d; ++i) m(i, i) = v[pos++];
    const double inv = 1.0 / std::sqrt(2.0);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i + 1; j < d; ++j) {
            m(i, j) = v[pos] * inv;
            m(j, i) = v[pos] * inv;
            ++pos;
        }
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i + 1; j < d; ++j) {
            m(i, j) += Complex(0.0, v[pos] * inv);
            m(j, i) -= Complex(0.0, v[pos] * inv);
            ++pos;
        }
    return m;
}

std::vector<CMatrix> gell_mann_basis(int d) {
    if (d < 2) throw DimensionError("gell_mann_basis requires d >= 2");
    std::vector<CMatrix> basis;
    basis.reserve(static_cast<size_t>(d) * d - 1);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            CMatrix g = CMatrix::Zero(d, d);
            g(i, j) = 1.0;
            g(j, i) = 1.0;
            basis.push_back(std::move(g));
        }
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            CMatrix g = CMatrix::Zero(d, d);
            g(i, j) = Complex(0.0, -1.0);
            g(j, i) = Complex(0.0, 1.0);
            basis.push_back(std::move(g));
        }
    for (int l = 1; l < d; ++l) {
        CMatrix g = CMatrix::Zero(d, d);
        const double scale = std::sqrt(2.0 / (static_cast<double>(l) * (l + 1)));
        for (int k = 0; k < l; ++k) g(k, k) = scale;
        g(l, l) = -scale * l;
        basis.push_back(std::move(g));
    }
    return basis;
}

BlochVector bloch_vector(const CMatrix& rho) {
    const int d = static_cast<int>(rho.rows());
    if (d != rho.cols()) throw DimensionError("bloch_vector requires a square matrix");
    const auto basis = gell_mann_basis(d);
    BlochVector out;
    out.dim = d;
    out.components.resize(d * d - 1);
    // r_i = sqrt(d/2) tr(lambda_i rho): scales the 2-normalized basis so
    // that |r|^2 = d tr(rho^2) - 1 and |r| <= sqrt(d-1).
    const double scale = std::sqrt(d / 2.0);
    for (size_t i = 0; i < basis.size(); ++i)
        out.components[static_cast<Eigen::Index>(i)] =
            scale * std::real((basis[i] * rho).trace());
    return out;
}

CMatrix bloch_reconstruct(const BlochVector& r) {
    const int d = r.dim;
    if (r.components.size() != static_cast<Eigen::Index>(d) * d - 1)
        throw DimensionError("bloch_reconstruct: component count must be d^2-1");
    const auto basis = gell_mann_basis(d);
    CMatrix m = CMatrix::Identity(d, d);
    const double scale = std::sqrt(d / 2.0);
    for (size_t i = 0; i < basis.size(); ++i)
        m += (scale * r.components[static_cast<Eigen::Index>(i)]) * basis[i];
    return m / static_cast<double>(d);
}

}  // namespace entanglekit
