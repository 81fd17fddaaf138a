#include <doctest.h>

#include "entanglekit/kernels.hpp"
#include "entanglekit/rng.hpp"

using namespace entanglekit;

namespace {

RMatrix random_rows(int n, int dim, std::uint64_t seed) {
    RandomStream rng(seed);
    RMatrix x(n, dim);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < dim; ++j) x(i, j) = rng.gaussian();
    return x;
}

RMatrix normalized_rows(const RMatrix& x) {
    RMatrix out = x;
    for (Eigen::Index i = 0; i < out.rows(); ++i) out.row(i) /= out.row(i).norm();
    return out;
}

}  // namespace

TEST_CASE("kernel_eval special values") {
    const KernelSpec amp{KernelKind::Amplitude, 1.0, 2};
    RVector x(3), y(3);
    x << 1, 2, 3;
    CHECK(kernel_eval(amp, x, x) == doctest::Approx(1.0).epsilon(1e-14));
    y << 2, -1, 0;  // orthogonal to x
    CHECK(kernel_eval(amp, x, y) == doctest::Approx(0.0).epsilon(1e-14));

    const KernelSpec rbf{KernelKind::Rbf, 3.7, 2};
    CHECK(kernel_eval(rbf, x, x) == doctest::Approx(1.0).epsilon(1e-15));

    const KernelSpec poly{KernelKind::Poly, 0.5, 3};
    CHECK(kernel_eval(poly, x, y) == doctest::Approx(0.0));
    RVector ones = RVector::Ones(3);
    CHECK(kernel_eval(poly, ones, ones) == doctest::Approx(0.5 * 27.0).epsilon(1e-14));

    const KernelSpec sig{KernelKind::Sigmoid, 0.1, 2};
    CHECK(kernel_eval(sig, x, y) == doctest::Approx(0.0));

    CHECK_THROWS_AS(kernel_eval(amp, x, RVector::Zero(4)), DimensionError);
    CHECK_THROWS_AS(kernel_eval(amp, x, RVector::Zero(3)), NormalizationError);
    KernelSpec bad{KernelKind::Poly, 1.0, 9};
    CHECK_THROWS_AS(kernel_eval(bad, x, y), ContractViolation);
}

TEST_CASE("kernel symmetry is exact and amplitude is scale invariant") {
    RandomStream rng(2);
    for (KernelKind kind :
         {KernelKind::Amplitude, KernelKind::Poly, KernelKind::Rbf, KernelKind::Sigmoid}) {
        const KernelSpec spec{kind, 0.73, 3};
        for (int rep = 0; rep < 50; ++rep) {
            RVector x(7), y(7);
            for (int i = 0; i < 7; ++i) {
                x[i] = rng.gaussian();
                y[i] = rng.gaussian();
            }
            CHECK(kernel_eval(spec, x, y) == kernel_eval(spec, y, x));  // bitwise
        }
    }
    const KernelSpec amp{KernelKind::Amplitude, 1.0, 2};
    for (int rep = 0; rep < 100; ++rep) {
        RVector x(9), y(9);
        for (int i = 0; i < 9; ++i) {
            x[i] = rng.gaussian();
            y[i] = rng.gaussian();
        }
        const double k = kernel_eval(amp, x, y);
        CHECK(k >= 0.0);
        CHECK(k <= 1.0 + 1e-15);
        CHECK(kernel_eval(amp, RVector(2.5 * x), RVector(0.03 * y)) ==
              doctest::Approx(k).epsilon(1e-12));
    }
}

TEST_CASE("single-vector gram and rbf gram shape") {
    const KernelSpec amp{KernelKind::Amplitude, 1.0, 2};
    RMatrix one = random_rows(1, 5, 3);
    const RMatrix g1 = gram_matrix(amp, one);
    CHECK(g1.rows() == 1);
    CHECK(g1(0, 0) == doctest::Approx(1.0).epsilon(1e-14));

    const KernelSpec rbf{KernelKind::Rbf, 0.2, 2};
    const RMatrix x = random_rows(20, 6, 4);
    const RMatrix g = gram_matrix(rbf, x);
    CHECK((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < 20; ++i) CHECK(g(i, i) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("amplitude gram equals poly(gamma=1, degree=2) on pre-normalized inputs") {
    const RMatrix x = random_rows(40, 625, 5);  // the widest vectors the pipeline sees
    const KernelSpec amp{KernelKind::Amplitude, 1.0, 2};
    const KernelSpec poly2{KernelKind::Poly, 1.0, 2};
    const RMatrix ga = gram_matrix(amp, x);
    const RMatrix gp = gram_matrix(poly2, normalized_rows(x));
    CHECK((ga - gp).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("amplitude, poly, rbf grams are PSD; sigmoid is exempt") {
    const RMatrix x = random_rows(20, 8, 6);
    for (KernelKind kind : {KernelKind::Amplitude, KernelKind::Poly, KernelKind::Rbf}) {
        const KernelSpec spec{kind, 0.5, 2};
        const RMatrix g = gram_matrix(spec, x);
        const RealEigResult eig = symmetric_eig(g);
        CHECK(eig.values.minCoeff() >= -1e-8);
    }
}

TEST_CASE("gram rows computed in parallel match the serial result bitwise") {
    const RMatrix x = random_rows(31, 17, 7);
    const RMatrix y = random_rows(13, 17, 8);
    for (KernelKind kind : {KernelKind::Amplitude, KernelKind::Rbf}) {
        const KernelSpec spec{kind, 1.3, 2};
        CHECK((gram_matrix(spec, x, 1) - gram_matrix(spec, x, 4)).cwiseAbs().maxCoeff() == 0.0);
        CHECK((gram_matrix(spec, x, y, 1) - gram_matrix(spec, x, y, 3)).cwiseAbs().maxCoeff() ==
              0.0);
    }
}

TEST_CASE("compensated dot survives adversarial cancellation") {
    RVector x(4), y(4);
    x << 1e16, 1.0, -1e16, 1.0;
    y << 1.0, 1.0, 1.0, 0.5;
    CHECK(compensated_dot(x, y) == doctest::Approx(1.5));
}
