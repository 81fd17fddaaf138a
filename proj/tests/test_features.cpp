#include <doctest.h>

#include "entanglekit/datagen.hpp"
#include "entanglekit/features.hpp"

using namespace entanglekit;

TEST_CASE("fit_pca recovers an exact low-dimensional subspace") {
    RandomStream rng(1);
    const int dim = 12, sub = 3, n = 40;
    RMatrix basis(sub, dim);
    for (int i = 0; i < sub; ++i)
        for (int j = 0; j < dim; ++j) basis(i, j) = rng.gaussian();
    RMatrix x(n, dim);
    for (int i = 0; i < n; ++i) {
        RVector coeff(sub);
        for (int k = 0; k < sub; ++k) coeff[k] = rng.gaussian();
        x.row(i) = (basis.transpose() * coeff).transpose();
    }
    const PcaModel model = fit_pca(x, sub);
    // reconstruction through the component space is exact
    for (int i = 0; i < n; ++i) {
        const RVector z = pca_transform(model, RVector(x.row(i)));
        const RVector back = model.components.transpose() * z + model.mean;
        CHECK((back - x.row(i).transpose()).norm() < 1e-9);
    }
}

TEST_CASE("fit_pca handles the 81-dimensional 3x3 configuration") {
    RandomStream rng(2);
    const int n = 120;
    RMatrix x(n, 81);
    for (int i = 0; i < n; ++i) x.row(i) = vectorize(random_density(9, rng)).transpose();
    const PcaModel model = fit_pca(x, 64);
    CHECK(model.n_components == 64);
    CHECK(model.input_dim == 81);
    // components orthonormal
    const RMatrix gram = model.components * model.components.transpose();
    CHECK((gram - RMatrix::Identity(64, 64)).cwiseAbs().maxCoeff() < 1e-9);
    // training projections have zero mean per component
    const RMatrix z = pca_transform(model, x);
    CHECK(z.colwise().mean().cwiseAbs().maxCoeff() < 1e-9);
    CHECK_THROWS_AS(fit_pca(x, 82), DimensionError);
}

TEST_CASE("explained variance equals the variance of projections") {
    RandomStream rng(3);
    const int n = 60, dim = 10;
    RMatrix x(n, dim);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < dim; ++j) x(i, j) = rng.gaussian() * (1.0 + j);
    const PcaModel model = fit_pca(x, 5);
    const RMatrix z = pca_transform(model, x);
    for (int k = 0; k < 5; ++k) {
        // oracle: unbiased variance computed directly on the projections
        const double mean = z.col(k).mean();
        const double var = (z.col(k).array() - mean).square().sum() / (n - 1);
        CHECK(model.explained_variance[k] == doctest::Approx(var).epsilon(1e-9));
        if (k > 0) CHECK(model.explained_variance[k] <= model.explained_variance[k - 1]);
    }
}

TEST_CASE("pca_transform centering, unit responses, and contraction") {
    RandomStream rng(4);
    const int n = 50, dim = 8;
    RMatrix x(n, dim);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < dim; ++j) x(i, j) = rng.gaussian();
    const PcaModel model = fit_pca(x, 4);

    CHECK(pca_transform(model, model.mean).norm() < 1e-12);

    const RVector c0 = model.components.row(0).transpose() + model.mean;
    const RVector e = pca_transform(model, c0);
    CHECK(e[0] == doctest::Approx(1.0).epsilon(1e-9));
    for (int k = 1; k < 4; ++k) CHECK(std::abs(e[k]) < 1e-9);

    for (int rep = 0; rep < 50; ++rep) {
        RVector probe(dim);
        for (int j = 0; j < dim; ++j) probe[j] = rng.gaussian();
        CHECK(pca_transform(model, probe).norm() <=
              (probe - model.mean).norm() + 1e-9);
    }
    CHECK_THROWS_AS(pca_transform(model, RVector(RVector::Zero(dim + 1))), DimensionError);
}

TEST_CASE("pca components carry the positive-max sign convention") {
    RandomStream rng(5);
    RMatrix x(30, 6);
    for (int i = 0; i < 30; ++i)
        for (int j = 0; j < 6; ++j) x(i, j) = rng.gaussian();
    const PcaModel model = fit_pca(x, 6);
    for (int k = 0; k < 6; ++k) {
        Eigen::Index arg = 0;
        model.components.row(k).cwiseAbs().maxCoeff(&arg);
        CHECK(model.components(k, arg) > 0.0);
    }
}

TEST_CASE("amplitude_prepare normalization, padding, and errors") {
    RVector v(2);
    v << 3.0, 4.0;
    const RVector out = amplitude_prepare(v, 1);
    CHECK(out[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(out[1] == doctest::Approx(0.8).epsilon(1e-15));

    RandomStream rng(6);
    RVector x81(81);
    for (int i = 0; i < 81; ++i) x81[i] = rng.gaussian();
    const RVector padded = amplitude_prepare(x81, 7);
    CHECK(padded.size() == 128);
    CHECK(padded.norm() == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 81; i < 128; ++i) CHECK(padded[i] == 0.0);

    RVector unit = RVector::Zero(4);
    unit[2] = 1.0;
    CHECK((amplitude_prepare(unit, 2) - unit).norm() == 0.0);

    CHECK_THROWS_AS(amplitude_prepare(RVector::Zero(4), 2), NormalizationError);
    CHECK_THROWS_AS(amplitude_prepare(x81, 5), DimensionError);
}

TEST_CASE("padding never changes normalized dot products") {
    RandomStream rng(7);
    for (int rep = 0; rep < 200; ++rep) {
        RVector x(13), y(13);
        for (int i = 0; i < 13; ++i) {
            x[i] = rng.gaussian();
            y[i] = rng.gaussian();
        }
        const double direct = x.dot(y) / (x.norm() * y.norm());
        const double padded = amplitude_prepare(x, 5).dot(amplitude_prepare(y, 5));
        CHECK(padded == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("qubits_for reproduces the tabulated encodings exactly") {
    CHECK(qubits_for(3, true).n_qubits == 6);
    CHECK(qubits_for(3, true).n_components == 64);
    CHECK(qubits_for(4, true).n_qubits == 7);
    CHECK(qubits_for(4, true).n_components == 128);
    CHECK(qubits_for(5, true).n_qubits == 9);
    CHECK(qubits_for(5, true).n_components == 512);

    CHECK(qubits_for(3, false).n_qubits == 7);   // 81 raw attributes need 2^7
    CHECK(qubits_for(3, false).n_components == 81);
    CHECK(qubits_for(4, false).n_qubits == 8);   // 256 = 2^8 exactly
    CHECK(qubits_for(5, false).n_qubits == 10);
}
