#include <doctest.h>

#include "entanglekit/kernels.hpp"
#include "entanglekit/qsim.hpp"

using namespace entanglekit;

namespace {

RVector random_vector(int dim, RandomStream& rng) {
    RVector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = rng.gaussian();
    return v;
}

StateVector random_complex_state(int n_qubits, RandomStream& rng) {
    CVector amps(Eigen::Index(1) << n_qubits);
    for (Eigen::Index i = 0; i < amps.size(); ++i)
        amps[i] = Complex(rng.gaussian(), rng.gaussian());
    amps /= amps.norm();
    return StateVector(n_qubits, amps);
}

}  // namespace

TEST_CASE("encode produces computational basis states and unit norm") {
    RVector e0 = RVector::Zero(4);
    e0[0] = 1.0;
    const StateVector s0 = encode(e0, 2);
    CHECK(std::abs(s0.amplitudes[0] - Complex(1, 0)) < 1e-15);
    for (int i = 1; i < 4; ++i) CHECK(std::abs(s0.amplitudes[i]) == 0.0);

    RVector plus(2);
    plus << 1.0, 1.0;
    const StateVector sp = encode(plus, 1);
    CHECK(std::real(sp.amplitudes[0]) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(std::real(sp.amplitudes[1]) == doctest::Approx(1.0 / std::sqrt(2.0)));

    RandomStream rng(1);
    const StateVector s = encode(random_vector(13, rng), 4);
    CHECK(s.amplitudes.norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("swap test on identical and orthogonal states") {
    RandomStream rng(2);
    const StateVector psi = random_complex_state(3, rng);
    CHECK(swap_test_p0(psi, psi) == doctest::Approx(1.0).epsilon(1e-13));

    RVector a = RVector::Zero(4), b = RVector::Zero(4);
    a[0] = 1.0;
    b[2] = 1.0;
    CHECK(swap_test_p0(encode(a, 2), encode(b, 2)) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("swap test circuit matches the closed form across register sizes") {
    RandomStream rng(3);
    for (int n = 1; n <= 6; ++n) {
        for (int rep = 0; rep < 20; ++rep) {
            const StateVector psi = random_complex_state(n, rng);
            const StateVector phi = random_complex_state(n, rng);
            const double overlap = std::norm(psi.amplitudes.dot(phi.amplitudes));
            CHECK(swap_test_p0(psi, phi) ==
                  doctest::Approx(0.5 * (1.0 + overlap)).epsilon(1e-12));
        }
    }
}

TEST_CASE("swap test equals the amplitude kernel on raw vectors") {
    RandomStream rng(4);
    const KernelSpec amp{KernelKind::Amplitude, 1.0, 2};
    for (int rep = 0; rep < 50; ++rep) {
        const RVector x = random_vector(9, rng);
        const RVector y = random_vector(9, rng);
        const double k = kernel_eval(amp, x, y);
        const double p0 = swap_test_p0(encode(x, 4), encode(y, 4));
        CHECK(2.0 * p0 - 1.0 == doctest::Approx(k).epsilon(1e-12));
    }
}

TEST_CASE("hadamard test: identical states, real-amplitude Im branch, overlap identity") {
    RandomStream rng(5);
    const StateVector psi = random_complex_state(3, rng);
    CHECK(hadamard_test_p0(psi, psi, OverlapPart::Re) == doctest::Approx(1.0).epsilon(1e-13));

    const RVector x = random_vector(8, rng);
    const RVector y = random_vector(8, rng);
    CHECK(hadamard_test_p0(encode(x, 3), encode(y, 3), OverlapPart::Im) ==
          doctest::Approx(0.5).epsilon(1e-13));

    for (int n = 1; n <= 6; ++n) {
        for (int rep = 0; rep < 10; ++rep) {
            const StateVector a = random_complex_state(n, rng);
            const StateVector b = random_complex_state(n, rng);
            const Complex overlap = a.amplitudes.dot(b.amplitudes);
            const double p_re = hadamard_test_p0(a, b, OverlapPart::Re);
            const double p_im = hadamard_test_p0(a, b, OverlapPart::Im);
            CHECK(2.0 * p_re - 1.0 == doctest::Approx(std::real(overlap)).epsilon(1e-12));
            CHECK(2.0 * p_im - 1.0 == doctest::Approx(std::imag(overlap)).epsilon(1e-12));
            const double re = 2.0 * p_re - 1.0, im = 2.0 * p_im - 1.0;
            const double swap_overlap = 2.0 * swap_test_p0(a, b) - 1.0;
            CHECK(re * re + im * im == doctest::Approx(swap_overlap).epsilon(1e-12));
        }
    }
}

TEST_CASE("register accounting and the capacity guard") {
    CHECK(swap_test_register(9) == 19);
    CHECK(hadamard_test_register(9) == 10);
    RandomStream rng(6);
    const StateVector big = random_complex_state(10, rng);
    CHECK_THROWS_AS(swap_test_p0(big, big), CapacityError);  // would need 21 qubits
    CHECK_NOTHROW(hadamard_test_p0(big, big, OverlapPart::Re));
    const StateVector a = random_complex_state(2, rng);
    const StateVector b = random_complex_state(3, rng);
    CHECK_THROWS_AS(swap_test_p0(a, b), DimensionError);
}

TEST_CASE("shots_required arithmetic and monotonicity") {
    const ShotPlan plan = shots_required(0.1, 0.05);
    CHECK(plan.shots == 185);  // ceil(ln(40)/0.02)

    const ShotPlan fine = shots_required(0.05, 0.05);
    CHECK(fine.shots >= 4 * plan.shots - 4);  // halving epsilon quadruples (up to ceiling)
    CHECK(fine.shots <= 4 * plan.shots);

    CHECK(shots_required(0.1, 0.01).shots > plan.shots);
    CHECK_THROWS_AS(shots_required(0.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(shots_required(0.5, 1.5), std::domain_error);
}

TEST_CASE("sampled_kernel degenerate and single-shot cases") {
    RandomStream rng(7);
    RVector x(4);
    x << 0.3, -0.7, 0.2, 0.1;
    for (int rep = 0; rep < 10; ++rep)
        CHECK(sampled_kernel(x, x, 5, rng) == 1.0);  // p0 = 1 exactly

    const RVector y = random_vector(4, rng);
    for (int rep = 0; rep < 20; ++rep) {
        const double est = sampled_kernel(x, y, 1, rng);
        CHECK((est == 0.0 || est == 1.0));
    }
    CHECK_THROWS_AS(sampled_kernel(x, y, 0, rng), ContractViolation);
}

TEST_CASE("sampled_kernel honors the Hoeffding band on the measured probability") {
    RandomStream rng(8);
    const double eps = 0.05, delta = 0.05;
    const ShotPlan plan = shots_required(eps, delta);
    const KernelSpec amp{KernelKind::Amplitude, 1.0, 2};
    int violations = 0;
    const int trials = 300;
    const RVector x = random_vector(16, rng);
    const RVector y = random_vector(16, rng);
    const double exact = kernel_eval(amp, x, y);
    for (int t = 0; t < trials; ++t) {
        const double est = sampled_kernel(x, y, plan.shots, rng);
        // the plan bounds |p0_hat - p0| <= eps, i.e. 2*eps on the kernel scale
        if (std::abs(est - exact) > 2.0 * eps) ++violations;
    }
    const double slack = 3.0 * std::sqrt(delta * (1 - delta) * trials);
    CHECK(violations <= static_cast<int>(delta * trials + slack));
}
