#include <random>

#include "doctest.h"
#include "support/random_sequences.hpp"
#include "tlsdrive/oracle.hpp"

using namespace tls;
using namespace tls::oracle;

TEST_CASE("brute force at t = 0 is the identity") {
    PulseSequence s({{3.0, 1.0, 0.2, 0.7}, {0.0, 2.0, -1.0, 0.4}});
    CHECK(max_abs_diff(brute_force_evolve(s, 0.0), Mat2{}) == 0.0);
}

TEST_CASE("brute force products are unitary") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 50; ++k) {
        auto s = testing::random_sequence(rng);
        const double t = std::uniform_real_distribution<double>(0.0, 20.0)(rng) * s.period();
        CHECK(unitarity_defect(brute_force_evolve(s, t)) < 1e-12);
    }
}

TEST_CASE("eigen and scaling-squaring exponentials agree") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 200; ++k) {
        DriveStep step{u(rng) * 10.0, std::abs(u(rng)), u(rng), 1.0};
        const double s = std::abs(u(rng));
        const Mat2 h = hamiltonian(step);
        CHECK(max_abs_diff(expm_hermitian(h, s, ExpMethod::Eigen), expm_hermitian(h, s, ExpMethod::ScalingSquaring)) <
              1e-11);
    }
}

TEST_CASE("two exponential paths agree on whole sequences") {
    std::mt19937_64 rng(6);
    for (int k = 0; k < 30; ++k) {
        auto s = testing::random_moderate_sequence(rng, 1, 6);
        const double t = 7.3 * s.period();
        CHECK(max_abs_diff(brute_force_evolve(s, t, 1, ExpMethod::Eigen),
                           brute_force_evolve(s, t, 1, ExpMethod::ScalingSquaring)) < 1e-11);
    }
}

TEST_CASE("doubling substeps barely changes the product") {
    std::mt19937_64 rng(8);
    for (int k = 0; k < 20; ++k) {
        auto s = testing::random_moderate_sequence(rng, 1, 5);
        const double t = 3.4 * s.period();
        CHECK(max_abs_diff(brute_force_evolve(s, t, 4), brute_force_evolve(s, t, 8)) < 1e-13);
    }
}

TEST_CASE("numeric fourier of a single tone") {
    const double w0 = 3.0, dt = 1e-3;
    const int n = static_cast<int>(std::round(40.0 * 2.0 * kPi / w0 / dt)) + 1;
    std::vector<double> p(n);
    for (int k = 0; k < n; ++k) p[k] = 0.5 - 0.5 * std::cos(w0 * k * dt);
    const double span = dt * (n - 1);
    const auto z = numeric_fourier(p, 0.0, span / (n - 1), w0);
    CHECK(std::abs(z) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(std::abs(std::arg(-z)) < 1e-6);

    const auto far = numeric_fourier(p, 0.0, span / (n - 1), 17.3 * w0);
    CHECK(std::abs(far) < 1.0 / 40.0);
}

TEST_CASE("numeric fourier refuses undersampled probes") {
    std::vector<double> p(100, 0.5);
    CHECK_THROWS_AS(numeric_fourier(p, 0.0, 1.0, 1.0), Error);
}

TEST_CASE("envelope of a constructed beat") {
    const double w1 = 10.0, w2 = 11.0, dt = 0.005;
    const int n = 12000;
    std::vector<double> p(n);
    for (int k = 0; k < n; ++k) {
        const double t = k * dt;
        p[k] = 0.5 * (std::pow(std::sin(w1 * t), 2) + std::pow(std::sin(w2 * t), 2));
    }
    const auto env = envelope_extract(p, 0.0, dt);
    CHECK(env.omega_b == doctest::Approx(w2 - w1).epsilon(0.02));
}

TEST_CASE("constant signal has no envelope") {
    std::vector<double> p(1000, 0.3);
    try {
        envelope_extract(p, 0.0, 0.01);
        FAIL("expected NoEnvelope");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoEnvelope);
    }
}

TEST_CASE("matrix form of coefficients is unitary") {
    PropagatorCoeffs u{0.5, 0.5, 0.5, 0.5};
    CHECK(unitarity_defect(to_matrix(u)) < 1e-15);
}
