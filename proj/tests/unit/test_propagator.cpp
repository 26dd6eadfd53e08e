#include <algorithm>
#include <random>

#include "doctest.h"
#include "support/random_sequences.hpp"
#include "tlsdrive/kernels.hpp"
#include "tlsdrive/oracle.hpp"
#include "tlsdrive/propagator.hpp"

using namespace tls;

namespace {

double coeff_diff(const PropagatorCoeffs& a, const PropagatorCoeffs& b) {
    return std::max({std::abs(a.A - b.A), std::abs(a.B - b.B), std::abs(a.C - b.C), std::abs(a.D - b.D)});
}

// Compare against the oracle with the trace phase restored.
double oracle_diff(const PulseSequence& s, double t) {
    const auto mine = oracle::to_matrix(evolve(s, t)) * std::polar(1.0, -oracle::trace_phase(s, t));
    return oracle::max_abs_diff(mine, oracle::brute_force_evolve(s, t));
}

PulseSequence fig1_pair() {
    const double e1 = 1.0, e2 = 2.0, d1 = 50.0, d2 = 40.0;
    const double E1 = std::sqrt(e1 * e1 + d1 * d1 / 4), E2 = std::sqrt(e2 * e2 + d2 * d2 / 4);
    return PulseSequence({{d1, e1, 0.0, kPi / 2 / E1}, {d2, e2, 0.0, kPi / 2 / E2}});
}

}  // namespace

TEST_CASE("step propagator special cases") {
    CHECK(coeff_diff(step_propagator({0.0, 0.0, 0.0, 1.0}, 5.0), {1, 0, 0, 0}) == 0.0);
    CHECK(coeff_diff(step_propagator({0.0, 1.0, 0.0, 10.0}, kPi / 2), {0, 0, 0, 1}) < 1e-16);
}

TEST_CASE("detuned step against the matrix exponential") {
    DriveStep step{50.0, 1.0, 0.0, 1.0};
    const double s = (kPi / 2) / step.energy();
    const auto u = step_propagator(step, s);
    CHECK(std::abs(u.A) < 1e-15);
    CHECK(u.B == doctest::Approx(25.0 / std::sqrt(626.0)));
    CHECK(u.D == doctest::Approx(1.0 / std::sqrt(626.0)));
    auto full = oracle::expm_hermitian(oracle::hamiltonian(step), s) * std::polar(1.0, 0.5 * step.delta * s);
    CHECK(oracle::max_abs_diff(full, oracle::to_matrix(u)) < 1e-14);
}

TEST_CASE("compose base cases") {
    DriveStep step{1.3, 0.7, 0.4, 2.0};
    CHECK(coeff_diff(compose({}, step, 0.9), step_propagator(step, 0.9)) == 0.0);
    PropagatorCoeffs x = step_propagator({-2.0, 1.0, 1.0, 1.0}, 0.37);
    CHECK(coeff_diff(compose(x, step, 0.0), x) == 0.0);
}

TEST_CASE("two-step period matches the closed-form product") {
    auto s = fig1_pair();
    const auto& a = s[0];
    const auto& b = s[1];
    const double E1 = a.energy(), E2 = b.energy();
    const double x = E1 * a.tau, y = E2 * b.tau;
    const double sx = std::sin(x), cx = std::cos(x), sy = std::sin(y), cy = std::cos(y);
    const double dt = a.theta - b.theta;
    PropagatorCoeffs closed{
        cx * cy - (a.delta * b.delta + 4 * a.epsilon * b.epsilon * std::cos(dt)) / (4 * E1 * E2) * sx * sy,
        a.delta / (2 * E1) * sx * cy + b.delta / (2 * E2) * cx * sy +
            a.epsilon * b.epsilon * std::sin(dt) / (E1 * E2) * sx * sy,
        a.epsilon * std::sin(a.theta) / E1 * sx * cy + b.epsilon * std::sin(b.theta) / E2 * cx * sy +
            (b.delta * a.epsilon * std::cos(a.theta) - a.delta * b.epsilon * std::cos(b.theta)) / (2 * E1 * E2) * sx * sy,
        a.epsilon * std::cos(a.theta) / E1 * sx * cy + b.epsilon * std::cos(b.theta) / E2 * cx * sy +
            (a.delta * b.epsilon * std::sin(b.theta) - b.delta * a.epsilon * std::sin(a.theta)) / (2 * E1 * E2) * sx * sy,
    };
    CHECK(coeff_diff(period_propagator(s).u, closed) < 1e-15);

    const auto full = oracle::brute_force_evolve(s, s.period()) * std::polar(1.0, oracle::trace_phase(s, s.period()));
    CHECK(oracle::max_abs_diff(full, oracle::to_matrix(closed)) < 1e-14);
}

TEST_CASE("intra-period endpoints") {
    std::mt19937_64 rng(3);
    auto s = testing::random_moderate_sequence(rng, 5, 5);
    CHECK(coeff_diff(intra_period(s, 0.0), {}) == 0.0);
    CHECK(coeff_diff(intra_period(s, s[0].tau), step_propagator(s[0], s[0].tau)) == 0.0);
    CHECK(coeff_diff(intra_period(s, s.period()), period_propagator(s).u) == 0.0);
    CHECK_THROWS_AS(intra_period(s, -0.1), Error);
    CHECK_THROWS_AS(intra_period(s, 1.5 * s.period()), Error);
    CHECK(oracle_diff(s, 0.7 * s.period()) < 1e-12);
}

TEST_CASE("full Rabi cycle gives minus identity") {
    PulseSequence s({{0.0, 1.0, 0.0, kPi}});
    const auto p = period_propagator(s);
    CHECK(coeff_diff(p.u, {-1, 0, 0, 0}) < 1e-15);
    CHECK(p.theta == doctest::Approx(kPi));
    for (double t : {0.3, 2.0 * kPi + 0.3, 7.0 * kPi + 1.1, 1e5 * kPi + 0.5}) CHECK(oracle_diff(s, t) < 1e-9);
}

TEST_CASE("full double cycle gives identity each period") {
    PulseSequence s({{0.0, 1.0, 0.5, kPi}, {0.0, 1.0, -0.5, kPi}});
    const auto p = period_propagator(s);
    CHECK(coeff_diff(p.u, {1, 0, 0, 0}) < 1e-15);
    CHECK(coeff_diff(evolve(s, 123.0 * s.period()), {}) < 1e-12);
}

TEST_CASE("evolve at period edges") {
    std::mt19937_64 rng(4);
    auto s = testing::random_moderate_sequence(rng, 4, 4);
    CHECK(coeff_diff(evolve(s, 0.0), {}) == 0.0);
    CHECK(coeff_diff(evolve(s, s.period()), period_propagator(s).u) < 1e-15);
    const double t = 3.0 * s.period();
    CHECK(coeff_diff(evolve(s, t), evolve(s, std::nextafter(t, 0.0))) < 1e-13);
    auto q = EvolutionQuery::split(std::nextafter(t, 0.0), s.period());
    CHECK(q.periods == 3);
    CHECK(q.t_prime == 0.0);
    CHECK_THROWS_AS(evolve(s, -1.0), Error);
}

TEST_CASE("evolve matches the oracle on random sequences") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> periods(0, 50);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        auto s = testing::random_sequence(rng);
        const double t = (periods(rng) + frac(rng)) * s.period();
        CHECK(oracle_diff(s, t) < 1e-10);
    }
    auto s4 = testing::random_moderate_sequence(rng, 4, 4);
    CHECK(oracle_diff(s4, 3.7 * s4.period()) < 1e-10);
}

TEST_CASE("evolve stays unitary") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
        auto s = testing::random_sequence(rng);
        const double t = frac(rng) * 1000.0 * s.period();
        worst = std::max(worst, std::abs(evolve(s, t).norm2() - 1.0));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("group property against explicit period chaining") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        auto s = testing::random_moderate_sequence(rng, 1, 6);
        const double tp = 0.37 * s.period();
        for (int n = 0; n <= 20; ++n) {
            PropagatorCoeffs chain;
            for (int k = 0; k < n; ++k)
                for (const auto& step : s.steps()) chain = compose(chain, step, step.tau);
            double rest = tp;
            for (const auto& step : s.steps()) {
                if (rest <= 0.0) break;
                chain = compose(chain, step, std::min(rest, step.tau));
                rest -= step.tau;
            }
            CHECK(coeff_diff(evolve(s, n * s.period() + tp), chain) < 1e-12);
        }
    }
}

TEST_CASE("transition probability basics") {
    PulseSequence res({{0.0, 1.0, 0.0, 10.0}});
    CHECK(transition_probability(res, 0.0) == 0.0);
    CHECK(transition_probability(res, kPi / 2) == doctest::Approx(1.0));
}

TEST_CASE("coherent destruction of tunneling keeps population pinned") {
    const double tau = 0.05 * kPi;
    PulseSequence s({{0.0, 1.0, 0.0, tau}, {0.0, 1.0, kPi, tau}});
    Evolver ev(s);
    auto p = ev.sample(linspace(0.0, 100.0 * s.period(), 20001));
    CHECK(*std::max_element(p.begin(), p.end()) <= 0.03);
}

TEST_CASE("batch sampling agrees with pointwise evaluation on both kernel paths") {
    std::mt19937_64 rng(13);
    const auto before = kernels::active_isa();
    for (auto isa : {kernels::Isa::Scalar, kernels::Isa::Avx2}) {
        if (isa == kernels::Isa::Avx2 && !kernels::avx2_supported()) continue;
        kernels::set_active(isa);
        for (int k = 0; k < 20; ++k) {
            auto s = testing::random_moderate_sequence(rng, 1, 8);
            Evolver ev(s);
            auto t = linspace(0.0, 12.5 * s.period(), 3001);
            auto p = ev.sample(t);
            double worst = 0.0;
            for (std::size_t i = 0; i < t.size(); ++i)
                worst = std::max(worst, std::abs(p[i] - ev.transition_probability(t[i])));
            CHECK(worst < 1e-13);
        }
    }
    kernels::set_active(before);
}

TEST_CASE("unsorted sample times are handled") {
    std::mt19937_64 rng(14);
    auto s = testing::random_moderate_sequence(rng, 3, 3);
    Evolver ev(s);
    std::vector<double> t = {5.0, 0.1, 3.3, 3.2, 100.0, 0.0};
    auto p = ev.sample(t);
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(p[i] == doctest::Approx(ev.transition_probability(t[i])));
}
