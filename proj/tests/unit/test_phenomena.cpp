#include <algorithm>
#include <random>

#include "doctest.h"
#include "support/random_sequences.hpp"
#include "tlsdrive/effective.hpp"
#include "tlsdrive/oracle.hpp"
#include "tlsdrive/phenomena.hpp"
#include "tlsdrive/propagator.hpp"

using namespace tls;

namespace {

PulseSequence cdt_pair(double area = 0.05 * kPi) {
    return PulseSequence({{0.0, 1.0, 0.0, area}, {0.0, 1.0, kPi, area}});
}

// pi/2 pulse areas; detuned steps use delta = ratio * eps.
PulseSequence beat_setup(const std::vector<double>& eps, const std::vector<double>& delta,
                         const std::vector<double>& areas) {
    std::vector<DriveStep> steps;
    for (std::size_t n = 0; n < eps.size(); ++n) {
        DriveStep s{delta[n], eps[n], 0.0, 1.0};
        s.tau = areas[n] / s.energy();
        steps.push_back(s);
    }
    return PulseSequence(steps);
}

PulseSequence metrology_pair(double theta2) {
    const double E2 = std::sqrt(1.0 + 400.0);
    return PulseSequence({{0.0, 1.0, 0.0, kPi / 2}, {40.0, 1.0, theta2, kPi / 2 / E2}});
}

}  // namespace

TEST_CASE("CDT is flagged for opposite-phase matched pulses") {
    const auto r = classify(cdt_pair());
    CHECK(r.cdt.present);
    CHECK(r.cdt.residual < 1e-12);
    CHECK_FALSE(r.beat.present);
    const auto text = r.to_text();
    CHECK(text.find("cdt 1 ") == 0);
}

TEST_CASE("CDT flag pins the population") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> area(0.01, 0.3), eps(0.5, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double e1 = eps(rng), a = area(rng);
        const PulseSequence s({{0.0, e1, 0.3, a / e1}, {0.0, 1.0, 0.3 + kPi, a}});
        const auto r = classify(s, {.tol = 1e-6});
        REQUIRE(r.cdt.present);
        double single = 0.0;
        for (const auto& st : s.steps()) {
            single = std::max(single, st.epsilon * st.epsilon / (st.energy() * st.energy()) *
                                          std::pow(std::sin(st.energy() * st.tau), 2));
        }
        const double bound = 4e-6 * s.omega_t() * s.period() + single;
        Evolver ev(s);
        double worst = 0.0;
        for (double t : linspace(0.0, 200 * s.period(), 8001)) worst = std::max(worst, ev.transition_probability(t));
        CHECK(worst <= bound);
    }
}

TEST_CASE("periodic flag implies a signed identity") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> delta(-3.0, 3.0), eps(0.2, 2.0), angle(-kPi, kPi);
    std::uniform_int_distribution<int> num(1, 7), den(2, 9);
    for (int trial = 0; trial < 40; ++trial) {
        // Two identical steps rotate by 2 E tau; pick E tau = pi p / (2 q).
        DriveStep st{delta(rng), eps(rng), angle(rng), 1.0};
        st.tau = kPi * num(rng) / (2.0 * den(rng)) / st.energy();
        const PulseSequence s({st, st});
        const auto r = classify(s, {.tol = 1e-9, .max_index = 64});
        REQUIRE(r.periodic.present);
        const auto u = evolve(s, r.periodic.index * s.period());
        CHECK(std::abs(u.A - r.identity_sign) < 1e-8);
        CHECK(std::sqrt(u.B * u.B + u.C * u.C + u.D * u.D) < 1e-8);
    }
}

TEST_CASE("stepwise and swapping flags") {
    // Theta = pi/2: swaps populations every period.
    const PulseSequence swap({{0.0, 1.0, 0.0, kPi / 2}});
    const auto r = classify(swap, {.tol = 1e-9});
    CHECK(r.swapping.present);
    CHECK(r.stepwise.present);
    CHECK(r.stepwise.index == 1);
    CHECK(r.complete_transition.present);
    CHECK(evolve(swap, swap.period()).transition() == doctest::Approx(1.0));

    // Theta = pi/6: stepwise at N1' = 3, not swapping.
    const PulseSequence steps({{0.0, 1.0, 0.0, kPi / 6}});
    const auto q = classify(steps, {.tol = 1e-9});
    CHECK_FALSE(q.swapping.present);
    CHECK(q.stepwise.present);
    CHECK(q.stepwise.index == 3);
    CHECK(q.periodic.index == 6);
    CHECK(q.identity_sign == -1);
}

TEST_CASE("swapping implies stepwise with index one") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = testing::random_moderate_sequence(rng, 1, 4);
        const auto r = classify(s, {.tol = 0.05});
        if (r.swapping.present) CHECK(r.stepwise.index == 1);
    }
}

TEST_CASE("beat flag for the resonant plus detuned pair") {
    const auto r = classify(metrology_pair(0.0));
    CHECK(r.beat.present);
    CHECK(r.beat.residual < 0.1);
}

TEST_CASE("beat prediction, two steps") {
    const auto s = metrology_pair(0.0);
    const auto b = beat_prediction(s);
    const double T = s.period();
    CHECK(b.n1 == 1);
    CHECK(b.varpi1 == doctest::Approx(kPi / (2 * T)).epsilon(0.1));
    CHECK(b.varpi1_prime == doctest::Approx(kPi / (2 * T)).epsilon(0.1));
    CHECK(b.is_beat());

    SUBCASE("spacing matches the spectrum") {
        const auto spec = fourier_limit(s, {-2, 2}, BranchConvention::PositiveTrace);
        auto comps = spec.components;
        std::sort(comps.begin(), comps.end(), [](auto& x, auto& y) { return x.amplitude > y.amplitude; });
        REQUIRE(comps.size() >= 2);
        const double spacing = std::abs(comps[0].frequency - comps[1].frequency) / 2;
        CHECK(b.omega_b == doctest::Approx(spacing).epsilon(0.02));
    }
    SUBCASE("model tracks the signal") {
        CHECK(model_error(s, b.as_model(), 2 * kPi / b.omega_b).value < 0.05);
    }
}

TEST_CASE("beat prediction degenerates when every step is resonant") {
    const auto s = beat_setup({1.0, 1.0}, {0.0, 0.0}, {kPi / 2, kPi / 2});
    const auto b = beat_prediction(s, {.fit_shift = false});
    CHECK(b.n1 == 2);
    CHECK(b.omega_b == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_FALSE(b.is_beat());
}

TEST_CASE("beat prediction rejects mixed regimes") {
    CHECK_THROWS_AS(beat_prediction(beat_setup({1.0, 1.0}, {0.0, 3.0}, {kPi / 2, kPi / 2})), Error);
    CHECK_THROWS_AS(beat_prediction(beat_setup({1.0, 1.0}, {0.0, 40.0}, {kPi / 2, 1.0})), Error);
    CHECK_THROWS_AS(beat_prediction(beat_setup({1.0, 1.0, 1.0}, {0.0, 40.0, 50.0}, {kPi / 2, kPi / 2, kPi / 2})),
                    Error);
    try {
        beat_prediction(beat_setup({1.0, 1.0}, {0.0, 3.0}, {kPi / 2, kPi / 2}));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SetupViolation);
    }
}

TEST_CASE("odd sequences with one pi pulse") {
    // Detuned pi pulse drops out of the frequency rules.
    const auto detuned = beat_setup({1.0, 1.0, 1.0}, {0.0, 40.0, 30.0}, {kPi / 2, kPi / 2, kPi});
    const auto a = beat_prediction(detuned, {.fit_shift = false});
    CHECK(a.n1 == 1);
    CHECK(a.is_beat());
    // Resonant pi pulse counts toward n1 and shifts the rules.
    const auto resonant = beat_setup({1.0, 1.0, 1.0}, {0.0, 40.0, 0.0}, {kPi, kPi / 2, kPi / 2});
    const auto b = beat_prediction(resonant, {.fit_shift = false});
    CHECK(b.n1 == 2);
    const double T = resonant.period();
    const double w = rotation_angle(resonant, BranchConvention::PositiveTrace) / T;
    const double wm = kPi / T - w;
    CHECK(b.varpi1 == doctest::Approx(0.5 * (2 * wm + 4 * w)));
    CHECK(b.varpi1_prime == doctest::Approx(0.5 * (4 * wm + 2 * w)));
}

TEST_CASE("phase inversion") {
    const auto s = metrology_pair(kPi / 5);
    const double T = s.period(), E2 = s[1].energy();
    const double wb = 2 * std::cos(kPi / 5) / (T * E2);
    const auto e = phase_from_beat(wb, s);
    CHECK(e.difference == doctest::Approx(kPi / 5));
    CHECK(e.theta2[0] == doctest::Approx(kPi / 5));
    CHECK(e.theta2[1] == doctest::Approx(-kPi / 5));
    CHECK_FALSE(e.clamped);
    CHECK_THROWS_AS(phase_from_beat(1.1 * 2 / (T * E2), s), Error);
    const auto c = phase_from_beat(1.01 * 2 / (T * E2), s, 0.02);
    CHECK(c.clamped);
    CHECK(c.difference == 0.0);
    CHECK_THROWS_AS(phase_from_beat(-1.0, s), Error);
}

TEST_CASE("complete transition time") {
    const double t = complete_transition_time(1.0, 0.5, 0.4, 0.9);
    CHECK(t == doctest::Approx(kPi * 1.3 / (2 * (0.4 + 0.45))));
    CHECK(t >= kPi / 2);
    CHECK(t <= kPi);
    CHECK_THROWS_AS(complete_transition_time(1.0, 1.0, 2.0, 0.1), Error);
}

TEST_CASE("design for complete transition") {
    // Fig. 2-style pair: tau_2 solves Delta_eff = 0.
    const PulseSequence s({{0.0, 1.0, 0.0, 0.2}, {40.0, 2.0, kPi / 3, 0.01}});
    const auto d = design_manipulation(s, DesignTarget::CompleteTransition, FreeParameter::Durations, {0.01, 0.2});
    CHECK(std::abs(period_propagator(d).u.B) < 1e-12);
    CHECK(std::abs(effective_hamiltonian(d).delta) < 1e-9);
    CHECK(d[0].tau == s[0].tau);
    CHECK_THROWS_AS(design_manipulation(s, DesignTarget::CompleteTransition, FreeParameter::Durations, {0.001, 0.002}),
                    Error);
}

TEST_CASE("design for CDT") {
    const PulseSequence s({{0.0, 1.0, 0.4, 0.1}, {0.0, 2.5, 0.0, 0.3}});
    const auto d = design_manipulation(s, DesignTarget::Cdt, FreeParameter::Phase);
    CHECK(wrap_angle(d[1].theta - d[0].theta - kPi) == doctest::Approx(0.0));
    CHECK(d[1].epsilon * d[1].tau == doctest::Approx(d[0].epsilon * d[0].tau));
    CHECK(classify(d, {.tol = 1e-10}).cdt.present);
    const auto c = design_manipulation(s, DesignTarget::Cdt, FreeParameter::Coupling);
    CHECK(classify(c, {.tol = 1e-10}).cdt.present);
    CHECK_THROWS_AS(design_manipulation(s, DesignTarget::Cdt, FreeParameter::Detuning), Error);
}
