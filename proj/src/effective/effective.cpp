#include "tlsdrive/effective.hpp"

#include <algorithm>
#include <cmath>

namespace tls {
namespace {

constexpr double kBranchGuard = 1e-8;

double intra_period_max(const PulseSequence& seq) {
    const Evolver ev(seq);
    std::vector<double> times;
    for (std::size_t n = 0; n < seq.size(); ++n) {
        for (int k = 0; k < 64; ++k) times.push_back(seq.boundary(n) + seq[n].tau * k / 64.0);
    }
    times.push_back(seq.period());
    const auto p = ev.sample(times);
    return *std::max_element(p.begin(), p.end());
}

}  // namespace

MicromotionParams micromotion_of(const PropagatorCoeffs& u) {
    if (1.0 + u.A < kBranchGuard) {
        throw Error(ErrorCode::BranchAmbiguity, "operator is within 1e-8 of -identity; logarithm branch undefined");
    }
    const double cd = std::sqrt(u.C * u.C + u.D * u.D);
    const double v = std::sqrt(u.B * u.B + cd * cd);
    const double phi = std::atan2(v, u.A);
    const double scale = v > 0.0 ? phi / v : 1.0;
    return {2.0 * u.B * scale, cd * scale, std::atan2(u.C, u.D)};
}

MicromotionParams micromotion(const PulseSequence& sequence, double t_prime) {
    if (!(t_prime > 0.0) || t_prime > sequence.period()) {
        throw Error(ErrorCode::OutOfRange, "micromotion requires 0 < t' <= T");
    }
    return micromotion_of(intra_period(sequence, t_prime));
}

bool uses_negated_period(const PulseSequence& sequence, BranchConvention branch) {
    const auto p = period_propagator(sequence);
    if (p.u.A >= 0.0 || branch == BranchConvention::Principal) return false;
    if (branch == BranchConvention::PositiveTrace) return true;
    const double omega = p.theta / sequence.period();
    const double at_quarter = transition_probability(sequence, 0.5 * kPi / omega);
    return intra_period_max(sequence) < at_quarter;
}

double rotation_angle(const PulseSequence& sequence, BranchConvention branch) {
    const double theta = period_propagator(sequence).theta;
    return uses_negated_period(sequence, branch) ? kPi - theta : theta;
}

EffectiveHamiltonian effective_hamiltonian(const PulseSequence& sequence, BranchConvention branch) {
    auto u = period_propagator(sequence).u;
    const bool flip = uses_negated_period(sequence, branch);
    if (flip) u = u.negated();
    const auto m = micromotion_of(u);
    const double T = sequence.period();
    EffectiveHamiltonian h;
    h.delta = m.delta / T;
    h.epsilon = m.epsilon / T;
    h.theta = m.theta;
    h.period = T;
    h.flipped = flip;
    return h;
}

PulseSequence jump_sequence(const PulseSequence& sequence, double lambda, std::size_t m) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(ErrorCode::OutOfRange, "lambda must lie in [0, 1]");
    const std::size_t n = sequence.size();
    if (m < 1 || m > n) throw Error(ErrorCode::OutOfRange, "starting step index out of range");
    const std::size_t i = m - 1;
    std::vector<DriveStep> steps;
    DriveStep head = sequence[i], tail = sequence[i];
    head.tau = lambda * sequence[i].tau;
    tail.tau = (1.0 - lambda) * sequence[i].tau;
    if (head.tau > 0.0) steps.push_back(head);
    for (std::size_t k = 1; k < n; ++k) steps.push_back(sequence[(i + k) % n]);
    if (tail.tau > 0.0) steps.push_back(tail);
    return PulseSequence(std::move(steps));
}

EffectiveHamiltonian effective_with_jump(const PulseSequence& sequence, double lambda, std::size_t m,
                                         BranchConvention branch) {
    return effective_hamiltonian(jump_sequence(sequence, lambda, m), branch);
}

PropagatorCoeffs jump_period_two_step(const PulseSequence& seq, double lambda) {
    if (seq.size() != 2) throw Error(ErrorCode::PreconditionViolation, "two-step sequence required");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(ErrorCode::OutOfRange, "lambda must lie in [0, 1]");
    const auto& s1 = seq[0];
    const auto& s2 = seq[1];
    const double d1 = s1.delta, e1 = s1.epsilon, t1 = s1.theta;
    const double d2 = s2.delta, e2 = s2.epsilon, t2 = s2.theta;
    const double E1 = s1.energy(), E2 = s2.energy();
    if (E1 == 0.0 || E2 == 0.0) throw Error(ErrorCode::PreconditionViolation, "closed form needs nonzero energies");
    const double a = E1 * s1.tau, b = E2 * s2.tau;
    const double sa = std::sin(a), ca = std::cos(a), sb = std::sin(b), cb = std::cos(b);
    const double skew = std::sin((2.0 * lambda - 1.0) * a) * sb;
    const double split = std::sin((1.0 - lambda) * a) * std::sin(lambda * a) * sb;
    const double mid = std::cos((1.0 - lambda) * a) * std::cos(lambda * a) * sb;

    PropagatorCoeffs u;
    u.A = ca * cb - (d1 * d2 + 4.0 * e1 * e2 * std::cos(t1 - t2)) / (4.0 * E1 * E2) * sa * sb;
    u.B = d1 / (2.0 * E1) * sa * cb + d2 / (2.0 * E2) * ca * sb + e1 * e2 * std::sin(t1 - t2) / (E1 * E2) * skew +
          (d2 * e1 * e1 - d1 * e1 * e2 * std::cos(t1 - t2)) / (E1 * E1 * E2) * split;
    u.C = e1 * std::sin(t1) / E1 * sa * cb + e2 * std::sin(t2) / E2 * mid +
          (d2 * e1 * std::cos(t1) - d1 * e2 * std::cos(t2)) / (2.0 * E1 * E2) * skew +
          (d1 * d1 * e2 * std::sin(t2) - 2.0 * e1 * d1 * d2 * std::sin(t1) - 4.0 * e1 * e1 * e2 * std::sin(2.0 * t1 - t2)) /
              (4.0 * E1 * E1 * E2) * split;
    u.D = e1 * std::cos(t1) / E1 * sa * cb + e2 * std::cos(t2) / E2 * mid +
          (d1 * e2 * std::sin(t2) - d2 * e1 * std::sin(t1)) / (2.0 * E1 * E2) * skew +
          (d1 * d1 * e2 * std::cos(t2) - 2.0 * e1 * d1 * d2 * std::cos(t1) - 4.0 * e1 * e1 * e2 * std::cos(2.0 * t1 - t2)) /
              (4.0 * E1 * E1 * E2) * split;
    return u;
}

std::pair<double, double> quasienergies(const PulseSequence& sequence) {
    const double T = sequence.period();
    const double wt = sequence.omega_t();
    double trace = 0.0;
    for (const auto& s : sequence.steps()) trace += 0.5 * s.delta * s.tau;
    const double theta = period_propagator(sequence).theta;
    auto fold = [wt](double x) {
        double r = std::fmod(x, wt);
        if (r < 0.0) r += wt;
        if (r >= wt) r -= wt;
        return r;
    };
    double q1 = fold((trace + theta) / T), q2 = fold((trace - theta) / T);
    if (q1 > q2) std::swap(q1, q2);
    return {q1, q2};
}

}  // namespace tls
