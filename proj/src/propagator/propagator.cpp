#include "tlsdrive/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tlsdrive/kernels.hpp"

namespace tls {
namespace {

// Unit rotation axis of a step; zero when the step is trivial.
Vec3 axis(const DriveStep& step, double E) {
    if (E == 0.0) return {0.0, 0.0, 0.0};
    return {step.epsilon * std::cos(step.theta) / E, step.epsilon * std::sin(step.theta) / E, 0.5 * step.delta / E};
}

std::size_t segment_index(const PulseSequence& seq, double t_prime) {
    std::size_t n = 0;
    while (n + 1 < seq.size() && t_prime >= seq.boundary(n + 1)) ++n;
    return n;
}

}  // namespace

PropagatorCoeffs step_propagator(const DriveStep& step, double s) { return compose({}, step, s); }

PropagatorCoeffs compose(const PropagatorCoeffs& left, const DriveStep& step, double s) {
    const double E = step.energy();
    if (E == 0.0 || s == 0.0) return left;
    const Vec3 e = axis(step, E);
    const double c = std::cos(E * s), sn = std::sin(E * s);
    return {
        left.A * c - vec_a(left).dot(e) * sn,
        left.B * c + vec_b(left).dot(e) * sn,
        left.C * c + vec_c(left).dot(e) * sn,
        left.D * c + vec_d(left).dot(e) * sn,
    };
}

PropagatorCoeffs intra_period(const PulseSequence& sequence, double t_prime) {
    const double T = sequence.period();
    if (!(t_prime >= 0.0) || t_prime > T * (1.0 + 4.0 * std::numeric_limits<double>::epsilon())) {
        throw Error(ErrorCode::OutOfRange, "intra-period time outside [0, T]");
    }
    PropagatorCoeffs u;
    for (std::size_t n = 0; n < sequence.size(); ++n) {
        const double start = sequence.boundary(n);
        if (t_prime <= start) break;
        const double end = sequence.boundary(n + 1);
        u = compose(u, sequence[n], t_prime >= end ? sequence[n].tau : t_prime - start);
    }
    return u;
}

PeriodPropagator period_propagator(const PulseSequence& sequence) {
    PeriodPropagator p;
    for (const auto& step : sequence.steps()) p.u = compose(p.u, step, step.tau);
    p.sin_theta = std::sqrt(p.u.B * p.u.B + p.u.C * p.u.C + p.u.D * p.u.D);
    p.theta = std::atan2(p.sin_theta, p.u.A);
    return p;
}

EvolutionQuery EvolutionQuery::split(double t, double period) {
    EvolutionQuery q;
    const double n = std::floor(t / period);
    q.periods = static_cast<std::int64_t>(n);
    q.t_prime = t - n * period;
    if (q.t_prime < 0.0) q.t_prime = 0.0;
    const double slack = 4.0 * std::numeric_limits<double>::epsilon() * std::max(t, period);
    if (period - q.t_prime <= slack) {
        q.periods += 1;
        q.t_prime = 0.0;
    }
    return q;
}

PropagatorCoeffs power_apply(const PropagatorCoeffs& q, const PeriodPropagator& period, std::int64_t n) {
    if (n == 0) return q;
    const double nd = static_cast<double>(n);
    const double cn = std::cos(nd * period.theta);
    double r;
    if (nd * period.sin_theta < kDegenerateSinTheta) {
        r = (period.u.A > 0.0 || (n % 2) == 1) ? nd : -nd;
    } else {
        r = std::sin(nd * period.theta) / period.sin_theta;
    }
    const Vec3 pa = vec_a(period.u);
    return {
        q.A * cn - vec_a(q).dot(pa) * r,
        q.B * cn + vec_b(q).dot({-pa.x, -pa.y, pa.z}) * r,
        q.C * cn + vec_c(q).dot({-pa.x, pa.y, -pa.z}) * r,
        q.D * cn + vec_d(q).dot({pa.x, -pa.y, -pa.z}) * r,
    };
}

SegmentForm segment_form(const PropagatorCoeffs& left, const DriveStep& step) {
    const double E = step.energy();
    const Vec3 e = axis(step, E);
    return {left.C, vec_c(left).dot(e), left.D, vec_d(left).dot(e), E};
}

Evolver::Evolver(PulseSequence sequence) : sequence_(std::move(sequence)), period_(period_propagator(sequence_)) {}

PropagatorCoeffs Evolver::evolve(double t) const {
    if (!(t >= 0.0)) throw Error(ErrorCode::OutOfRange, "evolve requires t >= 0");
    const auto q = EvolutionQuery::split(t, sequence_.period());
    return power_apply(intra_period(sequence_, q.t_prime), period_, q.periods);
}

double Evolver::transition_probability(double t) const { return evolve(t).transition(); }

PropagatorCoeffs Evolver::window_start(std::int64_t k, std::size_t n) const {
    return power_apply(intra_period(sequence_, sequence_.boundary(n)), period_, k);
}

void Evolver::sample(std::span<const double> times, std::span<double> out) const {
    if (out.size() < times.size()) throw Error(ErrorCode::OutOfRange, "output span too small");
    const double T = sequence_.period();
    std::vector<double> local;
    std::size_t i = 0;
    while (i < times.size()) {
        if (!(times[i] >= 0.0)) throw Error(ErrorCode::OutOfRange, "sample time must be >= 0");
        const auto q = EvolutionQuery::split(times[i], T);
        const std::size_t n = segment_index(sequence_, q.t_prime);
        const double origin = static_cast<double>(q.periods) * T + sequence_.boundary(n);
        const double limit = origin + sequence_[n].tau;

        std::size_t j = i + 1;
        while (j < times.size() && times[j] >= times[i] && times[j] < limit) ++j;

        const auto f = segment_form(window_start(q.periods, n), sequence_[n]);
        const kernels::Segment seg{f.c0, f.cs, f.d0, f.ds, f.energy};

        local.resize(j - i);
        for (std::size_t k = i; k < j; ++k) local[k - i] = times[k] - origin;
        kernels::segment_p12(seg, local.data(), out.data() + i, j - i);
        i = j;
    }
}

std::vector<double> Evolver::sample(std::span<const double> times) const {
    std::vector<double> out(times.size());
    sample(times, out);
    return out;
}

PropagatorCoeffs evolve(const PulseSequence& sequence, double t) { return Evolver(sequence).evolve(t); }

double transition_probability(const PulseSequence& sequence, double t) { return evolve(sequence, t).transition(); }

std::vector<double> linspace(double t0, double t1, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = t0;
        return v;
    }
    const double h = (t1 - t0) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) v[i] = t0 + h * static_cast<double>(i);
    v[n - 1] = t1;
    return v;
}

}  // namespace tls
