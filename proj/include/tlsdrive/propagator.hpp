#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tlsdrive/core.hpp"

namespace tls {

// One constant segment, from 0 to s.
PropagatorCoeffs step_propagator(const DriveStep& step, double s);

// Appends a segment of length s after `left`: U_step(s) * U_left.
PropagatorCoeffs compose(const PropagatorCoeffs& left, const DriveStep& step, double s);

// Evolution operator from 0 to t' within the first period, 0 <= t' <= T.
PropagatorCoeffs intra_period(const PulseSequence& sequence, double t_prime);

struct PeriodPropagator {
    PropagatorCoeffs u;
    double theta = 0.0;      // atan2(|(B, C, D)|, A), equal to arccos of clamped A
    double sin_theta = 0.0;  // |(B, C, D)|
    bool negative_trace() const { return u.A < 0.0; }
};

PeriodPropagator period_propagator(const PulseSequence& sequence);

// |sin(Theta)| below which the analytic integer limits are reported as degenerate.
constexpr double kDegenerateSinTheta = 1e-8;

struct EvolutionQuery {
    std::int64_t periods = 0;
    double t_prime = 0.0;

    // t = periods * T + t_prime; lands on t_prime = 0 when t is within rounding of a period edge.
    static EvolutionQuery split(double t, double period);
};

// U(T)^n applied after intra: intra * U(T)^n in operator order.
PropagatorCoeffs power_apply(const PropagatorCoeffs& intra, const PeriodPropagator& period, std::int64_t n);

// Inside one segment entered with operator `left`, at local time s:
//   C(s) = c0 cos(E s) + cs sin(E s),  D(s) = d0 cos(E s) + ds sin(E s).
struct SegmentForm {
    double c0, cs, d0, ds, energy;
};

SegmentForm segment_form(const PropagatorCoeffs& left, const DriveStep& step);

// Caches U(T) so repeated queries cost O(N) each.
class Evolver {
public:
    explicit Evolver(PulseSequence sequence);

    const PulseSequence& sequence() const { return sequence_; }
    const PeriodPropagator& period() const { return period_; }

    PropagatorCoeffs evolve(double t) const;
    double transition_probability(double t) const;
    // Operator at the start of step n (0-based) of period k.
    PropagatorCoeffs window_start(std::int64_t k, std::size_t n) const;

    // P12 at each time. Samples are grouped by segment and evaluated with the
    // batch kernels; sorted input is fastest.
    void sample(std::span<const double> times, std::span<double> out) const;
    std::vector<double> sample(std::span<const double> times) const;

private:
    PulseSequence sequence_;
    PeriodPropagator period_;
};

PropagatorCoeffs evolve(const PulseSequence& sequence, double t);
double transition_probability(const PulseSequence& sequence, double t);

// n points from t0 to t1 inclusive.
std::vector<double> linspace(double t0, double t1, std::size_t n);

}  // namespace tls
