#include "tlsdrive/phenomena.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "tlsdrive/effective.hpp"
#include "tlsdrive/propagator.hpp"

namespace tls {
namespace {

void line(std::string& out, const char* name, const PhenomenonFlag& f, bool with_index) {
    char buf[128];
    if (with_index) {
        std::snprintf(buf, sizeof buf, "%s %d %.17g %d\n", name, f.present ? 1 : 0, f.residual, f.index);
    } else {
        std::snprintf(buf, sizeof buf, "%s %d %.17g\n", name, f.present ? 1 : 0, f.residual);
    }
    out += buf;
}

bool near_phase(double value, double target, double tol) { return std::abs(value - target) <= tol * target; }

}  // namespace

std::string PhenomenaReport::to_text() const {
    std::string out;
    line(out, "cdt", cdt, false);
    line(out, "complete_transition", complete_transition, false);
    line(out, "periodic", periodic, true);
    line(out, "stepwise", stepwise, true);
    line(out, "swapping", swapping, false);
    line(out, "beat", beat, false);
    return out;
}

PhenomenaReport classify(const PulseSequence& sequence, const ClassifyOptions& o) {
    if (!(o.tol > 0.0)) throw Error(ErrorCode::OutOfRange, "tol must be positive");
    const auto period = period_propagator(sequence);
    const auto& u = period.u;
    const double theta = rotation_angle(sequence, o.branch);

    PhenomenaReport r;
    r.theta = theta;
    r.cdt.residual = std::sqrt(u.C * u.C + u.D * u.D);
    r.cdt.present = r.cdt.residual < o.tol;
    r.complete_transition.residual = std::abs(u.B);
    r.complete_transition.present = r.complete_transition.residual < o.tol;

    r.periodic.residual = r.stepwise.residual = 1.0;
    for (int n = 1; n <= o.max_index; ++n) {
        const double x = n * period.theta;
        const double k = std::round(x / kPi);
        const double miss = std::abs(x - kPi * k);
        if (!r.periodic.present) {
            r.periodic.residual = std::min(r.periodic.residual, miss);
            if (miss < o.tol) {
                r.periodic = {true, miss, n};
                r.identity_sign = (static_cast<long long>(k) % 2 == 0) ? 1 : -1;
            }
        }
        const double c = std::abs(std::cos(x));
        if (!r.stepwise.present) {
            r.stepwise.residual = std::min(r.stepwise.residual, c);
            if (c < o.tol) r.stepwise = {true, c, n};
        }
    }
    r.swapping.residual = std::abs(std::cos(period.theta));
    r.swapping.present = r.swapping.residual < o.tol;

    const auto spectrum = fourier_limit(sequence, {}, o.branch);
    auto comps = spectrum.components;
    std::sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) { return a.amplitude > b.amplitude; });
    r.beat.residual = 1.0;
    if (comps.size() >= 2 && comps[1].amplitude > 0.0) {
        const double sum = comps[0].frequency + comps[1].frequency;
        const double diff = std::abs(comps[0].frequency - comps[1].frequency);
        const double ratio = comps[0].amplitude / comps[1].amplitude;
        r.beat.residual = sum > 0.0 ? diff / sum : 1.0;
        r.beat.present = diff > 0.0 && sum > o.beat_ratio * diff && ratio <= o.amplitude_band;
    }
    return r;
}

BeatPrediction beat_prediction(const PulseSequence& sequence, const BeatOptions& o) {
    const std::size_t N = sequence.size();
    int resonant = 0;
    int pi_steps = 0;
    std::size_t pi_index = 0;
    for (std::size_t n = 0; n < N; ++n) {
        const auto& s = sequence[n];
        const bool res = std::abs(s.delta) < o.resonant_tol * s.epsilon;
        const bool det = std::abs(s.delta) > o.detuned_ratio * s.epsilon;
        if (!res && !det) throw Error(ErrorCode::SetupViolation, "step neither resonant nor largely detuned");
        const double area = s.energy() * s.tau;
        if (near_phase(area, kPi, o.phase_tol)) {
            ++pi_steps;
            pi_index = n;
        } else if (!near_phase(area, 0.5 * kPi, o.phase_tol)) {
            throw Error(ErrorCode::SetupViolation, "pulse areas must be pi/2");
        }
        if (res) ++resonant;
    }
    const bool odd = N % 2 == 1;
    if (pi_steps != (odd ? 1 : 0)) {
        throw Error(ErrorCode::SetupViolation, odd ? "odd N needs exactly one pi pulse" : "even N needs pi/2 pulses");
    }

    const double T = sequence.period();
    const double w = rotation_angle(sequence, BranchConvention::PositiveTrace) / T;
    const double wm = 0.5 * sequence.omega_t() - w;
    const int n1 = resonant;
    const bool shifted = odd && std::abs(sequence[pi_index].delta) < o.resonant_tol * sequence[pi_index].epsilon;

    BeatPrediction b;
    b.n1 = n1;
    if (!shifted) {
        if (n1 % 2) {
            b.varpi1 = 0.5 * ((n1 - 1) * wm + (n1 + 1) * w);
            b.varpi1_prime = 0.5 * ((n1 + 1) * wm + (n1 - 1) * w);
        } else {
            b.varpi1 = 0.5 * (n1 * wm + (n1 - 2) * w);
            b.varpi1_prime = 0.5 * (n1 * wm + (n1 + 2) * w);
        }
    } else {
        if (n1 % 2) {
            b.varpi1 = 0.5 * ((n1 + 1) * wm + (n1 - 1) * w);
            b.varpi1_prime = 0.5 * ((n1 + 1) * wm + (n1 + 3) * w);
        } else {
            b.varpi1 = 0.5 * (n1 * wm + (n1 + 2) * w);
            b.varpi1_prime = 0.5 * ((n1 + 2) * wm + n1 * w);
        }
    }
    b.omega_b = std::abs(b.varpi1_prime - b.varpi1);
    if (o.fit_shift) b.t_p = fit_time_shift(sequence, b);
    return b;
}

double fit_time_shift(const PulseSequence& sequence, const BeatPrediction& beat) {
    const double T = sequence.period();
    const double span = beat.omega_b > 0.0 ? 4.0 * kPi / beat.omega_b : 40.0 * T;
    constexpr std::size_t kMaxSamples = 200000;
    const auto count = std::clamp<std::size_t>(static_cast<std::size_t>(span / T * 60.0) + 1, 2, kMaxSamples);
    const auto t = linspace(0.0, span, count);
    const auto p = Evolver(sequence).sample(t);

    auto cost = [&](double tp) {
        BeatPrediction b = beat;
        b.t_p = tp;
        double acc = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double d = p[i] - b(t[i]);
            acc += d * d;
        }
        return acc;
    };
    const double fastest = std::max({std::abs(beat.varpi1), std::abs(beat.varpi1_prime), 1e-300});
    const double reach = kPi / fastest;
    constexpr int kGrid = 201;
    const double h = 2.0 * reach / (kGrid - 1);
    int best = 0;
    double best_cost = cost(-reach);
    for (int i = 1; i < kGrid; ++i) {
        const double c = cost(-reach + h * i);
        if (c < best_cost) {
            best_cost = c;
            best = i;
        }
    }
    const double lo = -reach + h * std::max(best - 1, 0);
    const double hi = -reach + h * std::min(best + 1, kGrid - 1);
    return boost::math::tools::brent_find_minima(cost, lo, hi, 40).first;
}

PhaseEstimate phase_from_beat(double omega_b, const PulseSequence& sequence, double slack) {
    if (sequence.size() != 2) throw Error(ErrorCode::PreconditionViolation, "phase inversion needs two steps");
    const auto& s2 = sequence[1];
    const double x = omega_b * sequence.period() * s2.energy() / (2.0 * s2.epsilon);
    if (!(x >= 0.0) || x > 1.0 + slack) throw Error(ErrorCode::OutOfRange, "beat frequency outside invertible range");
    PhaseEstimate e;
    e.clamped = x > 1.0;
    e.difference = std::acos(std::min(x, 1.0));
    const double t1 = sequence[0].theta;
    e.theta2 = {wrap_angle(t1 + e.difference), wrap_angle(t1 - e.difference)};
    return e;
}

double complete_transition_time(double eps1, double eps2, double tau1, double tau2) {
    if (!(eps1 > 0.0 && eps2 > 0.0 && tau1 > 0.0 && tau2 > 0.0)) {
        throw Error(ErrorCode::PreconditionViolation, "couplings and durations must be positive");
    }
    if (tau1 >= kPi / (2.0 * eps1) || tau2 >= kPi / (2.0 * eps2)) {
        throw Error(ErrorCode::PreconditionViolation, "each step must stay below a pi/2 rotation");
    }
    return kPi * (tau1 + tau2) / (2.0 * (eps1 * tau1 + eps2 * tau2));
}

namespace {

double& field(DriveStep& s, FreeParameter free) {
    switch (free) {
        case FreeParameter::Detuning: return s.delta;
        case FreeParameter::Coupling: return s.epsilon;
        case FreeParameter::Phase: return s.theta;
        case FreeParameter::Durations: return s.tau;
    }
    return s.tau;
}

}  // namespace

PulseSequence design_manipulation(const PulseSequence& sequence, DesignTarget target, FreeParameter free,
                                  Bracket bracket, std::size_t step) {
    if (sequence.size() != 2) throw Error(ErrorCode::PreconditionViolation, "designer works on two-step drives");
    if (step > 1) throw Error(ErrorCode::OutOfRange, "step index must be 0 or 1");
    std::vector<DriveStep> steps(sequence.steps().begin(), sequence.steps().end());

    if (target == DesignTarget::Cdt) {
        DriveStep& a = steps[1 - step];
        DriveStep& b = steps[step];
        b.theta = wrap_angle(a.theta + kPi);
        switch (free) {
            case FreeParameter::Coupling: b.epsilon = a.epsilon * a.tau / b.tau; break;
            case FreeParameter::Phase:
            case FreeParameter::Durations: b.tau = a.epsilon * a.tau / b.epsilon; break;
            case FreeParameter::Detuning:
                throw Error(ErrorCode::PreconditionViolation, "CDT design matches areas through coupling or duration");
        }
        return PulseSequence(std::move(steps));
    }

    if (!(bracket.hi > bracket.lo)) throw Error(ErrorCode::OutOfRange, "empty search bracket");
    auto residual = [&](double x) {
        auto trial = steps;
        field(trial[step], free) = x;
        return period_propagator(PulseSequence(std::move(trial))).u.B;
    };
    // First sign change on a coarse scan, then bisection.
    constexpr int kScan = 256;
    double a = bracket.lo, fa = residual(a);
    bool found = fa == 0.0;
    double b = a, fb = fa;
    for (int i = 1; i <= kScan && !found; ++i) {
        b = bracket.lo + (bracket.hi - bracket.lo) * i / kScan;
        fb = residual(b);
        if (fb == 0.0 || (fa < 0.0) != (fb < 0.0)) {
            found = true;
        } else {
            a = b;
            fa = fb;
        }
    }
    if (!found) throw Error(ErrorCode::NoRoot, "no sign change of B in the bracket");
    double root = fa == 0.0 ? a : b;
    if (fa != 0.0 && fb != 0.0) {
        const auto r = boost::math::tools::bisect(residual, a, b, boost::math::tools::eps_tolerance<double>(50));
        root = 0.5 * (r.first + r.second);
    }
    field(steps[step], free) = root;
    return PulseSequence(std::move(steps));
}

}  // namespace tls
