#include "tlsdrive/spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include <boost/math/quadrature/gauss.hpp>

#include "tlsdrive/effective.hpp"
#include "tlsdrive/kernels.hpp"
#include "tlsdrive/propagator.hpp"

namespace tls {
namespace {

using cplx = std::complex<double>;

constexpr int kPanelNodes = 16;
constexpr double kZeroFrequency = 1e-9;  // relative to omega_T
constexpr double kCommensurate = 1e-12;

using PanelRule = boost::math::quadrature::gauss<double, kPanelNodes>;

// Gauss nodes and weights mapped to [0, 1].
struct Rule {
    std::array<double, kPanelNodes> x, w;
};

const Rule& panel_rule() {
    static const Rule rule = [] {
        Rule r{};
        const auto& abs = PanelRule::abscissa();
        const auto& wts = PanelRule::weights();
        int i = 0;
        for (std::size_t k = 0; k < abs.size(); ++k) {
            const double z = abs[k], w = 0.5 * wts[k];
            r.x[i] = 0.5 * (1.0 + z);
            r.w[i++] = w;
            if (z != 0.0) {
                r.x[i] = 0.5 * (1.0 - z);
                r.w[i++] = w;
            }
        }
        return r;
    }();
    return rule;
}

// Nodes and weights on [0, tau], with enough panels to resolve `rate` rad per unit time.
void window_nodes(double tau, double rate, int min_nodes, std::vector<double>& s, std::vector<double>& w) {
    const Rule& r = panel_rule();
    const int by_count = (min_nodes + kPanelNodes - 1) / kPanelNodes;
    const int by_rate = static_cast<int>(std::ceil(rate * tau / (2.0 * kPi)));
    const int panels = std::max({1, by_count, by_rate});
    const double h = tau / panels;
    s.resize(static_cast<std::size_t>(panels) * kPanelNodes);
    w.resize(s.size());
    for (int p = 0; p < panels; ++p) {
        for (int i = 0; i < kPanelNodes; ++i) {
            s[p * kPanelNodes + i] = h * (p + r.x[i]);
            w[p * kPanelNodes + i] = h * r.w[i];
        }
    }
}

struct Probe {
    double omega;
    int index;
    SpectralFamily family;
};

double fold_limit(const PulseSequence& seq) { return 2.0 * kPi / seq.min_duration(); }

std::vector<Probe> probes(const PulseSequence& seq, LRange range, double omega_eff) {
    const double wt = seq.omega_t();
    const double limit = fold_limit(seq);
    std::vector<Probe> out;
    for (int l = range.lo; l <= range.hi; ++l) {
        const double f = 2.0 * omega_eff + l * wt;
        if (std::abs(f) <= kZeroFrequency * wt || std::abs(f) > limit) continue;
        out.push_back({f, l, SpectralFamily::Sideband});
    }
    const int hmax = std::max(std::abs(range.lo), std::abs(range.hi));
    for (int h = 1; h <= hmax; ++h) {
        const double f = h * wt;
        if (f > limit) break;
        out.push_back({f, h, SpectralFamily::Harmonic});
    }
    return out;
}

double max_rate(const PulseSequence& seq, const std::vector<Probe>& ps) {
    double top = 0.0;
    for (const auto& p : ps) top = std::max(top, std::abs(p.omega));
    double e = 0.0;
    for (const auto& step : seq.steps()) e = std::max(e, step.energy());
    return top + 2.0 * e;
}

SpectralModel assemble(double offset, const std::vector<Probe>& ps, const std::vector<cplx>& z) {
    SpectralModel m;
    m.offset = offset;
    for (std::size_t i = 0; i < ps.size(); ++i) m.add(ps[i].omega, std::abs(z[i]), std::arg(z[i]), ps[i].index, ps[i].family);
    return m;
}

// Long-run average of exp(i k x) over k.
double commensurate(double x) { return std::abs(wrap_angle(x)) < kCommensurate ? 1.0 : 0.0; }

// (1/K) sum_{k<K} exp(i k x), or its limit when periods is empty.
cplx geometric_mean(double x, std::optional<int> periods) {
    const double r = wrap_angle(x);
    if (std::abs(r) < kCommensurate) return 1.0;
    if (!periods) return 0.0;
    const double K = *periods;
    return std::polar(std::sin(0.5 * K * r) / (K * std::sin(0.5 * r)), 0.5 * (K - 1.0) * r);
}

// Integral of exp(i nu s) over [0, tau].
cplx exp_integral(double nu, double tau) {
    const double x = nu * tau;
    if (std::abs(x) < 1e-6) return tau * cplx{1.0 - x * x / 6.0, 0.5 * x - x * x * x / 24.0};
    return (std::polar(1.0, x) - 1.0) / cplx{0.0, nu};
}

// sin(k Theta) part of the operator at the start of step n: intra * U(T)^k =
// q cos(k Theta) + g sin(k Theta).
PropagatorCoeffs sine_part(const PropagatorCoeffs& q, const PeriodPropagator& p) {
    if (p.sin_theta == 0.0) return {0.0, 0.0, 0.0, 0.0};
    const Vec3 pa = vec_a(p.u);
    const double r = 1.0 / p.sin_theta;
    return {
        -vec_a(q).dot(pa) * r,
        vec_b(q).dot({-pa.x, -pa.y, pa.z}) * r,
        vec_c(q).dot({-pa.x, pa.y, -pa.z}) * r,
        vec_d(q).dot({pa.x, -pa.y, -pa.z}) * r,
    };
}

}  // namespace

PiecewiseSpectralCoeffs piecewise_coeffs(const PulseSequence& sequence, long long period_index) {
    Evolver ev(sequence);
    PiecewiseSpectralCoeffs out;
    for (std::size_t n = 0; n < sequence.size(); ++n) {
        const auto f = segment_form(ev.window_start(period_index, n), sequence[n]);
        out.steps.push_back({0.5 * (f.c0 * f.c0 + f.cs * f.cs + f.d0 * f.d0 + f.ds * f.ds),
                             0.5 * (f.c0 * f.c0 - f.cs * f.cs + f.d0 * f.d0 - f.ds * f.ds),
                             f.c0 * f.cs + f.d0 * f.ds});
    }
    return out;
}

SpectralModel fourier_numeric(const PulseSequence& sequence, LRange range, int periods, BranchConvention branch,
                              const QuadratureOptions& options) {
    if (periods < 1) throw Error(ErrorCode::OutOfRange, "need at least one period");
    const double T = sequence.period();
    const double omega_eff = rotation_angle(sequence, branch) / T;
    const auto ps = probes(sequence, range, omega_eff);
    const double rate = max_rate(sequence, ps);
    Evolver ev(sequence);

    std::vector<cplx> z(ps.size(), 0.0);
    double mean = 0.0;
    std::vector<double> s, w, p;
    for (std::size_t n = 0; n < sequence.size(); ++n) {
        window_nodes(sequence[n].tau, rate, options.samples_per_step, s, w);
        p.resize(s.size());
        for (int k = 0; k < periods; ++k) {
            const auto f = segment_form(ev.window_start(k, n), sequence[n]);
            kernels::segment_p12({f.c0, f.cs, f.d0, f.ds, f.energy}, s.data(), p.data(), s.size());
            const double origin = k * T + sequence.boundary(n);
            for (std::size_t i = 0; i < s.size(); ++i) mean += w[i] * p[i];
            for (std::size_t j = 0; j < ps.size(); ++j) {
                const auto pr = kernels::project(s.data(), w.data(), p.data(), s.size(), ps[j].omega);
                z[j] += std::polar(1.0, ps[j].omega * origin) * cplx{pr.re, pr.im};
            }
        }
    }
    const double length = periods * T;
    for (auto& v : z) v *= 2.0 / length;
    return assemble(mean / length, ps, z);
}

SpectralModel fourier_limit(const PulseSequence& sequence, LRange range, BranchConvention branch,
                            const QuadratureOptions& options) {
    const double T = sequence.period();
    const auto period = period_propagator(sequence);
    const double theta = period.theta;
    const double omega_eff = rotation_angle(sequence, branch) / T;
    const auto ps = probes(sequence, range, omega_eff);
    const double rate = max_rate(sequence, ps);

    // Weights of f0, f1c, f1s in the long-run average for each probe.
    struct Mix {
        double f0;
        cplx c, s;
    };
    std::vector<Mix> mix;
    auto weights = [&](double omega) {
        const double psi = omega * T;
        const double up = commensurate(psi + 2.0 * theta), down = commensurate(psi - 2.0 * theta);
        return Mix{commensurate(psi), 0.5 * (up + down), (up - down) / cplx{0.0, 2.0}};
    };
    for (const auto& pr : ps) mix.push_back(weights(pr.omega));
    const Mix mean_mix = weights(0.0);

    std::vector<cplx> z(ps.size(), 0.0);
    double mean = 0.0;
    std::vector<double> s, w;
    PropagatorCoeffs left;
    for (std::size_t n = 0; n < sequence.size(); ++n) {
        const auto& step = sequence[n];
        window_nodes(step.tau, rate, options.samples_per_step, s, w);
        for (std::size_t i = 0; i < s.size(); ++i) {
            const auto q = compose(left, step, s[i]);
            const auto g = sine_part(q, period);
            const double f0 = 0.5 * (q.C * q.C + g.C * g.C + q.D * q.D + g.D * g.D);
            const double f1c = 0.5 * (q.C * q.C - g.C * g.C + q.D * q.D - g.D * g.D);
            const double f1s = q.C * g.C + q.D * g.D;
            const double t = sequence.boundary(n) + s[i];
            mean += w[i] * (mean_mix.f0 * f0 + (mean_mix.c * f1c + mean_mix.s * f1s).real());
            for (std::size_t j = 0; j < ps.size(); ++j) {
                const cplx avg = mix[j].f0 * f0 + mix[j].c * f1c + mix[j].s * f1s;
                z[j] += w[i] * avg * std::polar(1.0, ps[j].omega * t);
            }
        }
        left = compose(left, step, step.tau);
    }
    for (auto& v : z) v *= 2.0 / T;
    return assemble(mean / T, ps, z);
}

ClosedFormSpectrum fourier_closed_form_two_step(const PulseSequence& sequence, LRange range,
                                                std::optional<int> periods, BranchConvention branch) {
    if (sequence.size() != 2) throw Error(ErrorCode::PreconditionViolation, "closed form requires two steps");
    if (periods && *periods < 1) throw Error(ErrorCode::OutOfRange, "need at least one period");
    const double T = sequence.period();
    const auto period = period_propagator(sequence);
    const double theta = period.theta;
    const auto ps = probes(sequence, range, rotation_angle(sequence, branch) / T);

    // P on step n of period k is sum_{J,M} coef[n][J][M] exp(i J k Theta) exp(i M E_n s), J, M in {-2, 0, 2}.
    using Grid = std::array<std::array<cplx, 3>, 3>;
    std::vector<Grid> coef(sequence.size());
    for (std::size_t n = 0; n < sequence.size(); ++n) {
        const auto q = intra_period(sequence, sequence.boundary(n));
        const auto g = sine_part(q, period);
        const auto fq = segment_form(q, sequence[n]);
        const auto fg = segment_form(g, sequence[n]);
        // gamma[j][m] for exponents j, m in {-1, +1}.
        auto gamma = [](double cc, double cs, double sc, double ss) {
            std::array<std::array<cplx, 2>, 2> gm{};
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    const double j = a ? 1.0 : -1.0, m = b ? 1.0 : -1.0;
                    gm[a][b] = 0.25 * cplx{cc - j * m * ss, -(m * cs + j * sc)};
                }
            return gm;
        };
        const auto gc = gamma(fq.c0, fq.cs, fg.c0, fg.cs);
        const auto gd = gamma(fq.d0, fq.ds, fg.d0, fg.ds);
        Grid grid{};
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c)
                    for (int d = 0; d < 2; ++d) grid[a + c][b + d] += gc[a][b] * gc[c][d] + gd[a][b] * gd[c][d];
        coef[n] = grid;
    }

    ClosedFormSpectrum out;
    auto project = [&](double omega) {
        cplx acc = 0.0;
        for (std::size_t n = 0; n < sequence.size(); ++n) {
            const auto& step = sequence[n];
            const double E = step.energy();
            const cplx shift = std::polar(1.0, omega * sequence.boundary(n));
            for (int J = 0; J < 3; ++J) {
                const cplx sum = geometric_mean(omega * T + (2 * J - 2) * theta, periods);
                if (sum == 0.0) continue;
                for (int M = 0; M < 3; ++M) {
                    const double nu = (2 * M - 2) * E + omega;
                    if (M != 1 && std::abs(nu) < 1e-10) out.degenerate_frequency = true;
                    acc += coef[n][J][M] * shift * sum * exp_integral(nu, step.tau);
                }
            }
        }
        return acc * (2.0 / T);
    };
    std::vector<cplx> z;
    for (const auto& pr : ps) z.push_back(project(pr.omega));
    out.model = assemble(0.5 * project(0.0).real(), ps, z);
    return out;
}

SpectralModel dominant_model(const SpectralModel& spectral, int max_terms, double floor) {
    std::vector<SpectralComponent> sorted = spectral.components;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.amplitude > b.amplitude; });
    SpectralModel out;
    out.offset = spectral.offset;
    for (const auto& c : sorted) {
        if (static_cast<int>(out.components.size()) >= max_terms) break;
        if (c.amplitude < floor) break;
        const bool duplicate = std::any_of(out.components.begin(), out.components.end(), [&](const auto& k) {
            return std::abs(k.frequency - c.frequency) <= 1e-9 * std::max(1.0, c.frequency);
        });
        if (!duplicate) out.components.push_back(c);
    }
    return out;
}

double max_step_transition(const PulseSequence& sequence) {
    double p = 0.0;
    for (const auto& s : sequence.steps()) {
        const double E = s.energy();
        if (E > 0.0) p = std::max(p, s.epsilon * s.epsilon / (E * E));
    }
    return p;
}

SpectralModel two_step_empirical_model(const PulseSequence& sequence, BranchConvention branch, std::optional<double> p) {
    if (sequence.size() != 2) throw Error(ErrorCode::PreconditionViolation, "empirical model requires two steps");
    const auto h = effective_hamiltonian(sequence, branch);
    if (std::abs(h.delta) * sequence.period() >= 1e-6) {
        throw Error(ErrorCode::PreconditionViolation, "empirical model requires Delta_eff = 0");
    }
    const double v1 = sequence[0].dynamical_phase(), v2 = sequence[1].dynamical_phase();
    const double lambda = p.value_or(max_step_transition(sequence)) * (1.0 - 2.0 * v1 * v2);
    SpectralModel m;
    m.offset = 0.5;
    m.add(2.0 * h.omega(), -0.5 * (1.0 - lambda), 0.0, 0, SpectralFamily::Sideband);
    m.add(2.0 * h.omega_minus(), -0.5 * lambda, 0.0, -1, SpectralFamily::Sideband);
    return m;
}

SpectralModel rabi_model(const PulseSequence& sequence, BranchConvention branch) {
    const auto h = effective_hamiltonian(sequence, branch);
    const double w = h.omega();
    const double amp = w > 0.0 ? h.epsilon * h.epsilon / (w * w) : 0.0;
    SpectralModel m;
    m.offset = 0.5 * amp;
    m.add(2.0 * w, -0.5 * amp, 0.0, 0, SpectralFamily::Sideband);
    return m;
}

namespace {

template <class Reduce>
void walk_error_grid(const PulseSequence& sequence, const SpectralModel& model, double horizon, int samples_per_step,
                     Reduce&& reduce) {
    if (!(horizon > 0.0)) throw Error(ErrorCode::OutOfRange, "horizon must be positive");
    double h = sequence.min_duration() / std::max(samples_per_step, 1);
    for (const auto& c : model.components)
        if (c.frequency > 0.0) h = std::min(h, 2.0 * kPi / (16.0 * c.frequency));
    const auto intervals = static_cast<std::size_t>(std::ceil(horizon / h));
    const double dt = horizon / static_cast<double>(intervals);

    std::vector<double> f, a, ph;
    for (const auto& c : model.components) {
        f.push_back(c.frequency);
        a.push_back(c.amplitude);
        ph.push_back(c.phase);
    }
    const kernels::ModelView view{model.offset, f.data(), a.data(), ph.data(), f.size()};
    Evolver ev(sequence);
    constexpr std::size_t kChunk = 1 << 16;
    std::vector<double> t, w, p;
    for (std::size_t start = 0; start <= intervals; start += kChunk) {
        const std::size_t stop = std::min(intervals + 1, start + kChunk);
        const std::size_t n = stop - start;
        t.resize(n);
        w.resize(n);
        p.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t idx = start + i;
            t[i] = dt * static_cast<double>(idx);
            w[i] = (idx == 0 || idx == intervals) ? 0.5 * dt : dt;
        }
        ev.sample(t, p);
        reduce(view, t, w, p);
    }
}

}  // namespace

ModelError model_error(const PulseSequence& sequence, const SpectralModel& model, double horizon, int samples_per_step) {
    double acc = 0.0;
    walk_error_grid(sequence, model, horizon, samples_per_step,
                    [&](const kernels::ModelView& v, const std::vector<double>& t, const std::vector<double>& w,
                        const std::vector<double>& p) {
                        acc += kernels::weighted_abs_error(v, t.data(), w.data(), p.data(), t.size());
                    });
    return {acc / horizon, horizon};
}

double model_sup_error(const PulseSequence& sequence, const SpectralModel& model, double horizon, int samples_per_step) {
    double worst = 0.0;
    std::vector<double> m;
    walk_error_grid(sequence, model, horizon, samples_per_step,
                    [&](const kernels::ModelView& v, const std::vector<double>& t, const std::vector<double>&,
                        const std::vector<double>& p) {
                        m.resize(t.size());
                        kernels::eval_model(v, t.data(), m.data(), t.size());
                        for (std::size_t i = 0; i < t.size(); ++i) worst = std::max(worst, std::abs(p[i] - m[i]));
                    });
    return worst;
}

}  // namespace tls
