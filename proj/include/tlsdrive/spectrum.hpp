#pragma once

#include <optional>
#include <vector>

#include "tlsdrive/core.hpp"

namespace tls {

// Sideband indices l for frequencies |2 omega_eff + l omega_T|. Harmonics
// h omega_T are reported for h = 1 .. max(|lo|, |hi|).
struct LRange {
    int lo = -2;
    int hi = 2;
};

// Within step n of period k, with local time s:
//   P = r0 + rc cos(2 E_n s) + rs sin(2 E_n s).
struct PiecewiseSpectralCoeffs {
    struct Window {
        double r0, rc, rs;
    };
    std::vector<Window> steps;
};

PiecewiseSpectralCoeffs piecewise_coeffs(const PulseSequence& sequence, long long period_index);

struct ModelError {
    double value = 0.0;
    double horizon = 0.0;
};

struct QuadratureOptions {
    int samples_per_step = 64;  // minimum Gauss nodes per step window
};

// Fourier projections of P12 over [0, K T] by Gauss-Legendre quadrature on every
// step window. Components above 2 pi / min(tau) or at zero frequency are dropped.
SpectralModel fourier_numeric(const PulseSequence& sequence, LRange range, int periods,
                              BranchConvention branch = BranchConvention::Principal,
                              const QuadratureOptions& options = {});

// The K -> infinity value of the same projections, from the exact
// quasiperiodic structure P(t' + kT) = f0(t') + f1c(t') cos 2k Theta + f1s(t') sin 2k Theta,
// integrated numerically over a single period.
SpectralModel fourier_limit(const PulseSequence& sequence, LRange range,
                            BranchConvention branch = BranchConvention::Principal,
                            const QuadratureOptions& options = {});

struct ClosedFormSpectrum {
    SpectralModel model;
    // Set when a probe frequency met an exponent 2 E_n within 1e-10; the
    // affected window integral used its degenerate limit.
    bool degenerate_frequency = false;
};

// Two-step closed form: per-window exponential integrals and geometric sums over
// periods. periods = nullopt takes the K -> infinity limit of the sums.
ClosedFormSpectrum fourier_closed_form_two_step(const PulseSequence& sequence, LRange range,
                                                std::optional<int> periods = std::nullopt,
                                                BranchConvention branch = BranchConvention::Principal);

// Offset plus the max_terms largest components with amplitude >= floor.
// Components sharing a frequency are kept once.
SpectralModel dominant_model(const SpectralModel& spectral, int max_terms = 3, double floor = 0.02);

// Maximum single-step transition probability max_n eps_n^2 / E_n^2.
double max_step_transition(const PulseSequence& sequence);

// 1/2 [1 - (1 - lam) cos 2 w t - lam cos 2 w_minus t], lam = p (1 - 2 v1 v2).
// Requires two steps with |Delta_eff| T < 1e-6.
SpectralModel two_step_empirical_model(const PulseSequence& sequence,
                                       BranchConvention branch = BranchConvention::Principal,
                                       std::optional<double> p = std::nullopt);

// (eps_eff / omega_eff)^2 sin^2(omega_eff t).
SpectralModel rabi_model(const PulseSequence& sequence, BranchConvention branch = BranchConvention::PositiveTrace);

// Time-averaged |P12 - model| over [0, t_s]; trapezoid on a uniform grid with
// at least 64 points per shortest step.
ModelError model_error(const PulseSequence& sequence, const SpectralModel& model, double horizon,
                       int samples_per_step = 64);

// Largest |P12 - model| on the same grid.
double model_sup_error(const PulseSequence& sequence, const SpectralModel& model, double horizon,
                       int samples_per_step = 64);

}  // namespace tls
