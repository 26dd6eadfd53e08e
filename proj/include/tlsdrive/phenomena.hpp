#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "tlsdrive/core.hpp"
#include "tlsdrive/spectrum.hpp"

namespace tls {

struct PhenomenonFlag {
    bool present = false;
    double residual = 0.0;
    int index = 0;  // N1 for periodic / stepwise, else 0
};

struct PhenomenaReport {
    PhenomenonFlag cdt;                  // residual sqrt(C^2 + D^2) of U(T)
    PhenomenonFlag complete_transition;  // residual |B| of U(T)
    PhenomenonFlag periodic;             // U(N1 T) = identity_sign * I
    int identity_sign = 1;
    PhenomenonFlag stepwise;             // |cos N1' Theta|
    PhenomenonFlag swapping;             // |cos Theta|
    PhenomenonFlag beat;                 // |diff| / |sum| of the two dominant frequencies
    double theta = 0.0;

    // One "name present residual [index]" line per flag.
    std::string to_text() const;
};

struct ClassifyOptions {
    double tol = 1e-3;
    int max_index = 64;
    BranchConvention branch = BranchConvention::Principal;
    double beat_ratio = 10.0;
    double amplitude_band = 3.0;
};

PhenomenaReport classify(const PulseSequence& sequence, const ClassifyOptions& options = {});

struct BeatOptions {
    double resonant_tol = 0.01;    // |delta| < resonant_tol * eps
    double detuned_ratio = 10.0;   // |delta| > detuned_ratio * eps
    double phase_tol = 1e-6;       // relative tolerance on E tau = pi/2 or pi
    bool fit_shift = true;
};

// Frequencies of the two-tone beat model for the resonant/detuned setup.
// Throws SetupViolation when a step is in neither regime or when the pulse
// areas do not match the required pi/2 (and one pi for odd N).
BeatPrediction beat_prediction(const PulseSequence& sequence, const BeatOptions& options = {});

// Least-squares t_p of the beat model against sampled P12 over [0, 4 pi / omega_b].
double fit_time_shift(const PulseSequence& sequence, const BeatPrediction& beat);

struct PhaseEstimate {
    double difference = 0.0;       // |theta_1 - theta_2| in [0, pi]
    std::array<double, 2> theta2;  // theta_1 + difference, theta_1 - difference
    bool clamped = false;
};

// Inverts omega_b T E_2 / (2 eps_2) = cos(theta_1 - theta_2). Values up to
// (1 + slack) times the invertible maximum are clamped; beyond that OutOfRange.
PhaseEstimate phase_from_beat(double omega_b, const PulseSequence& sequence, double slack = 0.0);

// pi (tau1 + tau2) / (2 (eps1 tau1 + eps2 tau2)) for a resonant two-step drive.
double complete_transition_time(double eps1, double eps2, double tau1, double tau2);

enum class DesignTarget { CompleteTransition, Cdt };
enum class FreeParameter { Detuning, Coupling, Phase, Durations };

struct Bracket {
    double lo = 0.0;
    double hi = 0.0;
};

// Returns a copy of the two-step `sequence` with the free parameter of `step`
// (0-based) adjusted. CompleteTransition bisects B_N(T) over the bracket;
// Cdt sets theta_2 = theta_1 + pi with matched pulse areas.
PulseSequence design_manipulation(const PulseSequence& sequence, DesignTarget target, FreeParameter free,
                                  Bracket bracket = {}, std::size_t step = 1);

}  // namespace tls
