#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tls {

enum class ErrorCode {
    EmptySequence,
    NonPositiveDuration,
    NonFinite,
    OutOfRange,
    BranchAmbiguity,
    DegenerateFrequency,
    PreconditionViolation,
    NoRoot,
    NoEnvelope,
    Undersampled,
    SetupViolation,
    ParseError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// True for error codes that describe a numerical-domain failure rather than bad input.
bool is_numerical(ErrorCode code);

constexpr double kPi = 3.14159265358979323846;

// Folds an angle into (-pi, pi].
double wrap_angle(double theta);

// H = delta |2><2| + eps (e^{i theta} |1><2| + h.c.), held for tau.
struct DriveStep {
    double delta = 0.0;
    double epsilon = 0.0;
    double theta = 0.0;
    double tau = 0.0;

    double energy() const { return std::sqrt(epsilon * epsilon + 0.25 * delta * delta); }
    // Pulse area in units of pi.
    double dynamical_phase() const { return energy() * tau / kPi; }
};

class PulseSequence {
public:
    PulseSequence() = default;
    // Runs validate(); throws tls::Error on bad input.
    explicit PulseSequence(std::vector<DriveStep> steps);

    std::span<const DriveStep> steps() const { return steps_; }
    std::size_t size() const { return steps_.size(); }
    const DriveStep& operator[](std::size_t n) const { return steps_[n]; }

    double period() const { return period_; }
    double omega_t() const { return 2.0 * kPi / period_; }
    // boundary(n) = tau_1 + ... + tau_n, boundary(0) = 0.
    double boundary(std::size_t n) const { return cumulative_[n]; }
    double min_duration() const;

private:
    std::vector<DriveStep> steps_;
    std::vector<double> cumulative_;
    double period_ = 0.0;
};

// Normalizes steps: negative coupling folded into theta, theta into (-pi, pi].
std::vector<DriveStep> validate(std::vector<DriveStep> steps);
PulseSequence validate(const PulseSequence& sequence);

// U = [[A + iB, C - iD], [-C - iD, A - iB]].
struct PropagatorCoeffs {
    double A = 1.0;
    double B = 0.0;
    double C = 0.0;
    double D = 0.0;

    static PropagatorCoeffs identity() { return {}; }
    double norm2() const { return A * A + B * B + C * C + D * D; }
    double transition() const { return C * C + D * D; }
    PropagatorCoeffs negated() const { return {-A, -B, -C, -D}; }
};

struct Vec3 {
    double x, y, z;
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
};

// Row vectors of the composition rule.
inline Vec3 vec_a(const PropagatorCoeffs& u) { return {u.D, u.C, u.B}; }
inline Vec3 vec_b(const PropagatorCoeffs& u) { return {u.C, -u.D, u.A}; }
inline Vec3 vec_c(const PropagatorCoeffs& u) { return {-u.B, u.A, u.D}; }
inline Vec3 vec_d(const PropagatorCoeffs& u) { return {u.A, u.B, -u.C}; }

// How the per-period rotation angle is chosen when A_N(T) < 0.
//   Principal: Theta = arccos A in [0, pi].
//   PositiveTrace: use -U(T) so that A >= 0 and Theta in [0, pi/2].
//   Adaptive: flip only when the intra-period excursion is smaller than the
//   Rabi amplitude reached at pi/(2 omega_eff).
enum class BranchConvention { Principal, PositiveTrace, Adaptive };

const char* to_string(BranchConvention branch);
BranchConvention parse_branch(const std::string& text);

struct EffectiveHamiltonian {
    double delta = 0.0;
    double epsilon = 0.0;
    double theta = 0.0;
    double period = 1.0;
    bool flipped = false;  // built from -U(T)

    double omega() const { return std::sqrt(epsilon * epsilon + 0.25 * delta * delta); }
    double omega_t() const { return 2.0 * kPi / period; }
    double omega_plus() const { return 0.5 * omega_t() + omega(); }
    double omega_minus() const { return 0.5 * omega_t() - omega(); }
};

struct MicromotionParams {
    double delta = 0.0;
    double epsilon = 0.0;
    double theta = 0.0;
};

enum class SpectralFamily { Offset, Sideband, Harmonic, Other };

const char* to_string(SpectralFamily family);

struct SpectralComponent {
    double frequency = 0.0;
    double amplitude = 0.0;
    double phase = 0.0;
    int index = 0;
    SpectralFamily family = SpectralFamily::Other;
};

// P(t) = offset + sum b cos(omega t - phi).
struct SpectralModel {
    double offset = 0.0;
    std::vector<SpectralComponent> components;

    double operator()(double t) const;
    // Appends amplitude * cos(frequency t - phase), normalized to frequency >= 0 and amplitude >= 0.
    SpectralModel& add(double frequency, double amplitude, double phase, int index = 0,
                       SpectralFamily family = SpectralFamily::Other);
};

struct BeatPrediction {
    double varpi1 = 0.0;
    double varpi1_prime = 0.0;
    double omega_b = 0.0;
    double t_p = 0.0;
    int n1 = 0;

    bool is_beat(double ratio = 10.0) const;
    // 1/2 [sin^2 varpi1 (t - t_p) + sin^2 varpi1' (t - t_p)]
    double operator()(double t) const;
    // The same expression as offset 1/2 and two cosines at 2 varpi1 and 2 varpi1'.
    SpectralModel as_model() const;
};

}  // namespace tls
