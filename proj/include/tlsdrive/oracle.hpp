#pragma once

// Brute-force references for tests and acceptance runs. Nothing here shares
// code with the propagator: matrices are complex 2x2 and every segment
// exponential is computed from scratch.

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "tlsdrive/core.hpp"

namespace tls::oracle {

using cplx = std::complex<double>;

struct Mat2 {
    std::array<cplx, 4> m{cplx{1.0}, cplx{0.0}, cplx{0.0}, cplx{1.0}};  // row major

    cplx& operator()(int r, int c) { return m[2 * r + c]; }
    cplx operator()(int r, int c) const { return m[2 * r + c]; }
    static Mat2 zero();
    Mat2 operator*(const Mat2& o) const;
    Mat2 operator*(cplx s) const;
    Mat2 operator+(const Mat2& o) const;
    Mat2 adjoint() const;
};

// Largest entrywise modulus of a - b.
double max_abs_diff(const Mat2& a, const Mat2& b);
// Largest entrywise modulus of a^dagger a - I.
double unitarity_defect(const Mat2& a);

// Hamiltonian of one step in the {|1>, |2>} basis, including the Delta |2><2| trace.
Mat2 hamiltonian(const DriveStep& step);

enum class ExpMethod { Eigen, ScalingSquaring };

// exp(-i H s) for Hermitian H.
Mat2 expm_hermitian(const Mat2& h, double s, ExpMethod method = ExpMethod::Eigen);

// Chronological product of segment exponentials up to time t. Each step is cut
// into `substeps` equal pieces.
Mat2 brute_force_evolve(const PulseSequence& sequence, double t, int substeps = 1,
                        ExpMethod method = ExpMethod::Eigen);

// Sum of Delta_n / 2 times the time spent in step n up to t. The full
// evolution differs from the traceless one by exp(-i * this).
double trace_phase(const PulseSequence& sequence, double t);

// Matrix form of a coefficient quadruple, [[A + iB, C - iD], [-C - iD, A - iB]].
Mat2 to_matrix(const PropagatorCoeffs& u);

// (2 / L) * integral of P(t) exp(i w t) over the sampled span by the composite
// trapezoid rule. Samples are uniform: t_k = t0 + k dt.
cplx numeric_fourier(std::span<const double> p, double t0, double dt, double omega);

struct Envelope {
    double omega_b = 0.0;
    double residual = 0.0;  // rms misfit of the squared envelope
    std::vector<double> times;
    std::vector<double> values;  // local maxima of P
};

// Upper-envelope fit of a beat signal. The maxima follow 1/2 (1 + |cos w_b t|),
// so (2 p - 1)^2 is fitted as c0 + a cos 2 w t + b sin 2 w t over w.
Envelope envelope_extract(std::span<const double> p, double t0, double dt);

}  // namespace tls::oracle
