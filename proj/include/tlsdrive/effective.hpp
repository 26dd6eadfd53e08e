#pragma once

#include <utility>

#include "tlsdrive/core.hpp"
#include "tlsdrive/propagator.hpp"

namespace tls {

// Generator M with exp(-i M) = U up to the global phase exp(-i delta / 2).
// Throws BranchAmbiguity when A is within 1e-8 of -1.
MicromotionParams micromotion_of(const PropagatorCoeffs& u);

// Micromotion of the intra-period operator, 0 < t' <= T.
MicromotionParams micromotion(const PulseSequence& sequence, double t_prime);

EffectiveHamiltonian effective_hamiltonian(const PulseSequence& sequence,
                                           BranchConvention branch = BranchConvention::Principal);

// Repartitioned period for a sequence entered part-way through step m (1-based):
//   { H_m for lambda tau_m, H_{m+1} ... H_N, H_1 ... H_{m-1}, H_m for (1 - lambda) tau_m }.
// Zero-length pieces at lambda = 0 or 1 are dropped.
PulseSequence jump_sequence(const PulseSequence& sequence, double lambda, std::size_t m = 1);

EffectiveHamiltonian effective_with_jump(const PulseSequence& sequence, double lambda, std::size_t m = 1,
                                         BranchConvention branch = BranchConvention::Principal);

// Closed-form period operator of the two-step jump sequence with m = 1.
PropagatorCoeffs jump_period_two_step(const PulseSequence& two_step, double lambda);

// Rotation angle per period for the given convention, in [0, pi].
double rotation_angle(const PulseSequence& sequence, BranchConvention branch);

// Whether the convention replaces U(T) by -U(T) for this sequence.
bool uses_negated_period(const PulseSequence& sequence, BranchConvention branch);

// Quasienergies of the full period operator, in [0, omega_T): mean detuning / 2 pm omega_eff.
std::pair<double, double> quasienergies(const PulseSequence& sequence);

}  // namespace tls
