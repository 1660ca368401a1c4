#ifndef UDTOMO_ORACLES_HPP
#define UDTOMO_ORACLES_HPP

#include <array>
#include <complex>
#include <utility>

#include "udtomo/frameworks.hpp"
#include "udtomo/matrix_core.hpp"
#include "udtomo/states.hpp"

namespace udtomo {

struct WitnessReport {
  double measurement_gap = 0.0;  // |M(witness) - M(target)|_inf
  double fidelity = 0.0;         // Tr(|psi><psi| witness)
  bool valid = false;
};

/// Analytic UDP characterization for real-coefficient qutrit states. Every
/// such state is UDP under A7. Under A6 the state fails to be UDP exactly
/// when a1 = 0 while a0 and a2 are both non-zero: the sign of a2 relative to
/// a0 is then invisible. (The theorem statement in the source analysis words
/// the condition as a0 = 0 with a1, a2 != 0; the proof body derives the
/// a1 = 0 form, which is what the sign-flip witness realizes and what this
/// oracle implements.) Zero tests use an absolute 1e-12 threshold.
bool qutrit_udp_oracle(double a0, double a1, double a2, GellMannVariant variant);

/// Smallest fidelity any pure state matching the A6 measurement vector of the
/// real target (a0, 0, a2) can reach: (a0^2 - a2^2)^2, attained by the
/// sign-flip state a0|0> - a2|2>.
double qutrit_a6_min_fidelity(double a0, double a2);

/// Global optimum of the rank-1 problem for sin(T)|w0> + cos(T)|w4> under
/// 2-local Paulis: the phase-flipped state sin(T)|w0> - cos(T)|w4> with
/// fidelity cos^2(2T).
std::pair<PureState, double> ghz_optimum(double theta);

/// Absolute residuals of the six shared-2-RDM equality constraints between
/// two symmetric-basis coefficient vectors, followed by the two normalization
/// residuals.
std::array<double, 8> shared_rdm_residual(const std::array<std::complex<double>, 5>& b,
                                          const std::array<std::complex<double>, 5>& c);

/// Re-checks a claimed non-uniqueness witness from matrix primitives alone,
/// independent of any solver code path.
WitnessReport verify_witness(const PureState& target, const ComplexMatrix& witness,
                             const MeasurementFramework& fw, double delta);

}  // namespace udtomo

#endif
