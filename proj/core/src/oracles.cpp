#include "udtomo/oracles.hpp"

#include <cmath>

namespace udtomo {

namespace {
constexpr double kZeroTol = 1e-12;  // inputs are analytic constructions
}

bool qutrit_udp_oracle(double a0, double a1, double a2, GellMannVariant variant) {
  if (variant == GellMannVariant::A8) {
    throw Error("qutrit_udp_oracle: characterization covers the reduced frameworks A7 and A6");
  }
  if (std::abs(a0 * a0 + a1 * a1 + a2 * a2 - 1.0) > 1e-10) {
    throw NormError("qutrit_udp_oracle: coefficients are not normalized within 1e-10");
  }
  if (variant == GellMannVariant::A7) return true;
  const bool a1_zero = std::abs(a1) <= kZeroTol;
  const bool a0_zero = std::abs(a0) <= kZeroTol;
  const bool a2_zero = std::abs(a2) <= kZeroTol;
  return !(a1_zero && !a0_zero && !a2_zero);
}

double qutrit_a6_min_fidelity(double a0, double a2) {
  if (std::abs(a0 * a0 + a2 * a2 - 1.0) > 1e-10) {
    throw NormError("qutrit_a6_min_fidelity: coefficients are not normalized within 1e-10");
  }
  const double gap = a0 * a0 - a2 * a2;
  return gap * gap;
}

std::pair<PureState, double> ghz_optimum(double theta) {
  const auto omega = symmetric_basis();
  ComplexVector amps = std::sin(theta) * omega[0].amplitudes() -
                       std::cos(theta) * omega[4].amplitudes();
  const double c = std::cos(2.0 * theta);
  return {PureState::normalized(std::move(amps)), c * c};
}

std::array<double, 8> shared_rdm_residual(const std::array<std::complex<double>, 5>& b,
                                          const std::array<std::complex<double>, 5>& c) {
  const double s6 = std::sqrt(6.0);
  auto abs2 = [](std::complex<double> z) { return std::norm(z); };

  auto corner0 = [&](const std::array<std::complex<double>, 5>& v) {
    return abs2(v[0]) + abs2(v[1]) / 2.0 + abs2(v[2]) / 6.0;
  };
  auto corner4 = [&](const std::array<std::complex<double>, 5>& v) {
    return abs2(v[4]) + abs2(v[3]) / 2.0 + abs2(v[2]) / 6.0;
  };
  auto middle = [&](const std::array<std::complex<double>, 5>& v) {
    return abs2(v[1]) / 4.0 + abs2(v[3]) / 4.0 + abs2(v[2]) / 3.0;
  };
  auto lower_chain = [&](const std::array<std::complex<double>, 5>& v) {
    return std::conj(v[1]) * v[0] / 2.0 + std::conj(v[2]) * v[1] / s6 +
           std::conj(v[3]) * v[2] / (2.0 * s6);
  };
  auto upper_chain = [&](const std::array<std::complex<double>, 5>& v) {
    return std::conj(v[4]) * v[3] / 2.0 + std::conj(v[3]) * v[2] / s6 +
           std::conj(v[2]) * v[1] / (2.0 * s6);
  };
  auto skip_chain = [&](const std::array<std::complex<double>, 5>& v) {
    return std::conj(v[2]) * v[0] / s6 + std::conj(v[3]) * v[1] / 2.0 +
           std::conj(v[4]) * v[2] / s6;
  };
  auto total = [&](const std::array<std::complex<double>, 5>& v) {
    double sum = 0.0;
    for (const auto& z : v) sum += abs2(z);
    return sum;
  };

  return {
      std::abs(corner0(b) - corner0(c)),
      std::abs(corner4(b) - corner4(c)),
      std::abs(middle(b) - middle(c)),
      std::abs(lower_chain(b) - lower_chain(c)),
      std::abs(upper_chain(b) - upper_chain(c)),
      std::abs(skip_chain(b) - skip_chain(c)),
      std::abs(total(b) - 1.0),
      std::abs(total(c) - 1.0),
  };
}

WitnessReport verify_witness(const PureState& target, const ComplexMatrix& witness,
                             const MeasurementFramework& fw, double delta) {
  if (witness.rows() != witness.cols() || witness.rows() != fw.dimension ||
      target.dim() != fw.dimension) {
    throw DimensionError("verify_witness: dimensions disagree");
  }
  if (!is_hermitian(witness, 1e-9)) {
    throw InvalidDensityError("verify_witness: witness is not Hermitian within 1e-9");
  }
  if (std::abs(witness.trace().real() - 1.0) > 1e-9) {
    throw InvalidDensityError("verify_witness: witness trace deviates from 1 beyond 1e-9");
  }
  if (min_eigenvalue((witness + witness.adjoint()) / 2.0) < -1e-9) {
    throw InvalidDensityError("verify_witness: witness is not PSD within 1e-9");
  }

  // Recomputed from matrix primitives only; no solver state enters here.
  WitnessReport report;
  const ComplexMatrix target_proj = target.projector();
  double gap = 0.0;
  for (const auto& a : fw.observables) {
    const double w_val = std::real(trace_inner(a, witness));
    const double t_val = std::real(trace_inner(a, target_proj));
    gap = std::max(gap, std::abs(w_val - t_val));
  }
  report.measurement_gap = gap;
  report.fidelity = std::real(trace_inner(target_proj, witness));
  report.valid = gap < 1e-6 && report.fidelity <= 1.0 - delta;
  return report;
}

}  // namespace udtomo
