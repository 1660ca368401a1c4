#include "udtomo/states.hpp"

#include <bit>
#include <cmath>

#include "objective_core.hpp"
#include "rng_util.hpp"

namespace udtomo {

PureState::PureState(ComplexVector amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() < 1) {
    throw DimensionError("PureState: empty amplitude vector");
  }
  if (std::abs(amps_.squaredNorm() - 1.0) > 1e-12) {
    throw NormError("PureState: amplitudes are not unit-norm within 1e-12");
  }
}

PureState PureState::normalized(ComplexVector amplitudes) {
  const double norm = amplitudes.norm();
  if (norm < 1e-14) {
    throw NormError("PureState::normalized: zero amplitude vector");
  }
  return PureState(amplitudes / norm);
}

ComplexMatrix ensemble_density(const EnsembleParams& params) {
  const double q_norm2 = params.q.squaredNorm();
  if (q_norm2 < 1e-24) {
    throw DegenerateParamsError("ensemble_density: weight vector has vanishing norm");
  }
  ComplexMatrix rho = ComplexMatrix::Zero(params.dim(), params.dim());
  for (int i = 0; i < params.rank(); ++i) {
    const double col_norm2 = params.V.col(i).squaredNorm();
    if (col_norm2 < 1e-24) {
      throw DegenerateParamsError("ensemble_density: ensemble column has vanishing norm");
    }
    const double p = params.q(i) * params.q(i) / q_norm2;
    rho.noalias() += (p / col_norm2) * (params.V.col(i) * params.V.col(i).adjoint());
  }
  return rho;
}

ObjectiveEval evaluate(const EnsembleParams& params, const PureState& target,
                       const MeasurementFramework& fw) {
  if (params.dim() != target.dim() || params.dim() != fw.dimension) {
    throw DimensionError("evaluate: params, target, and framework dimensions disagree");
  }
  if (params.q.size() != params.V.cols()) {
    throw DimensionError("evaluate: weight vector length does not match ensemble size");
  }
  detail::ObjectiveCore core(target, fw, params.rank());
  if (!core.load(params.V, params.q)) {
    throw DegenerateParamsError("evaluate: degenerate ensemble parameters");
  }
  core.forward();

  ObjectiveEval out;
  out.fidelity = core.fidelity();
  out.constraint = core.constraint();

  // Pure fidelity gradient: weight vector zero.
  RealVector w = RealVector::Zero(fw.size());
  core.weighted_gradient(1.0, w);
  out.grad_V = core.grad_V();
  out.grad_q = core.grad_q();

  core.fill_constraint_jacobian(out.constraint_jacobian);
  return out;
}

RealVector pack_params(const EnsembleParams& params) {
  const int d = params.dim(), r = params.rank();
  RealVector x(2 * d * r + r);
  for (int i = 0; i < r; ++i) {
    for (int k = 0; k < d; ++k) {
      x(i * d + k) = params.V(k, i).real();
      x(d * r + i * d + k) = params.V(k, i).imag();
    }
  }
  x.segment(2 * d * r, r) = params.q;
  return x;
}

EnsembleParams unpack_params(const RealVector& x, int d, int r) {
  if (x.size() != 2 * d * r + r) {
    throw DimensionError("unpack_params: coordinate vector has the wrong length");
  }
  EnsembleParams params;
  params.V.resize(d, r);
  for (int i = 0; i < r; ++i) {
    for (int k = 0; k < d; ++k) {
      params.V(k, i) = std::complex<double>(x(i * d + k), x(d * r + i * d + k));
    }
  }
  params.q = x.segment(2 * d * r, r);
  return params;
}

std::array<PureState, 5> symmetric_basis() {
  const double binom[5] = {1, 4, 6, 4, 1};
  std::array<ComplexVector, 5> vecs;
  for (int w = 0; w < 5; ++w) vecs[w] = ComplexVector::Zero(16);
  for (int idx = 0; idx < 16; ++idx) {
    const int w = std::popcount(static_cast<unsigned>(idx));
    vecs[w](idx) = 1.0 / std::sqrt(binom[w]);
  }
  return {PureState(vecs[0]), PureState(vecs[1]), PureState(vecs[2]),
          PureState(vecs[3]), PureState(vecs[4])};
}

PureState ghz_state(double theta) {
  ComplexVector amps = ComplexVector::Zero(16);
  amps(0) = std::sin(theta);
  amps(15) = std::cos(theta);
  return PureState::normalized(std::move(amps));
}

PureState special_symmetric_state(double c0, double c2, double c4) {
  if (std::abs(c0 * c0 + c2 * c2 + c4 * c4 - 1.0) > 1e-10) {
    throw NormError("special_symmetric_state: coefficients are not normalized within 1e-10");
  }
  const auto omega = symmetric_basis();
  ComplexVector amps = c0 * omega[0].amplitudes() + c2 * omega[2].amplitudes() +
                       c4 * omega[4].amplitudes();
  return PureState::normalized(std::move(amps));
}

ComplexMatrix two_rdm_closed_form(double c0, double c2, double c4) {
  if (std::abs(c0 * c0 + c2 * c2 + c4 * c4 - 1.0) > 1e-10) {
    throw NormError("two_rdm_closed_form: coefficients are not normalized within 1e-10");
  }
  ComplexMatrix rdm = ComplexMatrix::Zero(4, 4);
  const double off = c2 * (c0 + c4) / std::sqrt(6.0);
  rdm(0, 0) = c0 * c0 + c2 * c2 / 6.0;
  rdm(0, 3) = off;
  rdm(1, 1) = c2 * c2 / 3.0;
  rdm(1, 2) = c2 * c2 / 3.0;
  rdm(2, 1) = c2 * c2 / 3.0;
  rdm(2, 2) = c2 * c2 / 3.0;
  rdm(3, 0) = off;
  rdm(3, 3) = c4 * c4 + c2 * c2 / 6.0;
  return rdm;
}

std::array<double, 4> rdm_eigenvalues(double c0, double c2, double c4) {
  if (std::abs(c0 * c0 + c2 * c2 + c4 * c4 - 1.0) > 1e-10) {
    throw NormError("rdm_eigenvalues: coefficients are not normalized within 1e-10");
  }
  const double lambda2 = 2.0 * c2 * c2 / 3.0;
  const double s = c0 * c0 + c4 * c4 + c2 * c2 / 3.0;
  const double disc = (c0 + c4) * (c0 + c4) * ((c0 - c4) * (c0 - c4) + 2.0 * c2 * c2 / 3.0);
  const double root = std::sqrt(std::max(0.0, disc));
  return {0.0, lambda2, (s + root) / 2.0, (s - root) / 2.0};
}

std::set<DegeneracyType> degeneracy_class(double c0, double c2, double c4, double tol) {
  if (tol <= 0.0) {
    throw Error("degeneracy_class: tolerance must be positive");
  }
  const auto lambda = rdm_eigenvalues(c0, c2, c4);
  std::set<DegeneracyType> types;
  if (std::abs(lambda[0] - lambda[1]) <= tol) types.insert(DegeneracyType::I);
  if (std::abs(lambda[2] - lambda[3]) <= tol) types.insert(DegeneracyType::II);
  if (std::abs(lambda[0] - lambda[2]) <= tol || std::abs(lambda[0] - lambda[3]) <= tol) {
    types.insert(DegeneracyType::III);
  }
  if (std::abs(lambda[1] - lambda[2]) <= tol || std::abs(lambda[1] - lambda[3]) <= tol) {
    types.insert(DegeneracyType::IV);
  }
  return types;
}

PureState random_pure_state(int d, bool real_only, std::uint64_t seed) {
  if (d < 2) {
    throw DimensionError("random_pure_state: dimension must be at least 2");
  }
  detail::Rng rng(seed);
  ComplexVector amps(d);
  double norm2 = 0.0;
  do {
    for (int k = 0; k < d; ++k) {
      if (real_only) {
        amps(k) = rng.normal();
      } else {
        amps(k) = std::complex<double>(rng.normal(), rng.normal());
      }
    }
    norm2 = amps.squaredNorm();
  } while (norm2 < 1e-24);
  return PureState::normalized(std::move(amps));
}

}  // namespace udtomo
