#include "udtomo/rank_bounds.hpp"

#include <cmath>

#include <Eigen/SVD>

namespace udtomo {

namespace {

// Largest integer r with r^2 <= cap (so r is the largest integer strictly
// below sqrt(cap + 1)).
int integer_sqrt_floor(int cap) {
  int r = static_cast<int>(std::sqrt(static_cast<double>(cap)));
  while ((r + 1) * (r + 1) <= cap) ++r;
  while (r > 0 && r * r > cap) --r;
  return r;
}

}  // namespace

RankBudget qst_rank_bound(int m) {
  if (m < 1) throw Error("qst_rank_bound: framework must contain at least one observable");
  return {std::max(1, integer_sqrt_floor(m + 1)), RankBoundSource::THEOREM1};
}

RankBudget uda_rank_bound(int m) {
  if (m < 1) throw Error("uda_rank_bound: framework must contain at least one observable");
  return {std::max(1, integer_sqrt_floor(m + 2)), RankBoundSource::COROLLARY1};
}

RankBudget symmetric_uda_rank() { return {5, RankBoundSource::SYMMETRIC5}; }

namespace {

// Tr(op * S_b) for every element S_b of the orthonormal Hermitian basis of
// the support space: r diagonal units E_kk, then for each k < l the pair
// (E_kl + E_lk)/sqrt(2) and i(E_kl - E_lk)/sqrt(2).
Eigen::RowVectorXd functional_row(const ComplexMatrix& op) {
  const int r = static_cast<int>(op.rows());
  Eigen::RowVectorXd row(r * r);
  int b = 0;
  for (int k = 0; k < r; ++k) row(b++) = op(k, k).real();
  const double sqrt2 = std::sqrt(2.0);
  for (int k = 0; k < r; ++k) {
    for (int l = k + 1; l < r; ++l) {
      row(b++) = sqrt2 * op(k, l).real();
      row(b++) = sqrt2 * op(k, l).imag();
    }
  }
  return row;
}

ComplexMatrix assemble_hermitian(const RealVector& coeffs, int r) {
  ComplexMatrix h = ComplexMatrix::Zero(r, r);
  int b = 0;
  for (int k = 0; k < r; ++k) h(k, k) = coeffs(b++);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < r; ++k) {
    for (int l = k + 1; l < r; ++l) {
      const double re = coeffs(b++) * inv_sqrt2;
      const double im = coeffs(b++) * inv_sqrt2;
      h(k, l) = std::complex<double>(re, im);
      h(l, k) = std::complex<double>(re, -im);
    }
  }
  return h;
}

}  // namespace

ComplexMatrix rank_reduce(const ComplexMatrix& rho, const MeasurementFramework& fw,
                          const PureState* extra) {
  if (rho.rows() != fw.dimension || rho.cols() != fw.dimension) {
    throw DimensionError("rank_reduce: density and framework dimensions disagree");
  }
  if (!is_hermitian(rho, 1e-10) || std::abs(rho.trace().real() - 1.0) > 1e-10 ||
      min_eigenvalue((rho + rho.adjoint()) / 2.0) < -1e-10) {
    throw InvalidDensityError("rank_reduce: input is not a density matrix within 1e-10");
  }

  const int m_prime = fw.size() + (extra ? 1 : 0);
  ComplexMatrix current = (rho + rho.adjoint()) / 2.0;

  for (;;) {
    const SpectralDecomposition eig = spectral(current);
    const int r = eig.rank;
    if (r * r <= m_prime + 1) break;

    const ComplexMatrix support = eig.eigenvectors.leftCols(r);
    const int n_basis = r * r;
    RealMatrix functionals(m_prime + 1, n_basis);
    for (int j = 0; j < fw.size(); ++j) {
      functionals.row(j) = functional_row(support.adjoint() * fw.observables[j] * support);
    }
    // Trace functional from the identity extension of the framework.
    functionals.row(fw.size()) = functional_row(ComplexMatrix::Identity(r, r));
    if (extra) {
      const ComplexVector projected = support.adjoint() * extra->amplitudes();
      functionals.row(fw.size() + 1) = functional_row(projected * projected.adjoint());
    }

    Eigen::JacobiSVD<RealMatrix> svd(functionals, Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
    const double null_tol = 1e-10 * std::max(1.0, sigma_max);
    int numeric_rank = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
      if (sigma(i) > null_tol) ++numeric_rank;
    }
    if (numeric_rank >= n_basis) break;  // no null direction available

    ComplexMatrix h = assemble_hermitian(svd.matrixV().col(n_basis - 1), r);
    const double h_norm = h.norm();
    if (h_norm < 1e-14) break;
    h /= h_norm;

    // Smallest positive step at which an eigenvalue of rho + eps H reaches
    // zero: on the support, sigma(eps) = L^{1/2} (I + eps K) L^{1/2} with
    // K = L^{-1/2} h L^{-1/2}, so eps* = -1/min_eig(K).
    RealVector inv_sqrt_lambda(r);
    for (int k = 0; k < r; ++k) inv_sqrt_lambda(k) = 1.0 / std::sqrt(eig.eigenvalues(k));
    ComplexMatrix scaled =
        inv_sqrt_lambda.asDiagonal() * h * inv_sqrt_lambda.asDiagonal();
    scaled = (scaled + scaled.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> ksolver(scaled, Eigen::EigenvaluesOnly);
    double kappa_min = ksolver.eigenvalues()(0);
    if (kappa_min >= -1e-14) {
      // h had no negative direction on the support; the mirrored step does.
      h = -h;
      kappa_min = -ksolver.eigenvalues()(r - 1);
      if (kappa_min >= -1e-14) break;
    }
    const double eps = -1.0 / kappa_min;

    ComplexMatrix full_h = support * h * support.adjoint();
    current += eps * full_h;
    current = (current + current.adjoint()) / 2.0;
  }

  return current;
}

}  // namespace udtomo
