#ifndef UDTOMO_OBJECTIVE_CORE_HPP
#define UDTOMO_OBJECTIVE_CORE_HPP

#include "udtomo/frameworks.hpp"
#include "udtomo/states.hpp"

namespace udtomo::detail {

// Shared evaluation kernel for the fidelity objective and measurement
// constraints of the (V, q) ensemble parameterization. Owns all scratch
// buffers so the optimizer inner loop stays allocation-free.
//
//   n_i   = <phi_i|phi_i>          (column norms squared)
//   p_i   = q_i^2 / |q|^2
//   ov_i  = <psi|phi_i>
//   fh_i  = |ov_i|^2 / n_i         (per-column fidelity)
//   h(j,i)= <phi_i|A_j|phi_i>/n_i  (per-column expectations)
//   f     = sum_i p_i fh_i
//   g_j   = sum_i p_i h(j,i) - t_j
class ObjectiveCore {
 public:
  ObjectiveCore(const PureState& target, const MeasurementFramework& fw, int r)
      : d_(fw.dimension),
        r_(r),
        m_(fw.size()),
        stacked_(stacked_observables(fw)),
        psi_(target.amplitudes()),
        target_mv_(measurement_vector(fw, target.projector())),
        V_(d_, r),
        q_(r),
        applied_(static_cast<Eigen::Index>(m_) * d_, r),
        h_(m_, r),
        overlap_(r),
        norms2_(r),
        p_(r),
        fid_cols_(r),
        g_(m_),
        mixed_h_(m_),
        w_complex_(m_),
        grad_V_(d_, r),
        grad_q_(r) {
    build_permutation_form(fw);
  }

  int dim() const { return d_; }
  int rank() const { return r_; }
  int n_constraints() const { return m_; }
  int n_coords() const { return 2 * d_ * r_ + r_; }
  const RealVector& target_mv() const { return target_mv_; }
  const ComplexVector& target_state() const { return psi_; }

  // Returns false when a column norm or |q| is degenerate (below 1e-12);
  // callers either re-randomize (optimizer) or raise (public evaluate).
  bool load(const ComplexMatrix& V, const RealVector& q) {
    V_ = V;
    q_ = q;
    return check_degeneracy();
  }

  bool load_packed(const RealVector& x) {
    const int dr = d_ * r_;
    for (int i = 0; i < r_; ++i) {
      for (int k = 0; k < d_; ++k) {
        V_(k, i) = std::complex<double>(x(i * d_ + k), x(dr + i * d_ + k));
      }
    }
    q_ = x.segment(2 * dr, r_);
    return check_degeneracy();
  }

  ComplexMatrix& V() { return V_; }
  RealVector& q() { return q_; }

  void store_packed(RealVector& x) const {
    const int dr = d_ * r_;
    for (int i = 0; i < r_; ++i) {
      for (int k = 0; k < d_; ++k) {
        x(i * d_ + k) = V_(k, i).real();
        x(dr + i * d_ + k) = V_(k, i).imag();
      }
    }
    x.segment(2 * dr, r_) = q_;
  }

  // Fidelity, per-column expectations, and constraint values at the loaded
  // parameters.
  void forward() {
    q_norm2_ = q_.squaredNorm();
    for (int i = 0; i < r_; ++i) {
      p_(i) = q_(i) * q_(i) / q_norm2_;
      norms2_(i) = V_.col(i).squaredNorm();
      overlap_(i) = psi_.dot(V_.col(i));
      fid_cols_(i) = std::norm(overlap_(i)) / norms2_(i);
    }
    fidelity_ = p_.dot(fid_cols_);
    if (permutation_form_) {
      for (int i = 0; i < r_; ++i) {
        const std::complex<double>* phi = V_.col(i).data();
        std::complex<double>* out = applied_.col(i).data();
        for (int j = 0; j < m_; ++j) {
          const int* source = perm_source_.data() + static_cast<std::size_t>(j) * d_;
          const std::complex<double>* factor =
              perm_factor_.data() + static_cast<std::size_t>(j) * d_;
          for (int k = 0; k < d_; ++k) {
            out[j * d_ + k] = source[k] >= 0 ? factor[k] * phi[source[k]]
                                             : std::complex<double>(0.0);
          }
        }
      }
    } else {
      applied_.noalias() = stacked_ * V_;
    }
    for (int i = 0; i < r_; ++i) {
      auto applied_i = Eigen::Map<const ComplexMatrix>(applied_.col(i).data(), d_, m_);
      h_.col(i) = (V_.col(i).adjoint() * applied_i).real().transpose() / norms2_(i);
    }
    g_.noalias() = h_ * p_ - target_mv_;
  }

  double fidelity() const { return fidelity_; }
  const RealVector& constraint() const { return g_; }
  const RealMatrix& h() const { return h_; }
  const RealVector& p() const { return p_; }
  const RealVector& norms2() const { return norms2_; }
  const ComplexVector& overlap() const { return overlap_; }
  const RealVector& fid_cols() const { return fid_cols_; }

  // Gradient of alpha*f + sum_j w_j g_j in the grad_V/grad_q convention
  // (real part = d/dRe, imaginary part = d/dIm). Requires forward().
  void weighted_gradient(double alpha, const RealVector& w) {
    mixed_h_.noalias() = h_ * p_;  // sum_i p_i h(j,i) per j
    const double wg = w.dot(mixed_h_);
    w_complex_ = w.cast<std::complex<double>>();
    for (int i = 0; i < r_; ++i) {
      auto applied_i = Eigen::Map<const ComplexMatrix>(applied_.col(i).data(), d_, m_);
      const double wh = w.dot(h_.col(i));
      grad_V_.col(i) = (2.0 * p_(i) / norms2_(i)) *
                       (alpha * (overlap_(i) * psi_ - fid_cols_(i) * V_.col(i)) +
                        applied_i * w_complex_ - wh * V_.col(i));
      grad_q_(i) = (2.0 * q_(i) / q_norm2_) *
                   (alpha * (fid_cols_(i) - fidelity_) + wh - wg);
    }
  }

  const ComplexMatrix& grad_V() const { return grad_V_; }
  const RealVector& grad_q() const { return grad_q_; }

  void store_gradient_packed(RealVector& grad) const {
    const int dr = d_ * r_;
    for (int i = 0; i < r_; ++i) {
      for (int k = 0; k < d_; ++k) {
        grad(i * d_ + k) = grad_V_(k, i).real();
        grad(dr + i * d_ + k) = grad_V_(k, i).imag();
      }
    }
    grad.segment(2 * dr, r_) = grad_q_;
  }

  // Full m x (2dr + r) constraint Jacobian in packed coordinates. Requires
  // forward().
  void fill_constraint_jacobian(RealMatrix& jac) const {
    const int dr = d_ * r_;
    jac.resize(m_, n_coords());
    for (int j = 0; j < m_; ++j) {
      const double mixed_j = g_(j) + target_mv_(j);
      for (int i = 0; i < r_; ++i) {
        auto a_phi = applied_.col(i).segment(static_cast<Eigen::Index>(j) * d_, d_);
        const double scale = 2.0 * p_(i) / norms2_(i);
        for (int k = 0; k < d_; ++k) {
          const std::complex<double> gc = scale * (a_phi(k) - h_(j, i) * V_(k, i));
          jac(j, i * d_ + k) = gc.real();
          jac(j, dr + i * d_ + k) = gc.imag();
        }
        jac(j, 2 * dr + i) = (2.0 * q_(i) / q_norm2_) * (h_(j, i) - mixed_j);
      }
    }
  }

 private:
  bool check_degeneracy() const {
    if (q_.squaredNorm() < 1e-24) return false;
    for (int i = 0; i < r_; ++i) {
      if (V_.col(i).squaredNorm() < 1e-24) return false;
    }
    return true;
  }

  // Pauli strings and Gell-Mann matrices have at most one non-zero per row,
  // so A_j|phi> is a phase-scaled gather. Detect that structure once and use
  // it in forward(); anything else falls back to the stacked GEMM.
  void build_permutation_form(const MeasurementFramework& fw) {
    perm_source_.assign(static_cast<std::size_t>(m_) * d_, -1);
    perm_factor_.assign(static_cast<std::size_t>(m_) * d_, {0.0, 0.0});
    for (int j = 0; j < m_; ++j) {
      const ComplexMatrix& a = fw.observables[j];
      for (int k = 0; k < d_; ++k) {
        int nonzeros = 0;
        for (int l = 0; l < d_; ++l) {
          if (a(k, l) != 0.0) {
            ++nonzeros;
            perm_source_[static_cast<std::size_t>(j) * d_ + k] = l;
            perm_factor_[static_cast<std::size_t>(j) * d_ + k] = a(k, l);
          }
        }
        if (nonzeros > 1) {
          permutation_form_ = false;
          return;
        }
      }
    }
    permutation_form_ = true;
  }

  int d_, r_, m_;
  ComplexMatrix stacked_;
  ComplexVector psi_;
  RealVector target_mv_;

  ComplexMatrix V_;
  RealVector q_;
  double q_norm2_ = 1.0;
  double fidelity_ = 0.0;
  ComplexMatrix applied_;
  RealMatrix h_;
  ComplexVector overlap_;
  RealVector norms2_, p_, fid_cols_, g_, mixed_h_;
  ComplexVector w_complex_;
  ComplexMatrix grad_V_;
  RealVector grad_q_;

  bool permutation_form_ = false;
  std::vector<int> perm_source_;
  std::vector<std::complex<double>> perm_factor_;
};

}  // namespace udtomo::detail

#endif
