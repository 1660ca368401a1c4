#ifndef UDTOMO_STATES_HPP
#define UDTOMO_STATES_HPP

#include <array>
#include <cstdint>
#include <set>

#include "udtomo/frameworks.hpp"
#include "udtomo/matrix_core.hpp"

namespace udtomo {

/// Unit-norm complex amplitude vector.
class PureState {
 public:
  explicit PureState(ComplexVector amplitudes);

  /// Normalizes the given amplitudes first; rejects the zero vector.
  static PureState normalized(ComplexVector amplitudes);

  const ComplexVector& amplitudes() const { return amps_; }
  int dim() const { return static_cast<int>(amps_.size()); }
  ComplexMatrix projector() const { return amps_ * amps_.adjoint(); }

 private:
  ComplexVector amps_;
};

/// Rank-bounded ensemble parameterization of a density matrix. Column i of V
/// is a non-normalized pure state; the mixing weights are p_i = q_i^2/|q|^2,
/// so no explicit normalization constraints are needed during optimization.
struct EnsembleParams {
  ComplexMatrix V;
  RealVector q;

  int dim() const { return static_cast<int>(V.rows()); }
  int rank() const { return static_cast<int>(V.cols()); }
};

ComplexMatrix ensemble_density(const EnsembleParams& params);

/// Objective/constraint values with exact analytic first derivatives.
///
/// Gradients follow the real-coordinate convention: grad_V(k,i) holds
/// d/dRe V(k,i) in its real part and d/dIm V(k,i) in its imaginary part.
/// constraint_jacobian rows are d g_j / d x with x the packed coordinate
/// vector [vec(Re V); vec(Im V); q] (column-major vec), length 2dr + r.
struct ObjectiveEval {
  double fidelity = 0.0;
  RealVector constraint;
  ComplexMatrix grad_V;
  RealVector grad_q;
  RealMatrix constraint_jacobian;
};

ObjectiveEval evaluate(const EnsembleParams& params, const PureState& target,
                       const MeasurementFramework& fw);

/// Packed real coordinates [vec(Re V); vec(Im V); q].
RealVector pack_params(const EnsembleParams& params);
EnsembleParams unpack_params(const RealVector& x, int d, int r);

/// The five four-qubit symmetric basis states omega_0..omega_4 (d = 16);
/// omega_i is the normalized equal superposition of all computational kets
/// of Hamming weight i.
std::array<PureState, 5> symmetric_basis();

/// sin(theta)|omega_0> + cos(theta)|omega_4>.
PureState ghz_state(double theta);

/// c0|omega_0> + c2|omega_2> + c4|omega_4>; coefficients must be normalized
/// within 1e-10.
PureState special_symmetric_state(double c0, double c2, double c4);

/// Closed-form 4x4 two-qubit reduced density matrix of the symmetric state
/// above; equals the partial trace of the full state over any qubit pair.
ComplexMatrix two_rdm_closed_form(double c0, double c2, double c4);

/// Closed-form 2-RDM eigenvalues (lambda_1..lambda_4):
/// lambda_1 = 0, lambda_2 = 2 c2^2/3, lambda_{3,4} from the corner block.
std::array<double, 4> rdm_eigenvalues(double c0, double c2, double c4);

/// The four ways 2-RDM eigenvalues of the symmetric family can coincide:
/// (I) l1=l2, (II) l3=l4, (III) l1=l3 or l1=l4, (IV) l2=l3 or l2=l4.
enum class DegeneracyType { I, II, III, IV };

std::set<DegeneracyType> degeneracy_class(double c0, double c2, double c4,
                                          double tol = 1e-9);

/// real_only draws uniformly from the real unit sphere; otherwise the state
/// is Haar-uniform. Deterministic for a fixed seed.
PureState random_pure_state(int d, bool real_only, std::uint64_t seed);

}  // namespace udtomo

#endif
