#ifndef UDTOMO_FRAMEWORKS_HPP
#define UDTOMO_FRAMEWORKS_HPP

#include <string>
#include <vector>

#include "udtomo/matrix_core.hpp"

namespace udtomo {

class PureState;

/// Ordered set of Hermitian observables on a d-dimensional space. The
/// observable ordering is frozen per builder so measurement vectors and
/// multiplier vectors are stable across runs.
struct MeasurementFramework {
  int dimension = 0;
  std::vector<ComplexMatrix> observables;
  std::vector<std::string> labels;

  int size() const { return static_cast<int>(observables.size()); }
};

enum class GellMannVariant { A8, A7, A6 };

/// The qutrit Gell-Mann frameworks: A8 holds M1..M8, A7 drops M8,
/// A6 drops M8 and M4.
MeasurementFramework gell_mann_framework(GellMannVariant variant);

/// All weight-1 and weight-2 Pauli strings on n qubits. Ordering: single-site
/// operators by (site, X<Y<Z), then site pairs lexicographically with the
/// 3x3 grid XX,XY,XZ,YX,YY,YZ,ZX,ZY,ZZ on each pair. Labels use 1-based sites.
MeasurementFramework pauli_2local_framework(int n_qubits);

/// The 35-observable reduced framework for a four-qubit symmetric target of
/// the c0/c2/c4 form: X1, Y1, Z1; for each of the 6 pairs {j,k} the five
/// operators YjZk, ZjXk, XjYk, XjXk, YjYk; the identity; and |psi><psi|.
/// Unlike the A-frameworks this one stores the identity explicitly, since the
/// rank-reduction argument counts it among the 35.
MeasurementFramework reduced_symmetric_framework(const PureState& target);

RealVector measurement_vector(const MeasurementFramework& fw, const ComplexMatrix& rho);

/// Observables stacked vertically into an (m*d) x d matrix; block j is A_j.
/// One GEMV against this gives every A_j |phi> at once.
ComplexMatrix stacked_observables(const MeasurementFramework& fw);

std::string framework_to_json(const MeasurementFramework& fw);
MeasurementFramework framework_from_json(const std::string& text);

}  // namespace udtomo

#endif
