#ifndef UDTOMO_RANK_BOUNDS_HPP
#define UDTOMO_RANK_BOUNDS_HPP

#include "udtomo/frameworks.hpp"
#include "udtomo/matrix_core.hpp"
#include "udtomo/states.hpp"

namespace udtomo {

enum class RankBoundSource { THEOREM1, COROLLARY1, SYMMETRIC5, PURE1 };

struct RankBudget {
  int max_rank = 1;
  RankBoundSource source = RankBoundSource::PURE1;
};

/// Rank budget for reconstruction from m observables: the largest integer
/// strictly below sqrt(m + 2).
RankBudget qst_rank_bound(int m);

/// Rank budget for the fidelity-minimization problem against a pure target:
/// the largest integer strictly below sqrt(m + 3).
RankBudget uda_rank_bound(int m);

/// Rank budget 5 for four-qubit symmetric targets of the c0/c2/c4 form under
/// the 2-local Pauli framework (35 effective observables).
RankBudget symmetric_uda_rank();

/// Rank budget 1, the pure-state search space.
inline RankBudget udp_rank() { return {1, RankBoundSource::PURE1}; }

/// Constructively reduces the rank of a density matrix while preserving its
/// measurement vector under `fw` (and, when given, the overlap with `extra`).
/// Repeatedly solves M(H) = 0 for a traceless Hermitian H on the support of
/// rho and steps to the exact boundary where one more eigenvalue vanishes.
/// The result has rank below sqrt(m' + 2), with m' counting the observables
/// plus the optional extra projector.
ComplexMatrix rank_reduce(const ComplexMatrix& rho, const MeasurementFramework& fw,
                          const PureState* extra = nullptr);

}  // namespace udtomo

#endif
