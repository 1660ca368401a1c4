#ifndef UDTOMO_ALM_HPP
#define UDTOMO_ALM_HPP

#include <cstdint>
#include <optional>
#include <utility>

#include "udtomo/errors.hpp"
#include "udtomo/frameworks.hpp"
#include "udtomo/rank_bounds.hpp"
#include "udtomo/states.hpp"

namespace udtomo {

struct AdamConfig {
  double step_size = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct ALMConfig {
  double gamma = 2.0;        // multiplier/penalty scaling factor, > 1
  double delta = 0.01;       // uniqueness threshold
  double mu0 = 1.0;          // initial penalty parameter
  double mu_max = 1e6;       // penalty cap
  // Floors for the fidelity and multiplier-term weights. Once mu saturates,
  // the loop scales alpha and then beta down by gamma per iteration; the
  // residual infeasibility scales with alpha/mu, so the floors sit low
  // enough for weakly coupled constraint directions to clear a 1e-6
  // feasibility tolerance.
  double alpha_min = 1e-7;
  double beta_min = 1e-7;
  double constraint_tol = 1e-6;
  double fidelity_change_tol = 1e-8;
  int inner_iters = 500;     // Adam steps per outer iteration
  AdamConfig adam;
  int n_restarts = 5;        // independent initializations for confirmation
  int max_outer_iters = 200;
  std::uint64_t seed = 0;
};

struct SolveResult {
  double fidelity = 1.0;
  double constraint_inf_norm = 0.0;
  EnsembleParams params;
  int outer_iters = 0;
  bool converged = false;
  int restarts_used = 0;
};

/// Raised when no initialization reached feasibility; carries the attempt
/// with the smallest constraint violation.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, SolveResult best)
      : Error(what), best_attempt(std::move(best)) {}
  SolveResult best_attempt;
};

enum class UniquenessCategory { UDA, UDP_NOT_UDA, NOT_UDP };

struct UniquenessVerdict {
  UniquenessCategory category = UniquenessCategory::UDA;
  SolveResult udp_result;
  std::optional<SolveResult> uda_result;
  std::optional<ComplexMatrix> witness;  // density matrix disproving uniqueness
};

/// L = alpha f + beta <lambda, g> + (mu/2)|g|^2 at the given parameters.
/// When `grad` is non-null it receives dL/dx in the packed coordinate layout
/// of pack_params.
double augmented_objective(const EnsembleParams& params, const RealVector& lambda,
                           double mu, double alpha, double beta,
                           const PureState& target, const MeasurementFramework& fw,
                           RealVector* grad = nullptr);

/// Runs the augmented-Lagrangian loop from up to cfg.n_restarts random
/// initializations (attempt k draws from the stream seeded with cfg.seed + k)
/// and returns the first converged run. Convergence requires |g|_inf below
/// constraint_tol and a fidelity change below fidelity_change_tol between
/// successive outer iterations. Throws InfeasibleError when every attempt
/// fails.
SolveResult alm_solve(const PureState& target, const MeasurementFramework& fw,
                      int r, const ALMConfig& cfg);

/// Collects cfg.n_restarts converged runs (extra attempts are drawn when one
/// fails to converge) and returns the smallest fidelity found. Used where the
/// minimum itself is the quantity of interest, e.g. fidelity sweeps.
SolveResult min_fidelity_solve(const PureState& target, const MeasurementFramework& fw,
                               int r, const ALMConfig& cfg);

/// True iff all cfg.n_restarts converged rank-1 runs end with fidelity above
/// 1 - delta; declares non-UDP the moment one feasible run falls below.
std::pair<bool, SolveResult> determine_udp(const PureState& target,
                                           const MeasurementFramework& fw,
                                           const ALMConfig& cfg);

/// Same confirmation protocol with the rank budget from the bound theorems.
std::pair<bool, SolveResult> determine_uda(const PureState& target,
                                           const MeasurementFramework& fw,
                                           const ALMConfig& cfg,
                                           const RankBudget& budget);

/// UDP check first; a UDP failure settles the verdict (non-UDP implies
/// non-UDA), otherwise the UDA check decides between categories A and B.
UniquenessVerdict classify(const PureState& target, const MeasurementFramework& fw,
                           const ALMConfig& cfg, const RankBudget& budget);

}  // namespace udtomo

#endif
