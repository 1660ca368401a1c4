#include "udtomo/alm.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>

#include "objective_core.hpp"
#include "rng_util.hpp"

namespace udtomo {

namespace {

// Inner-loop tuning. A fixed Adam step orbits the subproblem minimum at the
// step scale and drifts along gauge directions of the (V, q)
// parameterization, so each step is backtracked against the worst of the
// last few accepted values: halve until the trial no longer increases the
// objective, grow gently on clean accepts. Momentum and the step persist
// across outer iterations. Multiplier updates fire only once the subproblem
// has stopped improving; updating on an unsolved subproblem feeds
// inconsistent constraint values into lambda and the outer loop oscillates.
constexpr double kGradBreakTol = 1e-11;
constexpr int kNonmonotoneWindow = 8;
constexpr int kMaxBacktracks = 30;
constexpr double kStepGrow = 1.25;
constexpr int kMaxInnerBlocks = 3;
// A trial within round-off of the reference counts as accepted; an exact
// comparison deadlocks once steps shrink to the last few bits.
constexpr double kAcceptSlack = 4e-15;
// Attempts stuck in an infeasible basin stop early instead of burning the
// whole outer budget; the restart protocol supplies fresh initializations.
constexpr int kStagnationWindow = 25;
constexpr double kStagnationImprovement = 0.9;
// A block ends once this many accepted steps pass without beating the best
// value by more than round-off; slack-level accepts would otherwise keep the
// loop churning at the noise floor forever.
constexpr int kSettledWindow = 40;
// Ensemble weights below this are candidates for pruning between outer
// iterations. A near-dead column otherwise decays only asymptotically, and
// its residual weight holds both |g| and the fidelity drift above the
// convergence gates. The acceptance test keeps pruning safe, so the
// threshold is generous.
constexpr double kPruneWeight = 2e-3;

bool trace_enabled() {
  static const bool enabled = std::getenv("UDTOMO_TRACE") != nullptr;
  return enabled;
}

struct AdamState {
  RealVector m, v;
  int t = 0;

  explicit AdamState(int n) : m(RealVector::Zero(n)), v(RealVector::Zero(n)) {}

  void reset() {
    m.setZero();
    v.setZero();
    t = 0;
  }

  // Accumulates the gradient and writes the bias-corrected update direction;
  // the caller scales it by the step size.
  void direction(const RealVector& grad, const AdamConfig& cfg, RealVector& dir) {
    ++t;
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
    const double m_corr = 1.0 - std::pow(cfg.beta1, t);
    const double v_corr = 1.0 - std::pow(cfg.beta2, t);
    dir.array() = (m.array() / m_corr) / ((v.array() / v_corr).sqrt() + cfg.epsilon);
  }
};

void validate_config(const ALMConfig& cfg) {
  if (cfg.gamma <= 1.0) throw Error("ALMConfig: gamma must exceed 1");
  if (cfg.delta <= 0.0 || cfg.delta >= 1.0) throw Error("ALMConfig: delta must lie in (0,1)");
  if (cfg.mu0 <= 0.0 || cfg.mu_max < cfg.mu0) throw Error("ALMConfig: need 0 < mu0 <= mu_max");
  if (cfg.alpha_min <= 0.0 || cfg.alpha_min > 1.0 || cfg.beta_min <= 0.0 || cfg.beta_min > 1.0) {
    throw Error("ALMConfig: weight floors must lie in (0,1]");
  }
  if (cfg.inner_iters < 1 || cfg.n_restarts < 1 || cfg.max_outer_iters < 1) {
    throw Error("ALMConfig: iteration counts must be positive");
  }
}

// Draws V and q from N(0,1) and normalizes each column and q, per the
// initialization step of the uniqueness-determination loop.
void random_init(detail::ObjectiveCore& core, detail::Rng& rng) {
  ComplexMatrix& V = core.V();
  RealVector& q = core.q();
  for (int i = 0; i < core.rank(); ++i) {
    for (int k = 0; k < core.dim(); ++k) {
      V(k, i) = std::complex<double>(rng.normal(), rng.normal());
    }
    V.col(i).normalize();
  }
  for (int i = 0; i < core.rank(); ++i) q(i) = rng.normal();
  q.normalize();
}

// Re-draws any degenerate column or the whole weight vector. Returns true
// when something changed.
bool fix_degenerate(detail::ObjectiveCore& core, detail::Rng& rng) {
  bool changed = false;
  ComplexMatrix& V = core.V();
  RealVector& q = core.q();
  for (int i = 0; i < core.rank(); ++i) {
    if (V.col(i).squaredNorm() < 1e-24) {
      for (int k = 0; k < core.dim(); ++k) {
        V(k, i) = std::complex<double>(rng.normal(), rng.normal());
      }
      V.col(i).normalize();
      changed = true;
    }
  }
  if (q.squaredNorm() < 1e-24) {
    for (int i = 0; i < core.rank(); ++i) q(i) = rng.normal();
    q.normalize();
    changed = true;
  }
  return changed;
}

// Augmented objective at the core's loaded iterate; requires forward().
double augmented_value(const detail::ObjectiveCore& core, const RealVector& lambda,
                       double mu, double alpha, double beta) {
  const RealVector& g = core.constraint();
  return alpha * core.fidelity() + beta * lambda.dot(g) + 0.5 * mu * g.squaredNorm();
}

// Adam with a backtracked step, operating on the augmented objective for
// fixed multipliers. State persists across calls so later subproblems, which
// differ only by small multiplier updates, resume where the previous one
// settled.
class InnerMinimizer {
 public:
  InnerMinimizer(detail::ObjectiveCore& core, const ALMConfig& cfg, detail::Rng& rng)
      : core_(core),
        cfg_(cfg),
        rng_(rng),
        adam_(core.n_coords()),
        grad_(core.n_coords()),
        dir_(core.n_coords()),
        trial_(core.n_coords()),
        w_(core.n_constraints()),
        step_(cfg.adam.step_size) {}

  struct BlockResult {
    double decrease = 0.0;
    double scale = 1.0;
    bool grad_break = false;
  };

  int accepted_count = 0;
  int reject_count = 0;
  int full_reject_count = 0;

  // Augmented objective at the loaded iterate; requires forward().
  double value_of(const RealVector& lambda, double mu, double alpha, double beta) const {
    return augmented_value(core_, lambda, mu, alpha, beta);
  }

  // One block of up to cfg.inner_iters accepted Adam steps with nonmonotone
  // backtracking.
  BlockResult run_block(RealVector& x, const RealVector& lambda, double mu, double alpha,
                        double beta) {
    if (!core_.load_packed(x)) {
      if (fix_degenerate(core_, rng_)) {
        core_.store_packed(x);
        adam_.reset();
      }
      core_.load_packed(x);
    }
    core_.forward();
    double value = value_of(lambda, mu, alpha, beta);
    const double first_value = value;

    double history[kNonmonotoneWindow];
    for (auto& h : history) h = value;
    int history_pos = 0;
    double best_value = value;
    int since_best = 0;

    for (int t = 0; t < cfg_.inner_iters; ++t) {
      w_ = beta * lambda + mu * core_.constraint();
      core_.weighted_gradient(alpha, w_);
      core_.store_gradient_packed(grad_);
      if (grad_.lpNorm<Eigen::Infinity>() < kGradBreakTol) {
        return {first_value - value, std::max(1.0, std::abs(first_value)), true};
      }
      adam_.direction(grad_, cfg_.adam, dir_);

      double reference = history[0];
      for (double h : history) reference = std::max(reference, h);
      reference += kAcceptSlack * std::max(1.0, std::abs(reference));

      bool accepted = false;
      double s = step_;
      for (int bt = 0; bt < kMaxBacktracks; ++bt) {
        trial_ = x - s * dir_;
        if (core_.load_packed(trial_)) {
          core_.forward();
          const double trial_value = value_of(lambda, mu, alpha, beta);
          if (trial_value <= reference) {
            x.swap(trial_);
            value = trial_value;
            step_ = bt == 0 ? std::min(s * kStepGrow, cfg_.adam.step_size) : s;
            accepted = true;
            ++accepted_count;
            reject_count += bt;
            break;
          }
        }
        s *= 0.5;
      }
      if (!accepted) {
        ++full_reject_count;
        // Even a tiny step along this direction goes uphill: the momentum is
        // stale. Drop it and rebuild from fresh gradients.
        adam_.m.setZero();
        core_.load_packed(x);
        core_.forward();
        continue;
      }
      history[history_pos] = value;
      history_pos = (history_pos + 1) % kNonmonotoneWindow;
      // x is loaded in the core from the accepted trial evaluation.

      if (value < best_value - kAcceptSlack * std::max(1.0, std::abs(best_value))) {
        best_value = value;
        since_best = 0;
      } else if (++since_best >= kSettledWindow) {
        break;
      }
    }
    return {first_value - value, std::max(1.0, std::abs(first_value)), false};
  }

  // Minimizes the current subproblem: keeps running blocks while they still
  // make headway, so multiplier updates only ever see a settled iterate.
  void minimize(RealVector& x, const RealVector& lambda, double mu, double alpha,
                double beta) {
    for (int block = 0; block < kMaxInnerBlocks; ++block) {
      const BlockResult r = run_block(x, lambda, mu, alpha, beta);
      if (r.grad_break || r.decrease <= 1e-13 * r.scale) break;
    }
  }

  double step() const { return step_; }

  void reset_momentum() { adam_.reset(); }

 private:
  detail::ObjectiveCore& core_;
  const ALMConfig& cfg_;
  detail::Rng& rng_;
  AdamState adam_;
  RealVector grad_, dir_, trial_, w_;
  double step_;
};

// Re-parameterizes the ensemble in its canonical form: columns become the
// eigenvectors of the represented density and weights the square roots of
// its eigenvalues. The density, and with it the augmented objective, is
// unchanged, but column overlap and weight spread collapse into separated
// eigen-columns, which keeps the chart well conditioned and exposes stray
// weight to pruning. Zero weights get a tiny floor so a column can re-enter
// if the optimizer later needs the rank. Leaves the core loaded and
// forwarded at the updated x.
void eigen_reset(detail::ObjectiveCore& core, RealVector& x) {
  const int d = core.dim();
  const int r = core.rank();
  const ComplexMatrix& V = core.V();
  const RealVector& q = core.q();
  const double q_norm2 = q.squaredNorm();
  ComplexMatrix rho = ComplexMatrix::Zero(d, d);
  for (int i = 0; i < r; ++i) {
    const double weight = q(i) * q(i) / q_norm2 / V.col(i).squaredNorm();
    rho.noalias() += weight * (V.col(i) * V.col(i).adjoint());
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho);
  if (solver.info() != Eigen::Success) return;
  for (int i = 0; i < r && i < d; ++i) {
    core.V().col(i) = solver.eigenvectors().col(d - 1 - i);
    const double lambda_i = std::max(0.0, solver.eigenvalues()(d - 1 - i));
    core.q()(i) = std::max(std::sqrt(lambda_i), 1e-7);
  }
  core.store_packed(x);
  core.load_packed(x);
  core.forward();
}

// A run heading for fidelity 1 approaches it only asymptotically: the last
// eigen-weight and column tilt shed like 1/iteration and hold the fidelity
// drift above its gate. The target itself is the exact limit of that basin
// (feasible with f = 1), so offer it as a trial and keep it only when it
// does not increase the augmented objective. Runs descending toward a
// genuinely lower-fidelity solution reject the trial, since their objective
// is already below alpha * 1.
void snap_to_target(detail::ObjectiveCore& core, RealVector& x, const RealVector& lambda,
                    double mu, double alpha, double beta) {
  const double value = augmented_value(core, lambda, mu, alpha, beta);
  if (alpha >= value) return;  // the snap cannot win
  RealVector saved = x;
  const int d = core.dim();
  const int r = core.rank();
  const ComplexVector& psi = core.target_state();
  for (int k = 0; k < d; ++k) {
    x(k) = psi(k).real();
    x(d * r + k) = psi(k).imag();
  }
  x(2 * d * r) = 1.0;
  for (int i = 1; i < r; ++i) x(2 * d * r + i) = 0.0;
  if (!core.load_packed(x)) {
    x = saved;
    core.load_packed(x);
    core.forward();
    return;
  }
  core.forward();
  const double trial = augmented_value(core, lambda, mu, alpha, beta);
  if (trial > value + kAcceptSlack * std::max(1.0, std::abs(value))) {
    x = saved;
    core.load_packed(x);
    core.forward();
  } else if (trace_enabled()) {
    std::fprintf(stderr, "[alm]   snapped to target (dL=%.3g)\n", trial - value);
  }
}

// Zeroes the weight of any ensemble column whose probability has decayed
// below kPruneWeight, keeping each change only when the augmented objective
// does not get worse. A residual stray weight otherwise shrinks only
// asymptotically and stalls the convergence gates. Leaves the core loaded
// and forwarded at the (possibly updated) x.
void prune_dead_columns(detail::ObjectiveCore& core, RealVector& x,
                        const RealVector& lambda, double mu, double alpha, double beta) {
  const int r = core.rank();
  const int q_offset = 2 * core.dim() * r;
  double value = augmented_value(core, lambda, mu, alpha, beta);
  for (int i = 0; i < r; ++i) {
    if (x(q_offset + i) == 0.0 || core.p()(i) >= kPruneWeight) continue;
    const double saved = x(q_offset + i);
    x(q_offset + i) = 0.0;
    if (!core.load_packed(x)) {  // pruning would kill the whole weight vector
      x(q_offset + i) = saved;
      core.load_packed(x);
      core.forward();
      continue;
    }
    core.forward();
    const double trial = augmented_value(core, lambda, mu, alpha, beta);
    if (trial <= value + kAcceptSlack * std::max(1.0, std::abs(value))) {
      value = trial;
      if (trace_enabled()) {
        std::fprintf(stderr, "[alm]   pruned column %d (weight %.3g)\n", i, saved);
      }
    } else {
      x(q_offset + i) = saved;
      core.load_packed(x);
      core.forward();
    }
  }
}

SolveResult run_attempt(detail::ObjectiveCore& core, const ALMConfig& cfg,
                        std::uint64_t stream_seed, int restart_index) {
  detail::Rng rng(detail::splitmix64(stream_seed));
  const int n = core.n_coords();
  const int m = core.n_constraints();

  random_init(core, rng);
  RealVector x(n);
  core.store_packed(x);

  RealVector lambda = RealVector::Zero(m);
  // Restart continuation: the first attempt weighs the fidelity term
  // heavily (small mu), which steers toward low-fidelity witnesses; later
  // attempts start with a stronger penalty so they escape infeasible local
  // minima of the violation landscape that capture fidelity-led runs.
  const double mu_start =
      std::min(cfg.mu0 * std::pow(16.0, restart_index), cfg.mu_max / cfg.gamma);
  double mu = mu_start;
  double alpha = 1.0;
  double beta = 1.0;

  InnerMinimizer inner(core, cfg, rng);
  RealVector x_before(n);

  double prev_fidelity = std::numeric_limits<double>::quiet_NaN();
  double fidelity = 0.0;
  double constraint_norm = std::numeric_limits<double>::infinity();
  bool converged = false;
  int outer = 0;
  double best_norm = std::numeric_limits<double>::infinity();
  int best_norm_outer = 0;

  for (outer = 1; outer <= cfg.max_outer_iters; ++outer) {
    x_before = x;
    inner.minimize(x, lambda, mu, alpha, beta);
    const double moved = (x - x_before).lpNorm<Eigen::Infinity>();

    if (!core.load_packed(x)) {
      fix_degenerate(core, rng);
      core.store_packed(x);
      core.load_packed(x);
    }
    core.forward();

    // The stop rule and multiplier updates read the minimizer's endpoint;
    // its residual is what lambda has to learn from.
    fidelity = core.fidelity();
    constraint_norm = core.constraint().lpNorm<Eigen::Infinity>();
    const RealVector g_end = core.constraint();

    if (trace_enabled()) {
      std::fprintf(stderr,
                   "[alm] r=%d restart=%d outer=%d f=%.12g |g|=%.3g mu=%.3g a=%.3g b=%.3g "
                   "|lam|=%.3g df=%.3g step=%.3g moved=%.3g acc=%d rej=%d frej=%d\n",
                   core.rank(), restart_index, outer, fidelity, constraint_norm, mu, alpha,
                   beta, lambda.lpNorm<Eigen::Infinity>(),
                   std::abs(fidelity - prev_fidelity), inner.step(), moved,
                   inner.accepted_count, inner.reject_count, inner.full_reject_count);
    }

    if (constraint_norm < cfg.constraint_tol &&
        std::abs(fidelity - prev_fidelity) < cfg.fidelity_change_tol) {
      converged = true;
      break;
    }
    prev_fidelity = fidelity;

    if (constraint_norm < kStagnationImprovement * best_norm) {
      best_norm = constraint_norm;
      best_norm_outer = outer;
    } else if (outer - best_norm_outer >= kStagnationWindow &&
               best_norm >= 2.0 * cfg.constraint_tol) {
      break;  // stuck in an infeasible basin
    }

    if (cfg.gamma * mu <= cfg.mu_max) {
      lambda += mu * g_end;
      mu = std::min(cfg.gamma * mu, cfg.mu_max);
    } else if (alpha / cfg.gamma >= cfg.alpha_min) {
      lambda = (lambda + mu * g_end) / cfg.gamma;
      alpha = std::max(alpha / cfg.gamma, cfg.alpha_min);
    } else {
      lambda = (lambda + mu * g_end) / cfg.gamma;
      beta = std::max(beta / cfg.gamma, cfg.beta_min);
    }

    // Reshape the starting point for the next subproblem: canonicalize the
    // ensemble, drop dead weight, and offer the exact basin limit once the
    // fidelity sits above the uniqueness threshold. These touch only where
    // the next minimization starts; the values fed back into lambda above
    // came from the untouched endpoint, so a snapped-and-escaped iterate
    // still teaches the multipliers what holds it at the target.
    if (core.rank() > 1) {
      eigen_reset(core, x);
      prune_dead_columns(core, x, lambda, mu, alpha, beta);
    }
    if (fidelity > 1.0 - cfg.delta) {
      snap_to_target(core, x, lambda, mu, alpha, beta);
    }
    inner.reset_momentum();  // coordinates may have jumped; moments are stale
  }

  SolveResult result;
  result.fidelity = fidelity;
  result.constraint_inf_norm = constraint_norm;
  result.params = unpack_params(x, core.dim(), core.rank());
  result.outer_iters = std::min(outer, cfg.max_outer_iters);
  result.converged = converged;
  result.restarts_used = restart_index;
  return result;
}

struct ConfirmationOutcome {
  bool all_above_threshold = false;
  SolveResult representative;
};

// Runs independent initializations (attempt k uses stream cfg.seed + k) until
// cfg.n_restarts of them converge. With early_exit set, returns as soon as a
// feasible run lands at or below the 1 - delta threshold, which already
// disproves uniqueness.
ConfirmationOutcome confirm_uniqueness(const PureState& target,
                                       const MeasurementFramework& fw, int r,
                                       const ALMConfig& cfg, bool early_exit) {
  validate_config(cfg);
  detail::ObjectiveCore core(target, fw, r);
  const int max_attempts = 3 * cfg.n_restarts;
  const double threshold = 1.0 - cfg.delta;

  int confirmed = 0;
  bool have_best = false;
  SolveResult best_fidelity_run;
  SolveResult best_violation_run;
  double best_violation = std::numeric_limits<double>::infinity();

  for (int attempt = 0; attempt < max_attempts && confirmed < cfg.n_restarts; ++attempt) {
    SolveResult res = run_attempt(core, cfg, cfg.seed + attempt, attempt);
    if (res.constraint_inf_norm < best_violation) {
      best_violation = res.constraint_inf_norm;
      best_violation_run = res;
    }
    if (!res.converged) continue;
    ++confirmed;
    if (!have_best || res.fidelity < best_fidelity_run.fidelity) {
      best_fidelity_run = res;
      have_best = true;
    }
    if (early_exit && res.fidelity <= threshold) {
      return {false, res};
    }
  }

  if (confirmed < cfg.n_restarts) {
    if (have_best && best_fidelity_run.fidelity <= threshold) {
      return {false, best_fidelity_run};
    }
    throw InfeasibleError(
        "uniqueness confirmation: could not gather " + std::to_string(cfg.n_restarts) +
            " feasible runs in " + std::to_string(max_attempts) + " attempts",
        best_violation_run);
  }
  return {best_fidelity_run.fidelity > threshold, best_fidelity_run};
}

}  // namespace

double augmented_objective(const EnsembleParams& params, const RealVector& lambda,
                           double mu, double alpha, double beta,
                           const PureState& target, const MeasurementFramework& fw,
                           RealVector* grad) {
  if (mu <= 0.0) throw Error("augmented_objective: mu must be positive");
  if (lambda.size() != fw.size()) {
    throw DimensionError("augmented_objective: multiplier length does not match framework");
  }
  detail::ObjectiveCore core(target, fw, params.rank());
  if (!core.load(params.V, params.q)) {
    throw DegenerateParamsError("augmented_objective: degenerate ensemble parameters");
  }
  core.forward();
  const RealVector& g = core.constraint();
  const double value =
      alpha * core.fidelity() + beta * lambda.dot(g) + 0.5 * mu * g.squaredNorm();
  if (grad != nullptr) {
    grad->resize(core.n_coords());
    RealVector w = beta * lambda + mu * g;
    core.weighted_gradient(alpha, w);
    core.store_gradient_packed(*grad);
  }
  return value;
}

SolveResult alm_solve(const PureState& target, const MeasurementFramework& fw,
                      int r, const ALMConfig& cfg) {
  validate_config(cfg);
  if (r < 1) throw Error("alm_solve: rank budget must be at least 1");
  if (target.dim() != fw.dimension) {
    throw DimensionError("alm_solve: target and framework dimensions disagree");
  }
  detail::ObjectiveCore core(target, fw, r);
  SolveResult best_violation_run;
  double best_violation = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < cfg.n_restarts; ++attempt) {
    SolveResult res = run_attempt(core, cfg, cfg.seed + attempt, attempt);
    if (res.converged) return res;
    if (res.constraint_inf_norm < best_violation) {
      best_violation = res.constraint_inf_norm;
      best_violation_run = res;
    }
  }
  throw InfeasibleError("alm_solve: no initialization reached feasibility within " +
                            std::to_string(cfg.n_restarts) + " restarts",
                        best_violation_run);
}

SolveResult min_fidelity_solve(const PureState& target, const MeasurementFramework& fw,
                               int r, const ALMConfig& cfg) {
  return confirm_uniqueness(target, fw, r, cfg, /*early_exit=*/false).representative;
}

std::pair<bool, SolveResult> determine_udp(const PureState& target,
                                           const MeasurementFramework& fw,
                                           const ALMConfig& cfg) {
  auto outcome = confirm_uniqueness(target, fw, udp_rank().max_rank, cfg,
                                    /*early_exit=*/true);
  return {outcome.all_above_threshold, outcome.representative};
}

std::pair<bool, SolveResult> determine_uda(const PureState& target,
                                           const MeasurementFramework& fw,
                                           const ALMConfig& cfg,
                                           const RankBudget& budget) {
  auto outcome = confirm_uniqueness(target, fw, budget.max_rank, cfg,
                                    /*early_exit=*/true);
  return {outcome.all_above_threshold, outcome.representative};
}

UniquenessVerdict classify(const PureState& target, const MeasurementFramework& fw,
                           const ALMConfig& cfg, const RankBudget& budget) {
  UniquenessVerdict verdict;
  auto [udp, udp_result] = determine_udp(target, fw, cfg);
  verdict.udp_result = udp_result;
  if (!udp) {
    verdict.category = UniquenessCategory::NOT_UDP;
    verdict.witness = ensemble_density(udp_result.params);
    return verdict;
  }
  auto [uda, uda_result] = determine_uda(target, fw, cfg, budget);
  verdict.uda_result = uda_result;
  if (!uda) {
    verdict.category = UniquenessCategory::UDP_NOT_UDA;
    verdict.witness = ensemble_density(uda_result.params);
    return verdict;
  }
  verdict.category = UniquenessCategory::UDA;
  return verdict;
}

}  // namespace udtomo
