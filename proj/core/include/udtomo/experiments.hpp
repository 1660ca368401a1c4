#ifndef UDTOMO_EXPERIMENTS_HPP
#define UDTOMO_EXPERIMENTS_HPP

#include <array>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "udtomo/alm.hpp"
#include "udtomo/states.hpp"

namespace udtomo {

enum class ExperimentKind {
  QUTRIT_SPHERE,
  QUTRIT_CIRCLE,
  GHZ_SWEEP,
  SYMMETRIC_SCAN,
  DEGENERACY_CURVES,
  SINGLE,
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::QUTRIT_SPHERE;
  int n_samples = 0;             // 0 selects the desk-scale default
  std::string framework = "auto";  // a8 | a7 | a6 | pauli2 | auto
  ALMConfig alm;
  std::uint64_t seed = 0;
  std::string output_path;       // empty suppresses file output
  int parallelism = 1;
  std::optional<int> rank_budget;  // empty = derive from the bound theorems
};

struct ClassifiedSample {
  std::array<double, 3> coordinates{};
  UniquenessCategory category = UniquenessCategory::UDA;
  double udp_fidelity = 1.0;
  std::optional<double> uda_fidelity;
  std::set<DegeneracyType> degeneracy_flags;
  std::optional<ComplexMatrix> witness;  // present for categories B and C
};

struct CategorySummary {
  int count = 0;
  double fraction = 0.0;
  double wilson_lo = 0.0;  // Wilson 95% interval
  double wilson_hi = 0.0;
};

struct ExperimentResult {
  std::vector<ClassifiedSample> samples;
  std::map<std::string, CategorySummary> summary;
  std::string csv_path;
  std::string witness_path;
};

struct GhzSweepRow {
  double theta = 0.0;
  double solver_fidelity = 0.0;
  double analytic_fidelity = 0.0;
  double abs_error = 0.0;
};

struct GhzSweepResult {
  std::vector<GhzSweepRow> rows;
  double mse = 0.0;
  std::string csv_path;
};

/// Classifies real-coefficient qutrit states sampled on the unit sphere
/// (QUTRIT_SPHERE) or on the a1 = 0 circle (QUTRIT_CIRCLE) under the chosen
/// Gell-Mann framework, writing one CSV row per sample plus a witness sidecar.
ExperimentResult run_qutrit_experiment(const ExperimentConfig& cfg);

/// Solver minimum fidelity vs. the closed form cos^2(2 theta) on an even
/// theta grid over [0, pi).
GhzSweepResult run_ghz_sweep(const ExperimentConfig& cfg);

/// Classifies four-qubit symmetric states under the 66-operator 2-local Pauli
/// framework with the rank-5 budget: sphere-uniform (c0, c2, c4) samples for
/// SYMMETRIC_SCAN, or samples drawn along the four degeneracy curves for
/// DEGENERACY_CURVES (equal share per curve, uniform in curve parameter).
ExperimentResult run_symmetric_scan(const ExperimentConfig& cfg);

struct SingleStateSpec {
  std::optional<std::vector<std::complex<double>>> amplitudes;
  std::optional<double> ghz_theta;
  std::optional<std::array<double, 3>> qutrit;     // real (a0, a1, a2)
  std::optional<std::array<double, 3>> symmetric;  // (c0, c2, c4)
};

/// Full uniqueness verdict for one explicitly specified state, as a JSON
/// document (also written to cfg.output_path when set).
std::string run_single(const ExperimentConfig& cfg, const SingleStateSpec& spec);

/// Reads a witness sidecar written by the experiment runners; keys are row
/// indices into the CSV.
std::map<int, ComplexMatrix> load_witness_file(const std::string& path);

/// Desk-scale default sample count for an experiment kind.
int default_samples(ExperimentKind kind);

}  // namespace udtomo

#endif
