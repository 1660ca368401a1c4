// Command-line driver for the uniqueness-determination experiments.
//
// Usage:
//   udtomo <experiment> --framework <a8|a7|a6|pauli2> --samples N --seed S
//          --out PATH --jobs J [--delta 0.01] [--rank-budget auto|N]
//
// Experiments: qutrit-sphere, qutrit-circle, ghz-sweep, symmetric-scan,
// degeneracy-curves, single. The single experiment additionally takes one of
// --ghz-theta, --qutrit a0,a1,a2, --symmetric c0,c2,c4, or
// --amplitudes re:im,re:im,...
//
// Exit codes: 0 success, 2 usage error, 3 infeasible solve.

#include <complex>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "udtomo/experiments.hpp"

namespace {

std::vector<double> parse_reals(const std::string& text, std::size_t expected) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    std::size_t used = 0;
    values.push_back(std::stod(token, &used));
    if (used != token.size()) throw std::invalid_argument("trailing characters in: " + token);
  }
  if (values.size() != expected) {
    throw std::invalid_argument("expected " + std::to_string(expected) + " comma-separated values");
  }
  return values;
}

std::vector<std::complex<double>> parse_amplitudes(const std::string& text) {
  std::vector<std::complex<double>> values;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    const auto colon = token.find(':');
    std::size_t used = 0;
    double re = 0.0, im = 0.0;
    if (colon == std::string::npos) {
      re = std::stod(token, &used);
      if (used != token.size()) throw std::invalid_argument("trailing characters in: " + token);
    } else {
      const std::string re_part = token.substr(0, colon);
      const std::string im_part = token.substr(colon + 1);
      re = std::stod(re_part, &used);
      if (used != re_part.size()) throw std::invalid_argument("trailing characters in: " + re_part);
      im = std::stod(im_part, &used);
      if (used != im_part.size()) throw std::invalid_argument("trailing characters in: " + im_part);
    }
    values.emplace_back(re, im);
  }
  if (values.size() < 2) throw std::invalid_argument("need at least two amplitudes");
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pure-state uniqueness determination (UDP/UDA) via augmented-Lagrangian solves"};
  app.set_config("--config", "", "Flat key=value config file mirroring every flag");

  std::string experiment;
  app.add_option("experiment", experiment, "Experiment to run")
      ->required()
      ->check(CLI::IsMember({"qutrit-sphere", "qutrit-circle", "ghz-sweep", "symmetric-scan",
                             "degeneracy-curves", "single"}));

  udtomo::ExperimentConfig cfg;
  std::string rank_budget = "auto";
  std::string qutrit_spec, symmetric_spec, amplitudes_spec;
  double ghz_theta = 0.0;
  bool have_ghz_theta = false;

  app.add_option("--framework", cfg.framework, "Measurement framework: a8, a7, a6, or pauli2")
      ->default_val("auto")
      ->check(CLI::IsMember({"auto", "a8", "a7", "a6", "pauli2"}));
  app.add_option("--samples", cfg.n_samples, "Sample count (0 = desk-scale default)");
  app.add_option("--seed", cfg.seed, "Base RNG seed");
  app.add_option("--out", cfg.output_path, "Output CSV/JSON path");
  app.add_option("--jobs", cfg.parallelism, "Worker threads")->envname("UDTOMO_JOBS");
  app.add_option("--delta", cfg.alm.delta, "Uniqueness threshold")->default_val(0.01);
  app.add_option("--rank-budget", rank_budget, "Rank budget: auto or a positive integer")
      ->default_val("auto");
  app.add_option("--ghz-theta", ghz_theta, "single: GHZ angle in radians")
      ->each([&](const std::string&) { have_ghz_theta = true; });
  app.add_option("--qutrit", qutrit_spec, "single: real qutrit amplitudes a0,a1,a2");
  app.add_option("--symmetric", symmetric_spec, "single: symmetric coefficients c0,c2,c4");
  app.add_option("--amplitudes", amplitudes_spec,
                 "single: comma-separated amplitudes, each re or re:im");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (rank_budget != "auto") {
      int budget = 0;
      try {
        std::size_t used = 0;
        budget = std::stoi(rank_budget, &used);
        if (used != rank_budget.size()) throw std::invalid_argument(rank_budget);
      } catch (const std::exception&) {
        budget = 0;
      }
      if (budget < 1) {
        std::cerr << "error: --rank-budget must be 'auto' or a positive integer\n";
        return 2;
      }
      cfg.rank_budget = budget;
    }

    udtomo::SingleStateSpec single_spec;
    if (experiment == "single") {
      try {
        if (have_ghz_theta) single_spec.ghz_theta = ghz_theta;
        if (!qutrit_spec.empty()) {
          const auto v = parse_reals(qutrit_spec, 3);
          single_spec.qutrit = {v[0], v[1], v[2]};
        }
        if (!symmetric_spec.empty()) {
          const auto v = parse_reals(symmetric_spec, 3);
          single_spec.symmetric = {v[0], v[1], v[2]};
        }
        if (!amplitudes_spec.empty()) {
          single_spec.amplitudes = parse_amplitudes(amplitudes_spec);
        }
      } catch (const std::exception& e) {
        std::cerr << "error: could not parse state specification: " << e.what() << "\n";
        return 2;
      }
      const int given = single_spec.amplitudes.has_value() + single_spec.ghz_theta.has_value() +
                        single_spec.qutrit.has_value() + single_spec.symmetric.has_value();
      if (given != 1) {
        std::cerr << "error: single needs exactly one of --ghz-theta, --qutrit, --symmetric, "
                     "--amplitudes\n";
        return 2;
      }
    }

    if (experiment == "qutrit-sphere" || experiment == "qutrit-circle") {
      cfg.experiment = experiment == "qutrit-sphere" ? udtomo::ExperimentKind::QUTRIT_SPHERE
                                                     : udtomo::ExperimentKind::QUTRIT_CIRCLE;
      const auto result = udtomo::run_qutrit_experiment(cfg);
      std::cout << "wrote " << result.samples.size() << " rows";
      if (!result.csv_path.empty()) std::cout << " to " << result.csv_path;
      std::cout << "\n";
      for (const auto& [key, s] : result.summary) {
        std::cout << "  category " << key << ": " << s.count << " (" << s.fraction * 100.0
                  << "%, 95% CI [" << s.wilson_lo * 100.0 << "%, " << s.wilson_hi * 100.0
                  << "%])\n";
      }
    } else if (experiment == "ghz-sweep") {
      cfg.experiment = udtomo::ExperimentKind::GHZ_SWEEP;
      const auto result = udtomo::run_ghz_sweep(cfg);
      std::cout << "swept " << result.rows.size() << " theta points, MSE vs analytic = "
                << result.mse;
      if (!result.csv_path.empty()) std::cout << ", wrote " << result.csv_path;
      std::cout << "\n";
    } else if (experiment == "symmetric-scan" || experiment == "degeneracy-curves") {
      cfg.experiment = experiment == "symmetric-scan"
                           ? udtomo::ExperimentKind::SYMMETRIC_SCAN
                           : udtomo::ExperimentKind::DEGENERACY_CURVES;
      const auto result = udtomo::run_symmetric_scan(cfg);
      std::cout << "wrote " << result.samples.size() << " rows";
      if (!result.csv_path.empty()) std::cout << " to " << result.csv_path;
      std::cout << "\n";
      for (const auto& [key, s] : result.summary) {
        std::cout << "  category " << key << ": " << s.count << " (" << s.fraction * 100.0
                  << "%, 95% CI [" << s.wilson_lo * 100.0 << "%, " << s.wilson_hi * 100.0
                  << "%])\n";
      }
    } else {
      cfg.experiment = udtomo::ExperimentKind::SINGLE;
      std::cout << udtomo::run_single(cfg, single_spec) << "\n";
    }
  } catch (const udtomo::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << " (best attempt |g|_inf = "
              << e.best_attempt.constraint_inf_norm << ")\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
