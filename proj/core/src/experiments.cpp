#include "udtomo/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "udtomo/oracles.hpp"
#include "rng_util.hpp"

namespace udtomo {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t sample_seed(std::uint64_t seed, int index) {
  return detail::splitmix64(detail::splitmix64(seed) + static_cast<std::uint64_t>(index));
}

// Index-sharded worker pool. Every sample derives its own RNG stream from
// (seed, index), so results do not depend on the worker count.
void parallel_for(int n, int jobs, const std::function<void(int)>& body) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      {
        std::scoped_lock lock(error_mutex);
        if (first_error) return;
      }
      try {
        body(i);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(jobs);
  for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

const char* category_letter(UniquenessCategory c) {
  switch (c) {
    case UniquenessCategory::UDA: return "A";
    case UniquenessCategory::UDP_NOT_UDA: return "B";
    case UniquenessCategory::NOT_UDP: return "C";
  }
  return "?";
}

const char* degeneracy_letter(DegeneracyType t) {
  switch (t) {
    case DegeneracyType::I: return "I";
    case DegeneracyType::II: return "II";
    case DegeneracyType::III: return "III";
    case DegeneracyType::IV: return "IV";
  }
  return "?";
}

std::string flags_string(const std::set<DegeneracyType>& flags) {
  std::string out;
  for (auto t : flags) {
    if (!out.empty()) out += '|';
    out += degeneracy_letter(t);
  }
  return out;
}

void wilson_interval(int count, int n, CategorySummary& s) {
  constexpr double z = 1.959963984540054;  // 95%
  s.count = count;
  if (n == 0) return;
  const double p = static_cast<double>(count) / n;
  s.fraction = p;
  const double z2n = z * z / n;
  const double denom = 1.0 + z2n;
  const double center = (p + z2n / 2.0) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2n / (4.0 * n)) / denom;
  s.wilson_lo = std::max(0.0, center - half);
  s.wilson_hi = std::min(1.0, center + half);
}

std::map<std::string, CategorySummary> summarize(const std::vector<ClassifiedSample>& samples) {
  const int n = static_cast<int>(samples.size());
  std::map<std::string, int> counts{{"A", 0}, {"B", 0}, {"C", 0}};
  for (const auto& s : samples) counts[category_letter(s.category)]++;
  std::map<std::string, CategorySummary> out;
  for (const auto& [key, count] : counts) {
    CategorySummary s;
    wilson_interval(count, n, s);
    out[key] = s;
  }
  return out;
}

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  nlohmann::json real_rows = nlohmann::json::array();
  nlohmann::json imag_rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json rr = nlohmann::json::array();
    nlohmann::json ir = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ir.push_back(m(i, j).imag());
    }
    real_rows.push_back(std::move(rr));
    imag_rows.push_back(std::move(ir));
  }
  return {{"dim", m.rows()}, {"real", std::move(real_rows)}, {"imag", std::move(imag_rows)}};
}

ComplexMatrix matrix_from_json(const nlohmann::json& doc) {
  const auto dim = doc.at("dim").get<Eigen::Index>();
  const auto& real_rows = doc.at("real");
  const auto& imag_rows = doc.at("imag");
  ComplexMatrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      m(i, j) = std::complex<double>(real_rows[i][j].get<double>(),
                                     imag_rows[i][j].get<double>());
    }
  }
  return m;
}

std::string summary_json(const std::map<std::string, CategorySummary>& summary, int n) {
  nlohmann::json doc;
  doc["n"] = n;
  for (const auto& [key, s] : summary) {
    doc["counts"][key] = s.count;
    doc["fractions"][key] = {
        {"p", s.fraction}, {"wilson_lo", s.wilson_lo}, {"wilson_hi", s.wilson_hi}};
  }
  return doc.dump();
}

void write_classified_outputs(const ExperimentConfig& cfg, const char* experiment_name,
                              ExperimentResult& result) {
  result.summary = summarize(result.samples);
  if (cfg.output_path.empty()) return;

  std::ofstream csv(cfg.output_path);
  if (!csv) throw Error("cannot open output path: " + cfg.output_path);
  csv << "# schema=udtomo-v1\n";
  csv << "# experiment=" << experiment_name << " framework=" << cfg.framework
      << " samples=" << result.samples.size() << " seed=" << cfg.seed
      << " delta=" << fmt_double(cfg.alm.delta) << "\n";
  csv << "coord0,coord1,coord2,category,udp_fidelity,uda_fidelity,flags\n";
  for (const auto& s : result.samples) {
    csv << fmt_double(s.coordinates[0]) << ',' << fmt_double(s.coordinates[1]) << ','
        << fmt_double(s.coordinates[2]) << ',' << category_letter(s.category) << ','
        << fmt_double(s.udp_fidelity) << ','
        << (s.uda_fidelity ? fmt_double(*s.uda_fidelity) : "") << ','
        << flags_string(s.degeneracy_flags) << "\n";
  }
  csv << "# summary=" << summary_json(result.summary, static_cast<int>(result.samples.size()))
      << "\n";
  if (!csv) throw Error("failed while writing: " + cfg.output_path);
  result.csv_path = cfg.output_path;

  nlohmann::json witnesses;
  witnesses["schema"] = "udtomo-witness-v1";
  witnesses["rows"] = nlohmann::json::object();
  for (std::size_t i = 0; i < result.samples.size(); ++i) {
    if (result.samples[i].witness) {
      witnesses["rows"][std::to_string(i)] = matrix_to_json(*result.samples[i].witness);
    }
  }
  result.witness_path = cfg.output_path + ".witnesses.json";
  std::ofstream wf(result.witness_path);
  if (!wf) throw Error("cannot open output path: " + result.witness_path);
  wf << witnesses.dump(2) << "\n";
}

GellMannVariant parse_gell_mann(const std::string& name) {
  if (name == "a8") return GellMannVariant::A8;
  if (name == "a7") return GellMannVariant::A7;
  if (name == "a6") return GellMannVariant::A6;
  throw Error("unknown qutrit framework: " + name + " (expected a8, a7, or a6)");
}

ClassifiedSample classify_sample(const PureState& target,
                                 const std::array<double, 3>& coords,
                                 const MeasurementFramework& fw, const ALMConfig& alm,
                                 const RankBudget& budget,
                                 std::set<DegeneracyType> flags) {
  const UniquenessVerdict verdict = classify(target, fw, alm, budget);
  ClassifiedSample sample;
  sample.coordinates = coords;
  sample.category = verdict.category;
  sample.udp_fidelity = verdict.udp_result.fidelity;
  if (verdict.uda_result) sample.uda_fidelity = verdict.uda_result->fidelity;
  sample.degeneracy_flags = std::move(flags);
  sample.witness = verdict.witness;
  return sample;
}

}  // namespace

int default_samples(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::QUTRIT_SPHERE: return 2000;
    case ExperimentKind::QUTRIT_CIRCLE: return 500;
    case ExperimentKind::GHZ_SWEEP: return 200;
    case ExperimentKind::SYMMETRIC_SCAN: return 1000;
    case ExperimentKind::DEGENERACY_CURVES: return 800;  // 200 per curve
    case ExperimentKind::SINGLE: return 1;
  }
  return 1;
}

ExperimentResult run_qutrit_experiment(const ExperimentConfig& cfg) {
  if (cfg.experiment != ExperimentKind::QUTRIT_SPHERE &&
      cfg.experiment != ExperimentKind::QUTRIT_CIRCLE) {
    throw Error("run_qutrit_experiment: config does not select a qutrit experiment");
  }
  const bool circle = cfg.experiment == ExperimentKind::QUTRIT_CIRCLE;
  const std::string fw_name = cfg.framework == "auto" ? "a8" : cfg.framework;
  const MeasurementFramework fw = gell_mann_framework(parse_gell_mann(fw_name));
  const RankBudget budget =
      cfg.rank_budget ? RankBudget{*cfg.rank_budget, RankBoundSource::COROLLARY1}
                      : uda_rank_bound(fw.size());
  const int n = cfg.n_samples > 0 ? cfg.n_samples : default_samples(cfg.experiment);

  ExperimentResult result;
  result.samples.resize(n);
  parallel_for(n, cfg.parallelism, [&](int i) {
    const std::uint64_t stream = sample_seed(cfg.seed, i);
    detail::Rng rng(stream);
    std::array<double, 3> coords{};
    if (circle) {
      const double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
      coords = {std::cos(t), 0.0, std::sin(t)};
    } else {
      double norm2 = 0.0;
      do {
        for (auto& c : coords) c = rng.normal();
        norm2 = coords[0] * coords[0] + coords[1] * coords[1] + coords[2] * coords[2];
      } while (norm2 < 1e-24);
      const double inv = 1.0 / std::sqrt(norm2);
      for (auto& c : coords) c *= inv;
    }
    ComplexVector amps(3);
    amps << coords[0], coords[1], coords[2];
    ALMConfig local = cfg.alm;
    local.seed = stream;
    result.samples[i] = classify_sample(PureState::normalized(amps), coords, fw, local,
                                        budget, {});
  });

  write_classified_outputs(cfg, circle ? "qutrit-circle" : "qutrit-sphere", result);
  return result;
}

GhzSweepResult run_ghz_sweep(const ExperimentConfig& cfg) {
  const int n = cfg.n_samples > 0 ? cfg.n_samples : default_samples(ExperimentKind::GHZ_SWEEP);
  if (n < 2) throw Error("run_ghz_sweep: need at least two sweep points");
  const MeasurementFramework fw = pauli_2local_framework(4);

  GhzSweepResult result;
  result.rows.resize(n);
  parallel_for(n, cfg.parallelism, [&](int i) {
    const double theta = std::numbers::pi * i / n;
    ALMConfig local = cfg.alm;
    local.seed = sample_seed(cfg.seed, i);
    const SolveResult solve = min_fidelity_solve(ghz_state(theta), fw, 1, local);
    const double analytic = ghz_optimum(theta).second;
    result.rows[i] = {theta, solve.fidelity, analytic, std::abs(solve.fidelity - analytic)};
  });
  double sum_sq = 0.0;
  for (const auto& row : result.rows) sum_sq += row.abs_error * row.abs_error;
  result.mse = sum_sq / n;

  if (!cfg.output_path.empty()) {
    std::ofstream csv(cfg.output_path);
    if (!csv) throw Error("cannot open output path: " + cfg.output_path);
    csv << "# schema=udtomo-v1\n";
    csv << "# experiment=ghz-sweep framework=pauli2 samples=" << n << " seed=" << cfg.seed
        << " delta=" << fmt_double(cfg.alm.delta) << "\n";
    csv << "theta,solver_fidelity,analytic_fidelity,abs_error\n";
    for (const auto& row : result.rows) {
      csv << fmt_double(row.theta) << ',' << fmt_double(row.solver_fidelity) << ','
          << fmt_double(row.analytic_fidelity) << ',' << fmt_double(row.abs_error) << "\n";
    }
    csv << "# summary=" << nlohmann::json({{"n", n}, {"mse", result.mse}}).dump() << "\n";
    if (!csv) throw Error("failed while writing: " + cfg.output_path);
    result.csv_path = cfg.output_path;
  }
  return result;
}

namespace {

// Parametric samplers for the four 2-RDM degeneracy curves on the unit
// sphere of (c0, c2, c4). Each draw is uniform in the curve parameter with
// random branch signs; constructions are exact up to round-off, which the
// default classification tolerance absorbs.
std::array<double, 3> sample_degeneracy_curve(int type, detail::Rng& rng) {
  auto sign = [&rng] { return rng.uniform() < 0.5 ? -1.0 : 1.0; };
  for (;;) {
    std::array<double, 3> c{};
    switch (type) {
      case 0: {  // (i) lambda1 = lambda2: c2 = 0
        const double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
        c = {std::cos(t), 0.0, std::sin(t)};
        break;
      }
      case 1: {  // (ii) lambda3 = lambda4: c4 = -c0
        const double u = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double c0 = std::cos(u) / std::sqrt(2.0);
        c = {c0, std::sin(u), -c0};
        break;
      }
      case 2: {  // (iii) lambda1 = lambda4: c0 c4 = c2^2/6
        const double v = rng.uniform(-1.0, 1.0);
        const double u = sign() * std::sqrt((1.0 + v * v) / 2.0);
        const double c2 = sign() * std::sqrt(3.0 * (1.0 - v * v)) / 2.0;
        c = {(u + v) / 2.0, c2, (u - v) / 2.0};
        break;
      }
      default: {  // (iv) lambda2 = lambda3 or lambda2 = lambda4
        const double a = rng.uniform(0.0, 0.75);  // a = c2^2
        const double disc = (2.0 * a / 9.0) * (3.0 - 4.0 * a);
        const double prod = a / 6.0 + sign() * std::sqrt(std::max(0.0, disc));
        const double sum_sq = 1.0 - a + 2.0 * prod;   // (c0 + c4)^2
        const double diff_sq = 1.0 - a - 2.0 * prod;  // (c0 - c4)^2
        if (sum_sq < 0.0 || diff_sq < 0.0) continue;
        const double sum = sign() * std::sqrt(sum_sq);
        const double diff = sign() * std::sqrt(diff_sq);
        c = {(sum + diff) / 2.0, sign() * std::sqrt(a), (sum - diff) / 2.0};
        break;
      }
    }
    const double norm = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
    for (auto& x : c) x /= norm;
    const auto flags = degeneracy_class(c[0], c[1], c[2]);
    const DegeneracyType wanted[4] = {DegeneracyType::I, DegeneracyType::II,
                                      DegeneracyType::III, DegeneracyType::IV};
    if (flags.count(wanted[type])) return c;
  }
}

}  // namespace

ExperimentResult run_symmetric_scan(const ExperimentConfig& cfg) {
  if (cfg.experiment != ExperimentKind::SYMMETRIC_SCAN &&
      cfg.experiment != ExperimentKind::DEGENERACY_CURVES) {
    throw Error("run_symmetric_scan: config does not select a symmetric experiment");
  }
  if (cfg.framework != "auto" && cfg.framework != "pauli2") {
    throw Error("run_symmetric_scan: symmetric experiments use the pauli2 framework");
  }
  const bool curves = cfg.experiment == ExperimentKind::DEGENERACY_CURVES;
  const MeasurementFramework fw = pauli_2local_framework(4);
  const RankBudget budget =
      cfg.rank_budget ? RankBudget{*cfg.rank_budget, RankBoundSource::SYMMETRIC5}
                      : symmetric_uda_rank();
  const int n = cfg.n_samples > 0 ? cfg.n_samples : default_samples(cfg.experiment);

  ExperimentResult result;
  result.samples.resize(n);
  parallel_for(n, cfg.parallelism, [&](int i) {
    const std::uint64_t stream = sample_seed(cfg.seed, i);
    detail::Rng rng(stream);
    std::array<double, 3> coords{};
    if (curves) {
      coords = sample_degeneracy_curve(i % 4, rng);
    } else {
      double norm2 = 0.0;
      do {
        for (auto& c : coords) c = rng.normal();
        norm2 = coords[0] * coords[0] + coords[1] * coords[1] + coords[2] * coords[2];
      } while (norm2 < 1e-24);
      const double inv = 1.0 / std::sqrt(norm2);
      for (auto& c : coords) c *= inv;
    }
    ALMConfig local = cfg.alm;
    local.seed = stream;
    result.samples[i] =
        classify_sample(special_symmetric_state(coords[0], coords[1], coords[2]), coords,
                        fw, local, budget, degeneracy_class(coords[0], coords[1], coords[2]));
  });

  write_classified_outputs(cfg, curves ? "degeneracy-curves" : "symmetric-scan", result);
  return result;
}

std::string run_single(const ExperimentConfig& cfg, const SingleStateSpec& spec) {
  int given = 0;
  given += spec.amplitudes.has_value();
  given += spec.ghz_theta.has_value();
  given += spec.qutrit.has_value();
  given += spec.symmetric.has_value();
  if (given != 1) {
    throw Error("run_single: exactly one state specification is required");
  }

  PureState target = [&] {
    if (spec.ghz_theta) return ghz_state(*spec.ghz_theta);
    if (spec.qutrit) {
      ComplexVector amps(3);
      amps << (*spec.qutrit)[0], (*spec.qutrit)[1], (*spec.qutrit)[2];
      return PureState::normalized(amps);
    }
    if (spec.symmetric) {
      const auto& c = *spec.symmetric;
      const double norm = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
      if (norm < 1e-14) throw Error("run_single: zero symmetric coefficients");
      return special_symmetric_state(c[0] / norm, c[1] / norm, c[2] / norm);
    }
    ComplexVector amps(static_cast<Eigen::Index>(spec.amplitudes->size()));
    for (Eigen::Index k = 0; k < amps.size(); ++k) amps(k) = (*spec.amplitudes)[k];
    return PureState::normalized(std::move(amps));
  }();

  std::string fw_name = cfg.framework;
  if (fw_name == "auto") fw_name = target.dim() == 3 ? "a8" : "pauli2";
  MeasurementFramework fw;
  if (fw_name == "pauli2") {
    const int d = target.dim();
    int n_qubits = 0;
    while ((1 << n_qubits) < d) ++n_qubits;
    if ((1 << n_qubits) != d || n_qubits < 2) {
      throw Error("run_single: pauli2 framework needs a 2^n-dimensional state with n >= 2");
    }
    fw = pauli_2local_framework(n_qubits);
  } else {
    if (target.dim() != 3) throw Error("run_single: Gell-Mann frameworks are qutrit-only");
    fw = gell_mann_framework(parse_gell_mann(fw_name));
  }

  RankBudget budget;
  if (cfg.rank_budget) {
    budget = RankBudget{*cfg.rank_budget, RankBoundSource::COROLLARY1};
  } else if ((spec.symmetric || spec.ghz_theta) && fw_name == "pauli2") {
    budget = symmetric_uda_rank();
  } else {
    budget = uda_rank_bound(fw.size());
  }

  ALMConfig local = cfg.alm;
  local.seed = sample_seed(cfg.seed, 0);
  const UniquenessVerdict verdict = classify(target, fw, local, budget);

  auto solve_json = [](const SolveResult& r) {
    return nlohmann::json{{"fidelity", r.fidelity},
                          {"constraint_inf_norm", r.constraint_inf_norm},
                          {"converged", r.converged},
                          {"outer_iters", r.outer_iters},
                          {"restarts_used", r.restarts_used}};
  };

  nlohmann::json doc;
  doc["category"] = category_letter(verdict.category);
  doc["framework"] = fw_name;
  doc["delta"] = local.delta;
  doc["rank_budget"] = budget.max_rank;
  doc["seed"] = cfg.seed;
  doc["udp"] = solve_json(verdict.udp_result);
  doc["uda"] = verdict.uda_result ? solve_json(*verdict.uda_result) : nlohmann::json();
  if (verdict.witness) {
    doc["witness"] = matrix_to_json(*verdict.witness);
    const WitnessReport report = verify_witness(target, *verdict.witness, fw, local.delta);
    doc["witness_check"] = {{"measurement_gap", report.measurement_gap},
                            {"fidelity", report.fidelity},
                            {"valid", report.valid}};
  } else {
    doc["witness"] = nlohmann::json();
  }

  const std::string text = doc.dump(2);
  if (!cfg.output_path.empty()) {
    std::ofstream out(cfg.output_path);
    if (!out) throw Error("cannot open output path: " + cfg.output_path);
    out << text << "\n";
  }
  return text;
}

std::map<int, ComplexMatrix> load_witness_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open witness file: " + path);
  nlohmann::json doc;
  in >> doc;
  std::map<int, ComplexMatrix> out;
  for (const auto& [key, value] : doc.at("rows").items()) {
    out[std::stoi(key)] = matrix_from_json(value);
  }
  return out;
}

}  // namespace udtomo
