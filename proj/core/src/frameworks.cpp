#include "udtomo/frameworks.hpp"

#include <complex>
#include <utility>

#include <json.hpp>

#include "udtomo/states.hpp"

namespace udtomo {

using namespace std::complex_literals;

namespace {

ComplexMatrix gell_mann(int index) {
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  switch (index) {
    case 1: m(0, 1) = 1; m(1, 0) = 1; break;
    case 2: m(0, 1) = -1i; m(1, 0) = 1i; break;
    case 3: m(0, 0) = 1; m(1, 1) = -1; break;
    case 4: m(0, 2) = 1; m(2, 0) = 1; break;
    case 5: m(0, 2) = -1i; m(2, 0) = 1i; break;
    case 6: m(1, 2) = 1; m(2, 1) = 1; break;
    case 7: m(1, 2) = -1i; m(2, 1) = 1i; break;
    case 8: {
      const double s = 1.0 / std::sqrt(3.0);
      m(0, 0) = s; m(1, 1) = s; m(2, 2) = -2.0 * s;
      break;
    }
  }
  return m;
}

ComplexMatrix pauli(char axis) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  switch (axis) {
    case 'X': m(0, 1) = 1; m(1, 0) = 1; break;
    case 'Y': m(0, 1) = -1i; m(1, 0) = 1i; break;
    case 'Z': m(0, 0) = 1; m(1, 1) = -1; break;
  }
  return m;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Pauli string with `axes[k]` acting on `sites[k]`; site 0 is the leftmost
// tensor factor.
ComplexMatrix pauli_string(int n_qubits, const std::vector<int>& sites,
                           const std::vector<char>& axes) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int s = 0; s < n_qubits; ++s) {
    ComplexMatrix factor = ComplexMatrix::Identity(2, 2);
    for (std::size_t k = 0; k < sites.size(); ++k) {
      if (sites[k] == s) factor = pauli(axes[k]);
    }
    out = kron(out, factor);
  }
  return out;
}

}  // namespace

MeasurementFramework gell_mann_framework(GellMannVariant variant) {
  MeasurementFramework fw;
  fw.dimension = 3;
  for (int i = 1; i <= 8; ++i) {
    if (variant != GellMannVariant::A8 && i == 8) continue;
    if (variant == GellMannVariant::A6 && i == 4) continue;
    fw.observables.push_back(gell_mann(i));
    fw.labels.push_back("M" + std::to_string(i));
  }
  return fw;
}

MeasurementFramework pauli_2local_framework(int n_qubits) {
  if (n_qubits < 2) {
    throw DimensionError("pauli_2local_framework: need at least two qubits");
  }
  const char axes[3] = {'X', 'Y', 'Z'};
  MeasurementFramework fw;
  fw.dimension = 1 << n_qubits;
  for (int s = 0; s < n_qubits; ++s) {
    for (char a : axes) {
      fw.observables.push_back(pauli_string(n_qubits, {s}, {a}));
      fw.labels.push_back(std::string(1, a) + std::to_string(s + 1));
    }
  }
  for (int s = 0; s < n_qubits; ++s) {
    for (int t = s + 1; t < n_qubits; ++t) {
      for (char a : axes) {
        for (char b : axes) {
          fw.observables.push_back(pauli_string(n_qubits, {s, t}, {a, b}));
          fw.labels.push_back(std::string(1, a) + std::to_string(s + 1) +
                              std::string(1, b) + std::to_string(t + 1));
        }
      }
    }
  }
  return fw;
}

MeasurementFramework reduced_symmetric_framework(const PureState& target) {
  if (target.dim() != 16) {
    throw FormError("reduced_symmetric_framework: target must be a 4-qubit state");
  }
  // Validate the c0/c2/c4 symmetric form: project onto omega_0, omega_2,
  // omega_4 and require the remainder to vanish and the coefficients to be
  // real up to a common global phase.
  const auto omega = symmetric_basis();
  const ComplexVector& amps = target.amplitudes();
  std::complex<double> c0 = omega[0].amplitudes().dot(amps);
  std::complex<double> c2 = omega[2].amplitudes().dot(amps);
  std::complex<double> c4 = omega[4].amplitudes().dot(amps);
  ComplexVector remainder = amps - c0 * omega[0].amplitudes() -
                            c2 * omega[2].amplitudes() - c4 * omega[4].amplitudes();
  if (remainder.norm() > 1e-10) {
    throw FormError("reduced_symmetric_framework: target is not in the c0/c2/c4 symmetric form");
  }
  std::complex<double> leading = c0;
  if (std::abs(c2) > std::abs(leading)) leading = c2;
  if (std::abs(c4) > std::abs(leading)) leading = c4;
  const std::complex<double> phase = leading / std::abs(leading);
  if (std::abs(std::imag(c0 / phase)) > 1e-10 ||
      std::abs(std::imag(c2 / phase)) > 1e-10 ||
      std::abs(std::imag(c4 / phase)) > 1e-10) {
    throw FormError("reduced_symmetric_framework: coefficients are not real up to a global phase");
  }

  const int n = 4;
  MeasurementFramework fw;
  fw.dimension = 16;
  for (char a : {'X', 'Y', 'Z'}) {
    fw.observables.push_back(pauli_string(n, {0}, {a}));
    fw.labels.push_back(std::string(1, a) + "1");
  }
  const std::pair<char, char> pair_ops[5] = {
      {'Y', 'Z'}, {'Z', 'X'}, {'X', 'Y'}, {'X', 'X'}, {'Y', 'Y'}};
  for (int s = 0; s < n; ++s) {
    for (int t = s + 1; t < n; ++t) {
      for (auto [a, b] : pair_ops) {
        fw.observables.push_back(pauli_string(n, {s, t}, {a, b}));
        fw.labels.push_back(std::string(1, a) + std::to_string(s + 1) +
                            std::string(1, b) + std::to_string(t + 1));
      }
    }
  }
  fw.observables.push_back(ComplexMatrix::Identity(16, 16));
  fw.labels.push_back("I");
  fw.observables.push_back(target.projector());
  fw.labels.push_back("proj_target");
  return fw;
}

RealVector measurement_vector(const MeasurementFramework& fw, const ComplexMatrix& rho) {
  if (rho.rows() != fw.dimension || rho.cols() != fw.dimension) {
    throw DimensionError("measurement_vector: state dimension does not match framework");
  }
  if (!is_hermitian(rho)) {
    throw HermiticityError("measurement_vector: state is not Hermitian");
  }
  RealVector values(fw.size());
  for (int j = 0; j < fw.size(); ++j) {
    values(j) = std::real(trace_inner(fw.observables[j], rho));
  }
  return values;
}

ComplexMatrix stacked_observables(const MeasurementFramework& fw) {
  const int d = fw.dimension;
  ComplexMatrix stacked(static_cast<Eigen::Index>(fw.size()) * d, d);
  for (int j = 0; j < fw.size(); ++j) {
    stacked.middleRows(static_cast<Eigen::Index>(j) * d, d) = fw.observables[j];
  }
  return stacked;
}

std::string framework_to_json(const MeasurementFramework& fw) {
  nlohmann::json doc;
  doc["dimension"] = fw.dimension;
  doc["labels"] = fw.labels;
  auto& obs = doc["observables"];
  obs = nlohmann::json::array();
  for (const auto& a : fw.observables) {
    nlohmann::json real_rows = nlohmann::json::array();
    nlohmann::json imag_rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      nlohmann::json rr = nlohmann::json::array();
      nlohmann::json ir = nlohmann::json::array();
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        rr.push_back(a(i, j).real());
        ir.push_back(a(i, j).imag());
      }
      real_rows.push_back(std::move(rr));
      imag_rows.push_back(std::move(ir));
    }
    obs.push_back({{"real", std::move(real_rows)}, {"imag", std::move(imag_rows)}});
  }
  return doc.dump();
}

MeasurementFramework framework_from_json(const std::string& text) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  MeasurementFramework fw;
  fw.dimension = doc.at("dimension").get<int>();
  fw.labels = doc.at("labels").get<std::vector<std::string>>();
  for (const auto& entry : doc.at("observables")) {
    const auto& real_rows = entry.at("real");
    const auto& imag_rows = entry.at("imag");
    const auto rows = static_cast<Eigen::Index>(real_rows.size());
    ComplexMatrix a(rows, rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < rows; ++j) {
        a(i, j) = std::complex<double>(real_rows[i][j].get<double>(),
                                       imag_rows[i][j].get<double>());
      }
    }
    fw.observables.push_back(std::move(a));
  }
  if (fw.labels.size() != fw.observables.size()) {
    throw Error("framework_from_json: label/observable count mismatch");
  }
  return fw;
}

}  // namespace udtomo
