#include "udtomo/matrix_core.hpp"

#include <algorithm>
#include <numeric>

namespace udtomo {

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

std::complex<double> trace_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw DimensionError("trace_inner: operands must be square with equal dimension");
  }
  // Tr(a b) = sum_ij a_ij b_ji
  return a.cwiseProduct(b.transpose()).sum();
}

SpectralDecomposition spectral(const ComplexMatrix& h) {
  if (!is_hermitian(h)) {
    throw HermiticityError("spectral: input is not Hermitian within 1e-10");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw Error("spectral: eigensolver failed to converge");
  }
  const auto n = h.rows();
  SpectralDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  const double lambda_max = out.eigenvalues.size() > 0 ? out.eigenvalues(0) : 0.0;
  const double cutoff = 1e-9 * std::max(1.0, lambda_max);
  out.rank = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (out.eigenvalues(i) > cutoff) ++out.rank;
  }
  return out;
}

double min_eigenvalue(const ComplexMatrix& h) {
  if (!is_hermitian(h)) {
    throw HermiticityError("min_eigenvalue: input is not Hermitian within 1e-10");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error("min_eigenvalue: eigensolver failed to converge");
  }
  return solver.eigenvalues()(0);
}

namespace {

// Digits of `index` in the mixed-radix system given by dims, site 0 most significant.
void decode_index(Eigen::Index index, const std::vector<int>& dims, std::vector<int>& digits) {
  for (int s = static_cast<int>(dims.size()) - 1; s >= 0; --s) {
    digits[s] = static_cast<int>(index % dims[s]);
    index /= dims[s];
  }
}

Eigen::Index encode_index(const std::vector<int>& digits, const std::vector<int>& dims) {
  Eigen::Index index = 0;
  for (std::size_t s = 0; s < dims.size(); ++s) {
    index = index * dims[s] + digits[s];
  }
  return index;
}

}  // namespace

ComplexMatrix partial_trace(const ComplexMatrix& m,
                            const std::vector<int>& local_dims,
                            const std::vector<int>& traced_sites) {
  if (m.rows() != m.cols()) {
    throw DimensionError("partial_trace: matrix must be square");
  }
  Eigen::Index total = 1;
  for (int d : local_dims) {
    if (d <= 0) throw DimensionError("partial_trace: local dimensions must be positive");
    total *= d;
  }
  if (total != m.rows()) {
    throw DimensionError("partial_trace: product of local dimensions does not match matrix size");
  }
  if (traced_sites.empty()) {
    throw IndexError("partial_trace: no sites to trace out");
  }
  const int n_sites = static_cast<int>(local_dims.size());
  std::vector<bool> traced(n_sites, false);
  for (int s : traced_sites) {
    if (s < 0 || s >= n_sites) throw IndexError("partial_trace: site index out of range");
    traced[s] = true;
  }

  std::vector<int> kept_sites;
  Eigen::Index kept_dim = 1, traced_dim = 1;
  std::vector<int> traced_list;
  for (int s = 0; s < n_sites; ++s) {
    if (traced[s]) {
      traced_dim *= local_dims[s];
      traced_list.push_back(s);
    } else {
      kept_dim *= local_dims[s];
      kept_sites.push_back(s);
    }
  }

  ComplexMatrix out = ComplexMatrix::Zero(kept_dim, kept_dim);
  std::vector<int> row_digits(n_sites, 0), col_digits(n_sites, 0);
  std::vector<int> kept_row(kept_sites.size(), 0), kept_col(kept_sites.size(), 0);
  std::vector<int> kept_dims(kept_sites.size());
  for (std::size_t i = 0; i < kept_sites.size(); ++i) kept_dims[i] = local_dims[kept_sites[i]];
  std::vector<int> traced_digits(traced_list.size(), 0);
  std::vector<int> traced_dims(traced_list.size());
  for (std::size_t i = 0; i < traced_list.size(); ++i) traced_dims[i] = local_dims[traced_list[i]];

  for (Eigen::Index a = 0; a < kept_dim; ++a) {
    decode_index(a, kept_dims, kept_row);
    for (Eigen::Index b = 0; b < kept_dim; ++b) {
      decode_index(b, kept_dims, kept_col);
      std::complex<double> acc = 0.0;
      for (Eigen::Index t = 0; t < traced_dim; ++t) {
        decode_index(t, traced_dims, traced_digits);
        for (std::size_t i = 0; i < kept_sites.size(); ++i) {
          row_digits[kept_sites[i]] = kept_row[i];
          col_digits[kept_sites[i]] = kept_col[i];
        }
        for (std::size_t i = 0; i < traced_list.size(); ++i) {
          row_digits[traced_list[i]] = traced_digits[i];
          col_digits[traced_list[i]] = traced_digits[i];
        }
        acc += m(encode_index(row_digits, local_dims), encode_index(col_digits, local_dims));
      }
      out(a, b) = acc;
    }
  }
  return out;
}

}  // namespace udtomo
