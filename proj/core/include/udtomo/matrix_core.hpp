#ifndef UDTOMO_MATRIX_CORE_HPP
#define UDTOMO_MATRIX_CORE_HPP

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "udtomo/errors.hpp"

namespace udtomo {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Eigenpairs of a Hermitian matrix, eigenvalues sorted in descending order.
/// Columns of `eigenvectors` are the unit-norm eigenvectors in matching order.
/// `rank` counts eigenvalues above 1e-9 * max(1, lambda_max).
struct SpectralDecomposition {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;
  int rank = 0;
};

bool is_hermitian(const ComplexMatrix& m, double tol = 1e-10);

/// Tr(a b). Both operands must be square and of equal dimension.
std::complex<double> trace_inner(const ComplexMatrix& a, const ComplexMatrix& b);

SpectralDecomposition spectral(const ComplexMatrix& h);

double min_eigenvalue(const ComplexMatrix& h);

/// Reduced matrix after tracing out `traced_sites` of a tensor-product space
/// with the given local dimensions. Site 0 is the leftmost tensor factor
/// (most significant digit of a computational-basis index).
ComplexMatrix partial_trace(const ComplexMatrix& m,
                            const std::vector<int>& local_dims,
                            const std::vector<int>& traced_sites);

}  // namespace udtomo

#endif
