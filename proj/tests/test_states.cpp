#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <random>

#include "udtomo/frameworks.hpp"
#include "udtomo/states.hpp"
#include "fd_check.hpp"
#include "test_util.hpp"

using namespace udtomo;
using udtomo::testing::random_params;

TEST_CASE("PureState enforces the norm invariant") {
  ComplexVector v(2);
  v << 1.0, 1.0;
  CHECK_THROWS_AS(PureState{v}, NormError);
  const PureState s = PureState::normalized(v);
  CHECK(std::abs(s.amplitudes().norm() - 1.0) <= 1e-15);
  CHECK_THROWS_AS(PureState::normalized(ComplexVector::Zero(3)), NormError);
}

TEST_CASE("ensemble_density basics") {
  EnsembleParams one;
  one.V = ComplexMatrix::Zero(3, 1);
  one.V(0, 0) = 1.0;
  one.q = RealVector::Ones(1);
  ComplexMatrix rho = ensemble_density(one);
  CHECK(std::abs(rho(0, 0).real() - 1.0) <= 1e-15);
  CHECK(rho.cwiseAbs().sum() == doctest::Approx(1.0));

  EnsembleParams two;
  two.V = ComplexMatrix::Zero(3, 2);
  two.V(0, 0) = 1.0;
  two.V(1, 1) = 1.0;
  two.q = RealVector::Ones(2);
  rho = ensemble_density(two);
  CHECK(std::abs(rho(0, 0).real() - 0.5) <= 1e-15);
  CHECK(std::abs(rho(1, 1).real() - 0.5) <= 1e-15);
  CHECK(std::abs(rho(2, 2).real()) <= 1e-15);

  // Scaling a column or q changes nothing.
  EnsembleParams scaled = two;
  scaled.V.col(0) *= 5.0;
  scaled.q *= -3.0;
  CHECK((ensemble_density(scaled) - rho).cwiseAbs().maxCoeff() <= 1e-12);

  EnsembleParams degenerate = two;
  degenerate.V.col(1).setZero();
  CHECK_THROWS_AS(ensemble_density(degenerate), DegenerateParamsError);
  degenerate = two;
  degenerate.q.setZero();
  CHECK_THROWS_AS(ensemble_density(degenerate), DegenerateParamsError);
}

TEST_CASE("evaluate is exact at the target itself") {
  const auto a8 = gell_mann_framework(GellMannVariant::A8);
  std::mt19937_64 eng(2);
  const PureState target(udtomo::testing::random_state_vector(3, eng));
  EnsembleParams params;
  params.V = target.amplitudes();
  params.q = RealVector::Ones(1);
  const ObjectiveEval eval = evaluate(params, target, a8);
  CHECK(eval.fidelity == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eval.constraint.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("evaluate reproduces the GHZ phase-flip optimum") {
  const auto p4 = pauli_2local_framework(4);
  const PureState target = ghz_state(std::numbers::pi / 4.0);
  const auto omega = symmetric_basis();
  EnsembleParams params;
  params.V = (omega[0].amplitudes() - omega[4].amplitudes()) / std::sqrt(2.0);
  params.q = RealVector::Ones(1);
  const ObjectiveEval eval = evaluate(params, target, p4);
  CHECK(eval.fidelity <= 1e-12);
  CHECK(eval.constraint.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("gauge invariance of fidelity and constraints") {
  const auto a7 = gell_mann_framework(GellMannVariant::A7);
  std::mt19937_64 eng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const PureState target(udtomo::testing::random_state_vector(3, eng));
    const EnsembleParams params = random_params(3, 2, eng);
    const ObjectiveEval base = evaluate(params, target, a7);

    EnsembleParams gauged = params;
    gauged.V.col(0) *= std::complex<double>(0.3, -1.7);
    gauged.q *= -2.5;
    const ObjectiveEval other = evaluate(gauged, target, a7);
    CHECK(std::abs(base.fidelity - other.fidelity) <= 1e-12);
    CHECK((base.constraint - other.constraint).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("analytic gradients match central differences") {
  std::mt19937_64 eng(41);
  const auto a6 = gell_mann_framework(GellMannVariant::A6);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 6; ++trial) {
    const int r = 1 + trial % 3;
    const PureState target(udtomo::testing::random_state_vector(3, eng));
    const EnsembleParams params = random_params(3, r, eng);
    RealVector lambda(a6.size());
    for (int j = 0; j < a6.size(); ++j) lambda(j) = normal(eng);
    const auto report = udtomo::testing::fd_check(params, target, a6, lambda, 7.5, 0.8, 1.3);
    CHECK(report.max_err_fidelity < 1e-6);
    CHECK(report.max_err_constraint < 1e-6);
    CHECK(report.max_err_augmented < 1e-6);
  }
}

TEST_CASE("pack/unpack round trip") {
  std::mt19937_64 eng(3);
  const EnsembleParams params = random_params(4, 3, eng);
  const EnsembleParams back = unpack_params(pack_params(params), 4, 3);
  CHECK((back.V - params.V).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.q - params.q).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(unpack_params(RealVector::Zero(5), 4, 3), DimensionError);
}

TEST_CASE("symmetric basis states") {
  const auto omega = symmetric_basis();
  CHECK(std::abs(omega[0].amplitudes()(0) - 1.0) <= 1e-15);

  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const auto overlap = omega[i].amplitudes().dot(omega[j].amplitudes());
      CHECK(std::abs(overlap - (i == j ? 1.0 : 0.0)) <= 1e-14);
    }
  }

  int weight2_entries = 0;
  for (int idx = 0; idx < 16; ++idx) {
    const auto amp = omega[2].amplitudes()(idx);
    if (std::popcount(static_cast<unsigned>(idx)) == 2) {
      CHECK(std::abs(amp - 1.0 / std::sqrt(6.0)) <= 1e-15);
      ++weight2_entries;
    } else {
      CHECK(std::abs(amp) == 0.0);
    }
  }
  CHECK(weight2_entries == 6);
}

TEST_CASE("ghz_state endpoints") {
  const auto omega = symmetric_basis();
  CHECK((ghz_state(0.0).amplitudes() - omega[4].amplitudes()).norm() <= 1e-12);
  CHECK((ghz_state(std::numbers::pi / 2.0).amplitudes() - omega[0].amplitudes()).norm() <=
        1e-12);
  const ComplexVector mid = (omega[0].amplitudes() + omega[4].amplitudes()) / std::sqrt(2.0);
  CHECK((ghz_state(std::numbers::pi / 4.0).amplitudes() - mid).norm() <= 1e-12);
}

TEST_CASE("special symmetric state family") {
  const auto omega = symmetric_basis();
  CHECK((special_symmetric_state(1, 0, 0).amplitudes() - omega[0].amplitudes()).norm() <=
        1e-12);
  CHECK((special_symmetric_state(0, 1, 0).amplitudes() - omega[2].amplitudes()).norm() <=
        1e-12);
  const double c = 1.0 / (2.0 * std::sqrt(2.0));
  CHECK_NOTHROW(special_symmetric_state(c, std::sqrt(3.0) / 2.0, c));
  CHECK_THROWS_AS(special_symmetric_state(1.0, 0.5, 0.0), NormError);
}

TEST_CASE("closed-form 2-RDM values") {
  const ComplexMatrix corner = two_rdm_closed_form(1, 0, 0);
  CHECK(std::abs(corner(0, 0).real() - 1.0) <= 1e-15);
  CHECK(corner.cwiseAbs().sum() == doctest::Approx(1.0));

  const ComplexMatrix middle = two_rdm_closed_form(0, 1, 0);
  CHECK(middle(1, 1).real() == doctest::Approx(1.0 / 3.0));
  CHECK(middle(1, 2).real() == doctest::Approx(1.0 / 3.0));
  CHECK(middle(2, 1).real() == doctest::Approx(1.0 / 3.0));
  CHECK(middle(2, 2).real() == doctest::Approx(1.0 / 3.0));
  CHECK(middle(0, 0).real() == doctest::Approx(1.0 / 6.0));
  CHECK(middle(3, 3).real() == doctest::Approx(1.0 / 6.0));
  CHECK(std::abs(middle.trace().real() - 1.0) <= 1e-14);
  CHECK_THROWS_AS(two_rdm_closed_form(0.9, 0.9, 0.0), NormError);
}

TEST_CASE("closed-form 2-RDM equals the partial trace over every pair") {
  std::mt19937_64 eng(77);
  std::normal_distribution<double> normal;
  const std::vector<int> qubits{0, 1, 2, 3};
  for (int trial = 0; trial < 120; ++trial) {
    double c0 = normal(eng), c2 = normal(eng), c4 = normal(eng);
    const double norm = std::sqrt(c0 * c0 + c2 * c2 + c4 * c4);
    c0 /= norm;
    c2 /= norm;
    c4 /= norm;
    const ComplexMatrix expected = two_rdm_closed_form(c0, c2, c4);
    const ComplexMatrix full = special_symmetric_state(c0, c2, c4).projector();
    for (int a = 0; a < 4; ++a) {
      for (int b = a + 1; b < 4; ++b) {
        std::vector<int> traced;
        for (int s : qubits) {
          if (s != a && s != b) traced.push_back(s);
        }
        const ComplexMatrix reduced = partial_trace(full, {2, 2, 2, 2}, traced);
        CHECK((reduced - expected).cwiseAbs().maxCoeff() <= 1e-12);
      }
    }
  }
}

TEST_CASE("closed-form 2-RDM eigenvalues") {
  const auto at_omega2 = rdm_eigenvalues(0, 1, 0);
  CHECK(at_omega2[0] == 0.0);
  CHECK(at_omega2[1] == doctest::Approx(2.0 / 3.0));

  const auto at_omega0 = rdm_eigenvalues(1, 0, 0);
  CHECK(at_omega0[0] == 0.0);
  CHECK(at_omega0[1] == 0.0);
  CHECK(at_omega0[2] == doctest::Approx(1.0));
  CHECK(at_omega0[3] == doctest::Approx(0.0));

  std::mt19937_64 eng(13);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 300; ++trial) {
    double c0 = normal(eng), c2 = normal(eng), c4 = normal(eng);
    const double norm = std::sqrt(c0 * c0 + c2 * c2 + c4 * c4);
    c0 /= norm;
    c2 /= norm;
    c4 /= norm;
    const auto lambda = rdm_eigenvalues(c0, c2, c4);
    CHECK(std::abs(lambda[0] + lambda[1] + lambda[2] + lambda[3] - 1.0) <= 1e-12);

    auto sorted = lambda;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const SpectralDecomposition dec = spectral(two_rdm_closed_form(c0, c2, c4));
    for (int i = 0; i < 4; ++i) {
      CHECK(std::abs(sorted[i] - dec.eigenvalues(i)) <= 1e-10);
    }
  }
}

TEST_CASE("degeneracy classification") {
  using D = DegeneracyType;
  CHECK(degeneracy_class(0, 1, 0) == std::set<D>{D::II});
  CHECK(degeneracy_class(1, 0, 0).count(D::I) == 1);

  const double c = 1.0 / (2.0 * std::sqrt(2.0));
  const auto inter = degeneracy_class(c, std::sqrt(3.0) / 2.0, c);
  CHECK(inter.count(D::III) == 1);
  CHECK(inter.count(D::IV) == 1);

  // A generic point is non-degenerate.
  CHECK(degeneracy_class(0.6, 0.64, 0.48).empty());
  CHECK_THROWS_AS(degeneracy_class(0, 1, 0, -1.0), Error);
}

TEST_CASE("random pure states") {
  const PureState real_state = random_pure_state(3, true, 42);
  CHECK(std::abs(real_state.amplitudes().norm() - 1.0) <= 1e-12);
  for (int i = 0; i < 3; ++i) CHECK(real_state.amplitudes()(i).imag() == 0.0);

  const PureState complex_state = random_pure_state(5, false, 42);
  CHECK(std::abs(complex_state.amplitudes().norm() - 1.0) <= 1e-12);

  const PureState again = random_pure_state(3, true, 42);
  CHECK((again.amplitudes() - real_state.amplitudes()).norm() == 0.0);
  CHECK_THROWS_AS(random_pure_state(1, true, 0), DimensionError);
}

TEST_CASE("uniform sphere sampling has the right second moment") {
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto amps = random_pure_state(3, true, 1000 + i).amplitudes();
    sum += amps(0).real() * amps(0).real();
  }
  CHECK(std::abs(sum / n - 1.0 / 3.0) <= 0.01);
}

TEST_CASE("states solving the shared-2-RDM system have equal 2-RDMs") {
  const auto omega = symmetric_basis();
  const double c = 1.0 / (2.0 * std::sqrt(2.0));

  const ComplexVector psi = special_symmetric_state(c, std::sqrt(3.0) / 2.0, c).amplitudes();
  const ComplexVector phi =
      (omega[1].amplitudes() + omega[3].amplitudes()) / std::sqrt(2.0);
  const ComplexMatrix rdm_psi = partial_trace(psi * psi.adjoint(), {2, 2, 2, 2}, {2, 3});
  const ComplexMatrix rdm_phi = partial_trace(phi * phi.adjoint(), {2, 2, 2, 2}, {2, 3});
  CHECK((rdm_psi - rdm_phi).cwiseAbs().maxCoeff() <= 1e-10);

  for (double theta : {0.3, 0.9, 1.4, 2.2}) {
    const ComplexVector plus = ghz_state(theta).amplitudes();
    const ComplexVector minus = std::sin(theta) * omega[0].amplitudes() -
                                std::cos(theta) * omega[4].amplitudes();
    const ComplexMatrix rdm_plus = partial_trace(plus * plus.adjoint(), {2, 2, 2, 2}, {0, 2});
    const ComplexMatrix rdm_minus =
        partial_trace(minus * minus.adjoint(), {2, 2, 2, 2}, {0, 2});
    CHECK((rdm_plus - rdm_minus).cwiseAbs().maxCoeff() <= 1e-10);
  }
}
