#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "qusd/separability.hpp"
#include "test_helpers.hpp"

using namespace qusd;

namespace {

double min_eig(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

// Two-state ensemble on the separability manifold: fix both moduli and a
// common phase, then solve the priors ratio from the condition.
ProtocolState condition_satisfying_two_state(double ap_mod, double am_mod, double phase) {
  const double zp = ap_mod * std::sqrt(1.0 - ap_mod * ap_mod);
  const double zm = am_mod * std::sqrt(1.0 - am_mod * am_mod);
  const double p_plus = zm / (zp + zm);
  const Complex unit(std::cos(phase), std::sin(phase));
  const Complex alpha_plus = ap_mod * unit;
  const Complex alpha_minus = am_mod * unit;
  return build_two_state(p_plus, 1.0 - p_plus, std::conj(alpha_plus) * alpha_minus, alpha_plus);
}

}  // namespace

TEST_CASE("ppt_test on Bell, product, and protocol states") {
  PptResult bell = ppt_test(testing::bell_phi_plus());
  CHECK_FALSE(bell.ppt);
  CHECK(bell.min_eigenvalue == doctest::Approx(-0.5).epsilon(1e-12));

  std::mt19937_64 gen(31);
  DensityMatrix a = testing::random_density(2, 1, gen);
  DensityMatrix b = testing::random_density(2, 1, gen);
  PptResult product = ppt_test(DensityMatrix(kron(a.mat(), b.mat()), 2, 2));
  CHECK(product.ppt);
  CHECK(product.min_eigenvalue >= -1e-10);

  // a complex overlap phase breaks the closed-form condition -> entangled
  const Complex alpha = 0.25 * Complex(std::cos(3.14159265358979323846 / 4.0),
                                       std::sin(3.14159265358979323846 / 4.0));
  ProtocolState phased = build_two_state(0.5, 0.5, alpha, Complex(0.5, 0.0));
  CHECK_FALSE(ppt_test(phased.rho).ppt);
}

TEST_CASE("two_state_condition") {
  ProtocolState optimal = build_two_state(0.5, 0.5, Complex(0.25, 0.0), Complex(0.5, 0.0));
  ConditionResult at_optimum = two_state_condition(optimal.ensemble);
  CHECK(at_optimum.holds);
  CHECK(at_optimum.residual <= 1e-14);

  const Complex alpha = 0.25 * Complex(std::cos(1.0), std::sin(1.0));
  ProtocolState phased = build_two_state(0.5, 0.5, alpha, Complex(0.5, 0.0));
  CHECK_FALSE(two_state_condition(phased.ensemble).holds);

  ProtocolState family = condition_satisfying_two_state(0.3, 0.6, 0.7);
  CHECK(two_state_condition(family.ensemble).holds);

  // move the prior off the solving ratio
  ProtocolState off = build_two_state(0.8, 0.2, family.ensemble.overlap(0, 1),
                                      family.ensemble.alphas[0]);
  CHECK_FALSE(two_state_condition(off.ensemble).holds);
}

TEST_CASE("d_state_condition") {
  std::mt19937_64 gen(32);
  CHECK(d_state_condition(testing::family_ensemble(3, 0.5)).holds);

  RealVector priors = RealVector::Constant(3, 1.0 / 3.0);
  ComplexVector alphas(3);
  alphas << Complex(0.5, 0.0), Complex(0.5, 0.0), Complex(0.7, 0.0);
  CHECK_FALSE(d_state_condition(make_ensemble(priors, alphas)).holds);

  for (int trial = 0; trial < 10; ++trial) {
    Ensemble satisfying = testing::satisfying_ensemble(2 + gen() % 4, gen);
    ConditionResult result = d_state_condition(satisfying);
    CHECK(result.holds);
    CHECK(result.residual <= 1e-14);
  }
}

TEST_CASE("for d=2 the general condition matches the two-state one") {
  std::mt19937_64 gen(33);
  for (int trial = 0; trial < 10; ++trial) {
    Ensemble e = trial % 2 == 0 ? testing::satisfying_ensemble(2, gen)
                                : testing::violating_ensemble(2, gen);
    ConditionResult general = d_state_condition(e);
    ConditionResult two = two_state_condition(e);
    CHECK(general.holds == two.holds);
    CHECK(general.residual == doctest::Approx(two.residual * std::sqrt(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("minor_matrix agrees with the partial transpose submatrix") {
  std::mt19937_64 gen(34);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(gen() % 4);
    Ensemble e = testing::violating_ensemble(d, gen);
    ProtocolState state = build_d_state(e.priors, e.alphas);
    ComplexMatrix pt = partial_transpose(state.rho, Subsystem::system);
    const Eigen::Index i = 0;
    const Eigen::Index j = d - 1;
    ComplexMatrix assembled = minor_matrix(e, i, j);
    const Eigen::Index rows[4] = {2 * i, 2 * i + 1, 2 * j, 2 * j + 1};
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        CHECK(std::abs(assembled(r, c) - pt(rows[r], rows[c])) <= 1e-13);
  }
}

TEST_CASE("minor determinant: numeric vs closed form") {
  std::mt19937_64 gen(35);
  SUBCASE("generic ensembles agree to relative 1e-10") {
    for (int trial = 0; trial < 25; ++trial) {
      const Eigen::Index d = 2 + static_cast<Eigen::Index>(gen() % 4);
      Ensemble e = testing::violating_ensemble(d, gen);
      const double numeric = minor_matrix(e, 0, d - 1).determinant().real();
      const double closed = minor_determinant_closed_form(e, 0, d - 1);
      CHECK(closed < 0.0);
      CHECK(std::abs(numeric - closed) <= 1e-10 * std::max(1.0, std::abs(closed)));
    }
  }
  SUBCASE("condition-satisfying ensembles vanish") {
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::Index d = 2 + static_cast<Eigen::Index>(gen() % 4);
      Ensemble e = testing::satisfying_ensemble(d, gen);
      CHECK(std::abs(minor_determinant_closed_form(e, 0, d - 1)) <= 1e-12);
      CHECK(std::abs(minor_matrix(e, 0, d - 1).determinant()) <= 1e-12);
    }
  }
  SUBCASE("index validation") {
    Ensemble e = testing::family_ensemble(3, 0.5);
    CHECK_THROWS_AS(minor_matrix(e, 1, 1), IndexError);
    CHECK_THROWS_AS(minor_matrix(e, 0, 3), IndexError);
    CHECK_THROWS_AS(minor_determinant_closed_form(e, 2, 1), IndexError);
  }
}

TEST_CASE("build_decomposition reconstructs the protocol state") {
  SUBCASE("optimal two-state parameters") {
    ProtocolState state = build_two_state(0.5, 0.5, Complex(0.25, 0.0), Complex(0.5, 0.0));
    SeparableDecomposition decomposition = build_decomposition(state);
    CHECK(decomposition.terms.size() == 2);
    CHECK(max_abs(decomposition.reassemble() - state.rho.mat()) <= 1e-10);
    for (const auto& term : decomposition.terms) {
      CHECK(min_eig(term.system_op) >= -1e-10);
      CHECK(min_eig(term.ancilla_op) >= -1e-10);
    }
  }

  SUBCASE("symmetric d=3 ensemble") {
    Ensemble e = testing::family_ensemble(3, 0.5);
    ProtocolState state = build_d_state(e.priors, e.alphas);
    SeparableDecomposition decomposition = build_decomposition(state);
    CHECK(decomposition.terms.size() == 2);
    CHECK(max_abs(decomposition.reassemble() - state.rho.mat()) <= 1e-10);
  }

  SUBCASE("violating ensemble is refused") {
    std::mt19937_64 gen(36);
    Ensemble e = testing::violating_ensemble(3, gen);
    ProtocolState state = build_d_state(e.priors, e.alphas);
    CHECK_THROWS_AS(build_decomposition(state), ConditionNotMetError);
  }

  SUBCASE("normalize keeps the reassembly and makes factors unit trace") {
    ProtocolState state = condition_satisfying_two_state(0.4, 0.55, 0.0);
    SeparableDecomposition decomposition = build_decomposition(state);
    ComplexMatrix before = decomposition.reassemble();
    decomposition.normalize();
    CHECK(decomposition.normalized);
    for (const auto& term : decomposition.terms) {
      CHECK(term.system_op.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(term.ancilla_op.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(term.weight >= 0.0);
    }
    CHECK(max_abs(decomposition.reassemble() - before) <= 1e-12);
  }
}

TEST_CASE("reassembled decompositions are always PPT") {
  std::mt19937_64 gen(37);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(gen() % 3);
    Ensemble e = testing::satisfying_ensemble(d, gen);
    ProtocolState state = build_d_state(e.priors, e.alphas);
    SeparableDecomposition decomposition = build_decomposition(state);
    DensityMatrix reassembled(decomposition.reassemble(), d, 2);
    CHECK(ppt_test(reassembled).ppt);
  }
}

TEST_CASE("separability iff closed-form condition on a parameter grid") {
  std::mt19937_64 gen(38);
  for (int trial = 0; trial < 60; ++trial) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(trial % 3);
    const bool expect = trial % 2 == 0;
    Ensemble e = expect ? testing::satisfying_ensemble(d, gen)
                        : testing::violating_ensemble(d, gen);
    ProtocolState state = build_d_state(e.priors, e.alphas);
    CHECK(ppt_test(state.rho).ppt == expect);
    CHECK(d_state_condition(e).holds == expect);
  }
}

TEST_CASE("analyze_separability composes the verdict") {
  ProtocolState state = build_two_state(0.5, 0.5, Complex(0.25, 0.0), Complex(0.5, 0.0));
  SeparabilityVerdict verdict = analyze_separability(state);
  CHECK(verdict.ppt);
  CHECK(verdict.closed_form_condition);
  CHECK(verdict.consistent);
  REQUIRE(verdict.decomposition.has_value());
  CHECK(verdict.decomposition->terms.size() == 2);

  const Complex alpha = 0.25 * Complex(std::cos(1.0), std::sin(1.0));
  SeparabilityVerdict entangled =
      analyze_separability(build_two_state(0.5, 0.5, alpha, Complex(0.5, 0.0)));
  CHECK_FALSE(entangled.ppt);
  CHECK_FALSE(entangled.closed_form_condition);
  CHECK(entangled.consistent);
  CHECK_FALSE(entangled.decomposition.has_value());
}
