#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qex/fixtures.hpp"
#include "qex/oracle.hpp"
#include "qex/poly_solver.hpp"
#include "test_support.hpp"

using namespace qex;

namespace {

ConstraintSystem system_for(const HermitianOperator& op, const PurityConstraints& constants,
                            const std::vector<int>& zeros = {}) {
  const NullSpaceParametrization param =
      rank_and_nullspace(build_commutant(op, structure_tensor(op.d)));
  return build_constraint_system(param, zeros, constants);
}

}  // namespace

TEST_CASE("count_bound is the factorial") {
  CHECK(count_bound(2) == 2);
  CHECK(count_bound(3) == 6);
  CHECK(count_bound(4) == 24);
  CHECK_THROWS_AS(count_bound(1), ValidationError);
}

TEST_CASE("qubit system solves to the two closed-form points") {
  HermitianOperator op;
  op.d = 2;
  op.h0 = 0.7;
  op.h = RVector::Zero(3);
  op.h << 0.3, -0.4, 1.2;
  const double h_norm = op.h.norm();

  SECTION("pure") {
    const ConstraintSystem sys = system_for(op, pure_constraints(2));
    REQUIRE(sys.arity() == 1);
    const SolutionSet set = solve(sys, 0);
    REQUIRE(set.count == 2);
    // lambda_3 = +- h3/h, canonical (lexicographic) order.
    CHECK(set.solutions[0](0) == Catch::Approx(-op.h(2) / h_norm).margin(1e-10));
    CHECK(set.solutions[1](0) == Catch::Approx(op.h(2) / h_norm).margin(1e-10));
  }
  SECTION("mixed") {
    const double c2 = 0.2;
    RVector c(1);
    c << c2;
    const ConstraintSystem sys = system_for(op, make_purity_constraints(2, c));
    const SolutionSet set = solve(sys, 0);
    REQUIRE(set.count == 2);
    const double delta = std::sqrt(1 - 4 * c2);
    CHECK(set.solutions[1](0) == Catch::Approx(delta * op.h(2) / h_norm).margin(1e-10));
  }
}

TEST_CASE("qutrit exchange operator: pure and mixed solution counts") {
  const HermitianOperator op = decompose(fixtures::qutrit_bec(1.0, 1.0));

  SECTION("pure constraints give exactly three solutions") {
    const ConstraintSystem sys = system_for(op, pure_constraints(3));
    REQUIRE(sys.arity() == 2);
    const SolutionSet set = solve(sys, 0);
    CHECK(set.count == 3);
    // One of them is the full Bloch vector (0,-1,0,0,0,0,1/2,-1/(2 sqrt 3)).
    RVector expected(8);
    expected << 0, -1, 0, 0, 0, 0, 0.5, -0.5 / std::sqrt(3.0);
    bool found = false;
    for (const RVector& x : set.solutions) {
      if (inf_norm(RVector(sys.bloch(x) - expected)) < 1e-9) found = true;
    }
    CHECK(found);
  }
  SECTION("interior mixed constraints give exactly six solutions") {
    RVector c(2);
    c << 29.0 / 100.0, 1.0 / 50.0;
    const ConstraintSystem sys = system_for(op, make_purity_constraints(3, c));
    const SolutionSet set = solve(sys, 0);
    CHECK(set.count == 6);
    for (const RVector& x : set.solutions)
      CHECK(inf_norm(sys.residual(x)) < tol::solution);
  }
}

TEST_CASE("solutions satisfy positivity, commutation, and the requested constants") {
  std::mt19937 rng(37);
  for (int d = 2; d <= 4; ++d) {
    const CMatrix m = testing::random_hermitian(d, rng);
    const HermitianOperator op = decompose(m);
    RVector gamma(d);
    double sum = 0;
    for (int i = 0; i < d; ++i) {
      gamma(i) = 0.2 + i;  // distinct, positive
      sum += gamma(i);
    }
    gamma /= sum;
    // Elementary symmetric functions of gamma as the requested constants.
    std::vector<double> e(static_cast<std::size_t>(d) + 1, 0.0);
    e[0] = 1.0;
    for (int i = 0; i < d; ++i)
      for (int k = std::min(i + 1, d); k >= 1; --k)
        e[static_cast<std::size_t>(k)] += gamma(i) * e[static_cast<std::size_t>(k - 1)];
    RVector c(d - 1);
    for (int k = 2; k <= d; ++k) c(k - 2) = e[static_cast<std::size_t>(k)];

    const ConstraintSystem sys = system_for(op, make_purity_constraints(d, c));
    const SolutionSet set = solve(sys, 0);
    CHECK(set.count <= count_bound(d));
    CHECK(set.count >= 2);
    for (const RVector& x : set.solutions) {
      const RVector lambda = sys.bloch(x);
      const CMatrix rho = bloch_to_density(d, lambda);
      CHECK(is_positive_semidefinite_within(rho, tol::psd));
      CHECK(inf_norm(CMatrix(m * rho - rho * m)) < 1e-9 * std::max(1.0, inf_norm(m)));
      const RVector achieved = newton_girard_coeffs(power_sums(rho, d));
      CHECK(inf_norm(RVector(achieved - c)) < 1e-9);
    }
  }
}

TEST_CASE("pure solves match oracle eigenvalues on random operators") {
  std::mt19937 rng(41);
  for (int d = 2; d <= 4; ++d) {
    int solved = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const CMatrix m = testing::random_hermitian(d, rng);
      const OracleSpectrum oracle = eigen_oracle(m);
      bool distinct = true;
      for (int i = 0; i + 1 < d; ++i)
        if (oracle.eigenvalues(i) - oracle.eigenvalues(i + 1) < 1e-4) distinct = false;
      if (!distinct) continue;
      const HermitianOperator op = decompose(m);
      const ConstraintSystem sys = system_for(op, pure_constraints(d));
      const SolutionSet set = solve(sys, 0);
      REQUIRE(set.count == d);
      std::vector<double> means;
      for (const RVector& x : set.solutions)
        means.push_back(op.h0 / d + 0.5 * op.h.dot(sys.bloch(x)));
      std::sort(means.begin(), means.end(), std::greater<>());
      for (int i = 0; i < d; ++i)
        CHECK(means[static_cast<std::size_t>(i)] ==
              Catch::Approx(oracle.eigenvalues(i)).margin(1e-9));
      ++solved;
    }
    CHECK(solved > 150);
  }
}

TEST_CASE("solver output is deterministic for a fixed seed") {
  const HermitianOperator op = decompose(fixtures::qutrit_bec(0.8, -1.3));
  RVector c(2);
  c << 0.2, 0.01;
  const ConstraintSystem sys = system_for(op, make_purity_constraints(3, c));
  const SolutionSet first = solve(sys, 7);
  const SolutionSet second = solve(sys, 7);
  REQUIRE(first.count == second.count);
  for (int i = 0; i < first.count; ++i) {
    // Bitwise identity, not approximate equality.
    for (int j = 0; j < first.solutions[static_cast<std::size_t>(i)].size(); ++j)
      CHECK(first.solutions[static_cast<std::size_t>(i)](j) ==
            second.solutions[static_cast<std::size_t>(i)](j));
  }
}

TEST_CASE("early stop returns the same leading solutions") {
  const HermitianOperator op = decompose(fixtures::qutrit_bec(1.0, 0.5));
  const ConstraintSystem sys = system_for(op, pure_constraints(3));
  const SolutionSet full = solve(sys, 0);
  const SolutionSet capped = solve(sys, 0, 3);
  CHECK(capped.count == full.count);
}

TEST_CASE("inadmissible constants are rejected at system construction") {
  const HermitianOperator op = decompose(fixtures::qutrit_bec(1.0, 1.0));
  RVector c(2);
  c << 0.05, 0.03;
  const PurityConstraints constants = make_purity_constraints(3, c);
  const NullSpaceParametrization param =
      rank_and_nullspace(build_commutant(op, structure_tensor(3)));
  CHECK_THROWS_AS(build_constraint_system(param, {}, constants), ValidationError);
}

TEST_CASE("wrong surplus count is rejected") {
  const HermitianOperator op = decompose(fixtures::qutrit_degenerate());
  const NullSpaceParametrization param =
      rank_and_nullspace(build_commutant(op, structure_tensor(3)));
  REQUIRE(param.n() == 4);
  CHECK_THROWS_AS(build_constraint_system(param, {}, pure_constraints(3)), ValidationError);
  CHECK_THROWS_AS(build_constraint_system(param, {4}, pure_constraints(3)), ValidationError);
  CHECK_NOTHROW(build_constraint_system(param, {4, 5}, pure_constraints(3)));
  // Zeroing an index that is not free is caught.
  CHECK_THROWS_AS(build_constraint_system(param, {0, 1}, pure_constraints(3)), ValidationError);
}
