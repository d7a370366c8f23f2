#include <catch2/catch_amalgamated.hpp>

#include "qex/su_algebra.hpp"
#include "test_support.hpp"

using namespace qex;

TEST_CASE("generators for d=2 are the Pauli matrices in order") {
  const GeneratorBasis& basis = generator_basis(2);
  REQUIRE(basis.matrices.size() == 3);
  CMatrix sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sy << cxd(0, 0), cxd(0, -1), cxd(0, 1), cxd(0, 0);
  sz << 1, 0, 0, -1;
  CHECK(inf_norm(CMatrix(basis.matrices[0] - sx)) == 0.0);
  CHECK(inf_norm(CMatrix(basis.matrices[1] - sy)) == 0.0);
  CHECK(inf_norm(CMatrix(basis.matrices[2] - sz)) == 0.0);
}

TEST_CASE("second diagonal generator for d=3 matches the closed form") {
  const GeneratorBasis& basis = generator_basis(3);
  CMatrix expected = CMatrix::Zero(3, 3);
  const double s = 1.0 / std::sqrt(3.0);
  expected(0, 0) = s;
  expected(1, 1) = s;
  expected(2, 2) = -2.0 * s;
  CHECK(inf_norm(CMatrix(basis.matrices[7] - expected)) < 1e-15);
}

TEST_CASE("generator basis is traceless, Hermitian, and trace-orthonormal") {
  for (int d = 2; d <= 6; ++d) {
    const GeneratorBasis& basis = generator_basis(d);
    REQUIRE(static_cast<int>(basis.matrices.size()) == d * d - 1);
    for (int j = 0; j < basis.dim(); ++j) {
      const CMatrix& gj = basis.matrices[static_cast<std::size_t>(j)];
      CHECK(std::abs(gj.trace()) < 1e-14);
      CHECK(hermiticity_defect(gj) < 1e-14);
      for (int k = 0; k < basis.dim(); ++k) {
        const cxd overlap = (gj * basis.matrices[static_cast<std::size_t>(k)]).trace();
        CHECK(std::abs(overlap - (j == k ? 2.0 : 0.0)) < 1e-13);
      }
    }
  }
}

TEST_CASE("generator dimension range is enforced") {
  CHECK_THROWS_AS(build_generators(1), ValidationError);
  CHECK_THROWS_AS(build_generators(7), ValidationError);
}

TEST_CASE("structure constants for d=2 reduce to the Levi-Civita symbol") {
  const StructureTensor& tensor = structure_tensor(2);
  CHECK(tensor.f(0, 1, 2) == 1.0);
  CHECK(tensor.f(1, 0, 2) == -1.0);
  CHECK(tensor.f(2, 0, 1) == 1.0);
  CHECK(tensor.d_canonical.empty());
}

TEST_CASE("stored antisymmetry is exact") {
  const StructureTensor& tensor = structure_tensor(4);
  for (const auto& [idx, value] : tensor.f_canonical) {
    (void)value;
    CHECK(tensor.f(idx[0], idx[1], idx[2]) + tensor.f(idx[1], idx[0], idx[2]) == 0.0);
    CHECK(tensor.f(idx[0], idx[1], idx[2]) + tensor.f(idx[0], idx[2], idx[1]) == 0.0);
  }
}

TEST_CASE("multiplication law reconstructs generator products") {
  for (int d = 2; d <= 6; ++d) {
    const GeneratorBasis& basis = generator_basis(d);
    const StructureTensor& tensor = structure_tensor(d);
    const int n = basis.dim();
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        CMatrix rhs = (j == k ? 2.0 / d : 0.0) * CMatrix::Identity(d, d);
        for (int q = 0; q < n; ++q) {
          const double dv = tensor.dsym(j, k, q);
          const double fv = tensor.f(j, k, q);
          if (dv != 0.0 || fv != 0.0)
            rhs += cxd(dv, fv) * basis.matrices[static_cast<std::size_t>(q)];
        }
        const CMatrix lhs = basis.matrices[static_cast<std::size_t>(j)] *
                            basis.matrices[static_cast<std::size_t>(k)];
        worst = std::max(worst, inf_norm(CMatrix(lhs - rhs)));
      }
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("qutrit exchange Hamiltonian decomposes to the expected Bloch vector") {
  const double b = 1.7, c = -0.6;
  CMatrix h(3, 3);
  const double s = c / std::sqrt(2.0);
  h << b, s, 0, s, 0, s, 0, s, b;
  const HermitianOperator op = decompose(h);
  CHECK(op.h0 == Catch::Approx(2 * b).margin(1e-14));
  RVector expected(8);
  // The last component is -b/sqrt(3): forced by Tr(H g_8) with
  // g_8 = diag(1,1,-2)/sqrt(3).
  expected << std::sqrt(2.0) * c, 0, std::sqrt(2.0) * c, 0, 0, 0, b, -b / std::sqrt(3.0);
  CHECK(inf_norm(RVector(op.h - expected)) < 1e-14);
}

TEST_CASE("quartit fixture decomposes to the expected Bloch vector") {
  const double a = 1.3, b = 0.4, delta = 0.9;
  CMatrix h(4, 4);
  h << cxd(a, 0), cxd(delta, 0), cxd(b, a), cxd(b, a),
       cxd(delta, 0), cxd(a, 0), cxd(-b, a), cxd(b, -a),
       cxd(b, -a), cxd(-b, -a), cxd(b, 0), cxd(0, 0),
       cxd(b, -a), cxd(b, a), cxd(0, 0), cxd(b, 0);
  const HermitianOperator op = decompose(h);
  CHECK(op.h0 == Catch::Approx(2 * (a + b)).margin(1e-14));
  RVector expected(15);
  expected << delta, b, b, -b, b, 0, 0, -a, -a, -a, a, 0, 0,
      (std::sqrt(3.0) / 3.0) * (a - b), std::sqrt(1.0 / 6.0) * (a - b);
  expected *= 2.0;
  CHECK(inf_norm(RVector(op.h - expected)) < 1e-13);
}

TEST_CASE("identity decomposes to h0=d with a vanishing Bloch vector") {
  for (int d = 2; d <= 6; ++d) {
    const HermitianOperator op = decompose(CMatrix::Identity(d, d));
    CHECK(op.h0 == Catch::Approx(static_cast<double>(d)).margin(1e-14));
    CHECK(inf_norm(op.h) < 1e-14);
  }
}

TEST_CASE("decompose rejects non-Hermitian input and symmetrizes mild noise") {
  CMatrix bad(2, 2);
  bad << 1, cxd(0, 1), cxd(0, 1), 1;  // both off-diagonals +i
  CHECK_THROWS_AS(decompose(bad), ValidationError);

  std::mt19937 rng(7);
  CMatrix noisy = testing::random_hermitian(3, rng);
  noisy(0, 1) += cxd(0, 1e-12);
  const HermitianOperator op = decompose(noisy);
  const CMatrix back = reconstruct(op);
  CHECK(hermiticity_defect(back) < 1e-15);
}

TEST_CASE("decompose and reconstruct are mutually inverse") {
  std::mt19937 rng(11);
  for (int d = 2; d <= 6; ++d) {
    for (int trial = 0; trial < 10; ++trial) {
      const CMatrix m = testing::random_hermitian(d, rng);
      const CMatrix back = reconstruct(decompose(m));
      CHECK(inf_norm(CMatrix(back - m)) < 1e-12 * std::max(1.0, inf_norm(m)));
    }
  }
}

TEST_CASE("simple reconstructions") {
  HermitianOperator identity{3, 3.0, RVector::Zero(8)};
  CHECK(inf_norm(CMatrix(reconstruct(identity) - CMatrix::Identity(3, 3))) < 1e-15);

  HermitianOperator sigma3{2, 0.0, RVector::Zero(3)};
  sigma3.h(2) = 2.0;
  CMatrix expected(2, 2);
  expected << 1, 0, 0, -1;
  CHECK(inf_norm(CMatrix(reconstruct(sigma3) - expected)) < 1e-15);
}

TEST_CASE("adjoint rotation of the identity is the identity") {
  const GeneratorBasis& basis = generator_basis(3);
  const RMatrix rot = adjoint_rotation(CMatrix::Identity(3, 3), basis);
  CHECK(inf_norm(RMatrix(rot - RMatrix::Identity(8, 8))) < 1e-13);
}

TEST_CASE("adjoint rotation is orthogonal and transports Bloch vectors") {
  std::mt19937 rng(23);
  for (int d = 2; d <= 5; ++d) {
    const GeneratorBasis& basis = generator_basis(d);
    for (int trial = 0; trial < 5; ++trial) {
      const CMatrix u = testing::random_unitary(d, rng);
      const RMatrix rot = adjoint_rotation(u, basis);
      CHECK(inf_norm(RMatrix(rot * rot.transpose() - RMatrix::Identity(rot.rows(), rot.cols()))) < 1e-10);

      const CMatrix m = testing::random_hermitian(d, rng);
      const HermitianOperator before = decompose(m);
      const HermitianOperator after = decompose(CMatrix(u * m * u.adjoint()));
      CHECK(inf_norm(RVector(after.h - rot * before.h)) < 1e-10 * std::max(1.0, before.h.norm()));
      CHECK(after.h.norm() == Catch::Approx(before.h.norm()).margin(1e-10));
    }
  }
}

TEST_CASE("adjoint rotation near the identity has determinant +1") {
  std::mt19937 rng(31);
  const GeneratorBasis& basis = generator_basis(3);
  const CMatrix g = testing::random_complex(3, rng);
  const CMatrix anti = 0.05 * (g - g.adjoint());
  // exp(A) via scaled Taylor series; A is tiny.
  CMatrix u = CMatrix::Identity(3, 3);
  CMatrix term = CMatrix::Identity(3, 3);
  for (int k = 1; k <= 20; ++k) {
    term = CMatrix(term * anti) / static_cast<double>(k);
    u += term;
  }
  const RMatrix rot = adjoint_rotation(u, basis);
  CHECK(rot.determinant() == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("adjoint rotation rejects non-unitary input") {
  const GeneratorBasis& basis = generator_basis(2);
  CMatrix not_unitary(2, 2);
  not_unitary << 1, 1, 0, 1;
  CHECK_THROWS_AS(adjoint_rotation(not_unitary, basis), ValidationError);
}

TEST_CASE("Bloch vectors of states stay inside the ball bound") {
  std::mt19937 rng(41);
  for (int d = 2; d <= 5; ++d) {
    for (int trial = 0; trial < 20; ++trial) {
      const CMatrix rho = testing::random_density(d, rng);
      const HermitianOperator op = decompose(rho);
      CHECK(op.h.norm() <= bloch_ball_radius(d) + 1e-12);
      const CMatrix back = bloch_to_density(d, op.h);
      CHECK(std::abs(back.trace().real() - 1.0) < 1e-14);
      CHECK(inf_norm(CMatrix(back - rho)) < 1e-12);
    }
  }
}
