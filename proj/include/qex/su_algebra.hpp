#ifndef QEX_SU_ALGEBRA_HPP
#define QEX_SU_ALGEBRA_HPP

#include <algorithm>
#include <array>
#include <map>
#include <sstream>
#include <vector>

#include "qex/common.hpp"

namespace qex {

inline constexpr int kMinDim = 2;
inline constexpr int kMaxDim = 6;

// Traceless Hermitian generator set for su(d), ordered as: symmetric pair
// matrices (pairs (j,k), j<k, lexicographic), antisymmetric pair matrices
// (same pair order), then the d-1 diagonal matrices. Normalized so that
// Tr(g_j g_k) = 2 delta_jk.
struct GeneratorBasis {
  int d = 0;
  std::vector<CMatrix> matrices;

  int dim() const { return d * d - 1; }
  // First index of the diagonal block.
  int diagonal_start() const { return d * (d - 1); }
  bool is_diagonal_index(int k) const { return k >= diagonal_start(); }
};

// Antisymmetric (f) and symmetric (dsym) structure constants, stored on
// canonical index triples. Accessors reconstruct any index order exactly,
// so f(j,k,q) == -f(k,j,q) holds bitwise.
struct StructureTensor {
  int d = 0;
  // f: key is the sorted triple, value belongs to the even permutation of it.
  std::map<std::array<int, 3>, double> f_canonical;
  // dsym: key is the sorted triple (repeats allowed).
  std::map<std::array<int, 3>, double> d_canonical;

  double f(int j, int k, int q) const {
    if (j == k || j == q || k == q) return 0.0;
    std::array<int, 3> idx{j, k, q};
    int sign = 1;
    // Sort by explicit swaps to track the permutation parity.
    if (idx[0] > idx[1]) { std::swap(idx[0], idx[1]); sign = -sign; }
    if (idx[1] > idx[2]) { std::swap(idx[1], idx[2]); sign = -sign; }
    if (idx[0] > idx[1]) { std::swap(idx[0], idx[1]); sign = -sign; }
    auto it = f_canonical.find(idx);
    if (it == f_canonical.end()) return 0.0;
    return sign > 0 ? it->second : -it->second;
  }

  double dsym(int j, int k, int q) const {
    std::array<int, 3> idx{j, k, q};
    std::sort(idx.begin(), idx.end());
    auto it = d_canonical.find(idx);
    return it == d_canonical.end() ? 0.0 : it->second;
  }

  // Visits every nonzero f entry in every index order, exactly once each.
  template <typename Fn>
  void for_each_f(Fn&& fn) const {
    static constexpr int perms[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1},
                                        {1, 0, 2}, {0, 2, 1}, {2, 1, 0}};
    static constexpr int signs[6] = {1, 1, 1, -1, -1, -1};
    for (const auto& [idx, value] : f_canonical) {
      for (int p = 0; p < 6; ++p) {
        fn(idx[perms[p][0]], idx[perms[p][1]], idx[perms[p][2]],
           signs[p] > 0 ? value : -value);
      }
    }
  }
};

// Bloch form of a Hermitian operator: H = (h0/d) I + (1/2) sum_k h_k g_k.
struct HermitianOperator {
  int d = 0;
  double h0 = 0.0;
  RVector h;
};

enum class PurityClass { pure, mixed, unconstrained };

// Bloch form of a state candidate: rho = I/d + (1/2) sum_k lambda_k g_k.
struct BlochVector {
  int d = 0;
  RVector lambda;
  PurityClass purity_class = PurityClass::unconstrained;
};

inline double bloch_ball_radius(int d) {
  return std::sqrt(2.0 * (d - 1) / d);
}

inline GeneratorBasis build_generators(int d) {
  if (d < kMinDim || d > kMaxDim) {
    std::ostringstream msg;
    msg << "build_generators: dimension " << d << " outside supported range ["
        << kMinDim << ", " << kMaxDim << "]";
    throw ValidationError(msg.str());
  }
  GeneratorBasis basis;
  basis.d = d;
  basis.matrices.reserve(static_cast<std::size_t>(d * d - 1));
  std::vector<std::pair<int, int>> pairs;
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) pairs.emplace_back(j, k);
  for (const auto& [j, k] : pairs) {
    CMatrix m = CMatrix::Zero(d, d);
    m(j, k) = 1.0;
    m(k, j) = 1.0;
    basis.matrices.push_back(std::move(m));
  }
  for (const auto& [j, k] : pairs) {
    CMatrix m = CMatrix::Zero(d, d);
    m(j, k) = cxd(0.0, -1.0);
    m(k, j) = cxd(0.0, 1.0);
    basis.matrices.push_back(std::move(m));
  }
  for (int l = 1; l < d; ++l) {
    CMatrix m = CMatrix::Zero(d, d);
    const double scale = std::sqrt(2.0 / (l * (l + 1.0)));
    for (int i = 0; i < l; ++i) m(i, i) = scale;
    m(l, l) = -l * scale;
    basis.matrices.push_back(std::move(m));
  }
  return basis;
}

inline StructureTensor build_structure_tensor(const GeneratorBasis& basis) {
  const int n = basis.dim();
  StructureTensor tensor;
  tensor.d = basis.d;
  constexpr double cutoff = 1e-13;
  constexpr double imag_budget = 1e-10;
  // Products first; every trace below reuses them.
  std::vector<CMatrix> prod(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      prod[static_cast<std::size_t>(j) * n + k] = basis.matrices[j] * basis.matrices[k];
  auto tr_with = [&](const CMatrix& m, int q) {
    return (m * basis.matrices[q]).trace();
  };
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      const CMatrix& jk = prod[static_cast<std::size_t>(j) * n + k];
      const CMatrix& kj = prod[static_cast<std::size_t>(k) * n + j];
      CMatrix comm = jk - kj;
      CMatrix anti = jk + kj;
      for (int q = k; q < n; ++q) {
        if (j < k && q > k) {
          // f on the strictly sorted triple (j,k,q). Tr([.,.]g) is purely
          // imaginary for a sound basis; Tr({.,.}g) purely real.
          cxd tf = tr_with(comm, q);
          if (std::abs(tf.real()) > imag_budget)
            throw ValidationError("build_structure_tensor: commutator trace has a real part; basis is broken");
          double fval = tf.imag() / 4.0;
          if (std::abs(fval) > cutoff)
            tensor.f_canonical[{j, k, q}] = fval;
        }
        cxd td = tr_with(anti, q);
        if (std::abs(td.imag()) > imag_budget)
          throw ValidationError("build_structure_tensor: anticommutator trace has an imaginary part; basis is broken");
        double dval = td.real() / 4.0;
        if (std::abs(dval) > cutoff)
          tensor.d_canonical[{j, k, q}] = dval;
      }
    }
  }
  return tensor;
}

// Basis and tensor caches. Built once for all supported dimensions; safe
// for unsynchronized concurrent readers.
inline const GeneratorBasis& generator_basis(int d) {
  static const std::array<GeneratorBasis, kMaxDim - kMinDim + 1> cache = [] {
    std::array<GeneratorBasis, kMaxDim - kMinDim + 1> out;
    for (int d2 = kMinDim; d2 <= kMaxDim; ++d2) out[d2 - kMinDim] = build_generators(d2);
    return out;
  }();
  if (d < kMinDim || d > kMaxDim)
    throw ValidationError("generator_basis: dimension outside supported range");
  return cache[d - kMinDim];
}

inline const StructureTensor& structure_tensor(int d) {
  static const std::array<StructureTensor, kMaxDim - kMinDim + 1> cache = [] {
    std::array<StructureTensor, kMaxDim - kMinDim + 1> out;
    for (int d2 = kMinDim; d2 <= kMaxDim; ++d2)
      out[d2 - kMinDim] = build_structure_tensor(generator_basis(d2));
    return out;
  }();
  if (d < kMinDim || d > kMaxDim)
    throw ValidationError("structure_tensor: dimension outside supported range");
  return cache[d - kMinDim];
}

inline double hermiticity_defect(const CMatrix& m, int* row = nullptr, int* col = nullptr) {
  double worst = 0.0;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      double dev = std::abs(m(i, j) - std::conj(m(j, i)));
      if (dev > worst) {
        worst = dev;
        if (row) *row = i;
        if (col) *col = j;
      }
    }
  }
  return worst;
}

inline HermitianOperator decompose(const CMatrix& m) {
  if (m.rows() != m.cols()) throw ValidationError("decompose: matrix is not square");
  const int d = static_cast<int>(m.rows());
  const GeneratorBasis& basis = generator_basis(d);
  int row = 0, col = 0;
  const double defect = hermiticity_defect(m, &row, &col);
  const double budget = tol::herm_rel * std::max(1.0, inf_norm(m));
  if (defect > budget) {
    std::ostringstream msg;
    msg << "decompose: input is not Hermitian; entry (" << row << ", " << col
        << ") deviates from its conjugate by " << defect;
    throw ValidationError(msg.str());
  }
  CMatrix sym = 0.5 * (m + m.adjoint());
  HermitianOperator op;
  op.d = d;
  op.h0 = sym.trace().real();
  op.h = RVector::Zero(basis.dim());
  for (int k = 0; k < basis.dim(); ++k)
    op.h(k) = (sym * basis.matrices[k]).trace().real();
  return op;
}

inline CMatrix reconstruct(const HermitianOperator& op) {
  const GeneratorBasis& basis = generator_basis(op.d);
  if (op.h.size() != basis.dim())
    throw ValidationError("reconstruct: coefficient vector length does not match dimension");
  CMatrix out = (op.h0 / op.d) * CMatrix::Identity(op.d, op.d);
  for (int k = 0; k < basis.dim(); ++k)
    out += 0.5 * op.h(k) * basis.matrices[k];
  return out;
}

inline CMatrix bloch_to_density(int d, const RVector& lambda) {
  const GeneratorBasis& basis = generator_basis(d);
  if (lambda.size() != basis.dim())
    throw ValidationError("bloch_to_density: vector length does not match dimension");
  CMatrix rho = CMatrix::Identity(d, d) / static_cast<double>(d);
  for (int k = 0; k < basis.dim(); ++k)
    rho += 0.5 * lambda(k) * basis.matrices[k];
  return rho;
}

inline CMatrix bloch_to_density(const BlochVector& bloch) {
  return bloch_to_density(bloch.d, bloch.lambda);
}

inline RMatrix adjoint_rotation(const CMatrix& u, const GeneratorBasis& basis) {
  if (u.rows() != basis.d || u.cols() != basis.d)
    throw ValidationError("adjoint_rotation: unitary size does not match basis dimension");
  const double unitarity = inf_norm(CMatrix(u * u.adjoint() - CMatrix::Identity(basis.d, basis.d)));
  if (unitarity > 1e-10)
    throw ValidationError("adjoint_rotation: input is not unitary (defect " + std::to_string(unitarity) + ")");
  const int n = basis.dim();
  RMatrix rot(n, n);
  CMatrix udag = u.adjoint();
  for (int j = 0; j < n; ++j) {
    CMatrix conj = u * basis.matrices[j] * udag;
    for (int k = 0; k < n; ++k)
      rot(k, j) = 0.5 * (basis.matrices[k] * conj).trace().real();
  }
  return rot;
}

}  // namespace qex

#endif  // QEX_SU_ALGEBRA_HPP
