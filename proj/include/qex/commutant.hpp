#ifndef QEX_COMMUTANT_HPP
#define QEX_COMMUTANT_HPP

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <numeric>
#include <sstream>
#include <vector>

#include "qex/common.hpp"
#include "qex/su_algebra.hpp"

namespace qex {

// Skew-symmetric matrix M_ij = sum_k f_ijk h_k whose kernel holds every
// Bloch vector commuting with the source operator.
struct CommutantMatrix {
  int d = 0;
  RMatrix M;
  HermitianOperator source;
};

// Affine description of the admissible Bloch vectors: lambda = offset + E x,
// with x running over the listed free components. offset is zero for a raw
// kernel; orthogonality constraints introduce one.
struct NullSpaceParametrization {
  int d = 0;
  int r = 0;                       // rank of M
  std::vector<int> free_indices;   // ascending, 0-based Bloch indices
  std::vector<int> bound_indices;  // ascending complement
  RMatrix map;                     // (d^2-1) x n
  RVector offset;                  // (d^2-1)
  bool near_degenerate_warning = false;

  int n() const { return static_cast<int>(free_indices.size()); }

  RVector assemble(const RVector& x) const { return offset + map * x; }

  // Linear functional giving one bound component in terms of the free ones.
  RVector expressing_map(int bound_index) const {
    return map.row(bound_index).transpose();
  }
};

struct OrbitInfo {
  int r = 0;
  std::vector<std::vector<int>> degeneracy_patterns;  // multiplicities, ascending
  bool is_nondegenerate = false;
};

inline CommutantMatrix build_commutant(const HermitianOperator& op, const StructureTensor& tensor) {
  if (op.d != tensor.d)
    throw ValidationError("build_commutant: operator and structure tensor dimensions differ");
  const int n = op.d * op.d - 1;
  if (op.h.size() != n)
    throw ValidationError("build_commutant: coefficient vector has wrong length");
  CommutantMatrix out;
  out.d = op.d;
  out.source = op;
  out.M = RMatrix::Zero(n, n);
  tensor.for_each_f([&](int i, int j, int k, double value) {
    out.M(i, j) += value * op.h(k);
  });
  return out;
}

// G_qp = 4 sum_j (sum_k f_qkj h_k)(sum_k f_pkj h_k), assembled through the
// intermediate W to stay faithful to the tangent-vector definition.
inline RMatrix gram_matrix(const HermitianOperator& op, const StructureTensor& tensor) {
  if (op.d != tensor.d)
    throw ValidationError("gram_matrix: operator and structure tensor dimensions differ");
  const int n = op.d * op.d - 1;
  RMatrix w = RMatrix::Zero(n, n);
  tensor.for_each_f([&](int q, int k, int j, double value) {
    w(q, j) += value * op.h(k);
  });
  return 4.0 * w * w.transpose();
}

namespace detail {

// Column order in which pivots are claimed: off-diagonal block ascending,
// then diagonal block ascending. Its complement realizes the free-variable
// preference (diagonal generators first, descending index).
inline std::vector<int> pivot_preference(int d) {
  std::vector<int> order(static_cast<std::size_t>(d * d - 1));
  std::iota(order.begin(), order.end(), 0);
  return order;
}

}  // namespace detail

inline NullSpaceParametrization rank_and_nullspace(const CommutantMatrix& commutant) {
  const RMatrix& M = commutant.M;
  const int n = static_cast<int>(M.rows());
  Eigen::JacobiSVD<RMatrix> svd(M);
  const RVector& sigma = svd.singularValues();
  const double smax = sigma.size() > 0 ? sigma(0) : 0.0;
  const double threshold = tol::rank_rel * smax;

  // Singular values of a real skew-symmetric matrix come in equal pairs;
  // counting pairs keeps the rank even when a pair straddles the cutoff.
  int r = 0;
  for (int i = 0; i + 1 < sigma.size(); i += 2) {
    if (std::sqrt(sigma(i) * sigma(i + 1)) > threshold) r += 2;
    else break;
  }

  NullSpaceParametrization out;
  out.d = commutant.d;
  out.r = r;
  out.offset = RVector::Zero(n);
  out.near_degenerate_warning = (r > 0 && sigma(r - 1) <= 10.0 * threshold) ||
                                (r < n && smax > 0 && sigma(r) > 0.1 * threshold);

  std::vector<int> pivots;
  if (r > 0) {
    RMatrix q_basis(n, r);
    int got = 0;
    for (int cidx : detail::pivot_preference(commutant.d)) {
      if (got == r) break;
      RVector col = M.col(cidx);
      RVector res = col;
      if (got > 0) res -= q_basis.leftCols(got) * (q_basis.leftCols(got).transpose() * col);
      // Re-orthogonalize once; cheap and keeps the basis clean.
      if (got > 0) res -= q_basis.leftCols(got) * (q_basis.leftCols(got).transpose() * res);
      const double norm = res.norm();
      if (norm > threshold) {
        q_basis.col(got) = res / norm;
        pivots.push_back(cidx);
        ++got;
      }
    }
    if (got != r)
      throw std::logic_error("rank_and_nullspace: pivot selection disagrees with the singular-value rank");
  }

  std::vector<bool> is_pivot(static_cast<std::size_t>(n), false);
  for (int p : pivots) is_pivot[static_cast<std::size_t>(p)] = true;
  for (int i = 0; i < n; ++i) {
    if (is_pivot[static_cast<std::size_t>(i)]) out.bound_indices.push_back(i);
    else out.free_indices.push_back(i);
  }

  const int nf = out.n();
  out.map = RMatrix::Zero(n, nf);
  for (int j = 0; j < nf; ++j) out.map(out.free_indices[static_cast<std::size_t>(j)], j) = 1.0;
  if (r > 0 && nf > 0) {
    RMatrix b(n, r), f(n, nf);
    for (int j = 0; j < r; ++j) b.col(j) = M.col(out.bound_indices[static_cast<std::size_t>(j)]);
    for (int j = 0; j < nf; ++j) f.col(j) = M.col(out.free_indices[static_cast<std::size_t>(j)]);
    RMatrix coeffs = Eigen::ColPivHouseholderQR<RMatrix>(b).solve(-f);
    for (int j = 0; j < r; ++j)
      out.map.row(out.bound_indices[static_cast<std::size_t>(j)]) = coeffs.row(j);
  }
  return out;
}

// Degeneracy patterns compatible with a given orbit dimension: partitions
// (m_1, ..., m_k) of d with d^2 - sum m_i^2 = r.
inline OrbitInfo classify_orbit(int r, int d) {
  if (r < 0 || r % 2 != 0 || r > d * (d - 1)) {
    std::ostringstream msg;
    msg << "classify_orbit: rank " << r << " impossible for d=" << d;
    throw ValidationError(msg.str());
  }
  OrbitInfo out;
  out.r = r;
  out.is_nondegenerate = (r == d * (d - 1));

  std::vector<int> current;
  std::vector<std::vector<int>> matches;
  auto recurse = [&](auto&& self, int remaining, int max_part) -> void {
    if (remaining == 0) {
      int sq = 0;
      for (int m : current) sq += m * m;
      if (d * d - sq == r) {
        std::vector<int> sorted = current;
        std::sort(sorted.begin(), sorted.end());
        matches.push_back(std::move(sorted));
      }
      return;
    }
    for (int part = std::min(remaining, max_part); part >= 1; --part) {
      current.push_back(part);
      self(self, remaining - part, part);
      current.pop_back();
    }
  };
  recurse(recurse, d, d);
  std::sort(matches.begin(), matches.end());
  matches.erase(std::unique(matches.begin(), matches.end()), matches.end());
  if (matches.empty()) {
    std::ostringstream msg;
    msg << "classify_orbit: no degeneracy pattern matches rank " << r << " for d=" << d;
    throw ValidationError(msg.str());
  }
  out.degeneracy_patterns = std::move(matches);
  return out;
}

}  // namespace qex

#endif  // QEX_COMMUTANT_HPP
