#ifndef QEX_EXTREMAL_HPP
#define QEX_EXTREMAL_HPP

#include <algorithm>
#include <array>
#include <optional>
#include <vector>

#include "qex/commutant.hpp"
#include "qex/common.hpp"
#include "qex/oracle.hpp"
#include "qex/poly_solver.hpp"
#include "qex/positivity.hpp"
#include "qex/su_algebra.hpp"

namespace qex {

// One extremal state: Bloch vector, reconstructed matrix, mean value of the
// source operator, and the purity actually achieved.
struct CriticalSolution {
  BlochVector bloch;
  CMatrix rho;
  double mean_value = 0.0;
  double commutator_residual = 0.0;
  PurityConstraints purity;
  int label = 0;
};

struct SpectralResult {
  std::vector<CriticalSolution> projectors;  // d rank-one states, mean desc
  RVector eigenvalues;                       // descending, with multiplicity
  double completeness_residual = 0.0;        // ||sum rho_k - I||_inf
  int rounds = 0;                            // solve rounds consumed
};

struct ConvexDecomposition {
  RVector weights;
  SpectralResult basis;
};

class SpectralRecursionError : public SolverExhaustion {
 public:
  SpectralRecursionError(const std::string& what, SpectralResult partial)
      : SolverExhaustion(what), partial_result(std::move(partial)) {}
  SpectralResult partial_result;
};

inline double mean_value(const HermitianOperator& op, const BlochVector& bloch) {
  if (op.d != bloch.d) throw ValidationError("mean_value: dimension mismatch");
  return op.h0 / op.d + 0.5 * op.h.dot(bloch.lambda);
}

namespace detail {

inline double commutator_residual(const CMatrix& h, const CMatrix& rho) {
  return inf_norm(CMatrix(h * rho - rho * h));
}

// Polish a near-rank-one state to the closest projector: rho <- 3rho^2 -
// 2rho^3 converges quadratically, commutes with everything rho commutes
// with, and needs no eigensolver. Recovers the accuracy the polynomial
// solve loses on ill-conditioned spectra.
inline RVector purify_rank_one(int d, const RVector& lambda) {
  CMatrix rho = bloch_to_density(d, lambda);
  const CMatrix identity = CMatrix::Identity(d, d);
  for (int iter = 0; iter < 8; ++iter) {
    const CMatrix sq = rho * rho;
    const double defect = inf_norm(CMatrix(sq - rho));
    if (defect < 1e-15) break;
    rho = CMatrix(sq * (3.0 * identity - 2.0 * rho));
    rho = 0.5 * (rho + rho.adjoint());
    rho /= rho.trace().real();
  }
  return decompose(rho).h;
}

inline CriticalSolution make_solution(const HermitianOperator& op, const CMatrix& h_matrix,
                                      const RVector& lambda) {
  CriticalSolution sol;
  sol.bloch.d = op.d;
  sol.bloch.lambda = lambda;
  sol.rho = bloch_to_density(op.d, lambda);
  sol.mean_value = op.h0 / op.d + 0.5 * op.h.dot(lambda);
  sol.commutator_residual = commutator_residual(h_matrix, sol.rho);
  const TraceVector t = power_sums(sol.rho, op.d);
  sol.purity = make_purity_constraints(op.d, newton_girard_coeffs(t));
  sol.bloch.purity_class =
      inf_norm(sol.purity.c) < 1e-8 ? PurityClass::pure : PurityClass::mixed;
  return sol;
}

inline bool lexicographic_less(const RVector& a, const RVector& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

inline void sort_solutions(std::vector<CriticalSolution>& sols) {
  std::sort(sols.begin(), sols.end(), [](const CriticalSolution& a, const CriticalSolution& b) {
    if (a.mean_value != b.mean_value) return a.mean_value > b.mean_value;
    return lexicographic_less(a.bloch.lambda, b.bloch.lambda);
  });
  for (std::size_t i = 0; i < sols.size(); ++i) sols[i].label = static_cast<int>(i) + 1;
}

// Surplus variables to zero: the free components absent from the mean-value
// expression go first (ascending index), then the remaining ones ascending.
inline std::vector<int> choose_fixed_zero(const NullSpaceParametrization& param,
                                          const HermitianOperator& op) {
  const int surplus = param.n() - (param.d - 1);
  if (surplus <= 0) return {};
  const RVector gradient = param.map.transpose() * op.h;
  const double cutoff = 1e-12 * std::max(1.0, inf_norm(op.h));
  std::vector<int> absent, present;
  for (int j = 0; j < param.n(); ++j) {
    const int idx = param.free_indices[static_cast<std::size_t>(j)];
    if (std::abs(gradient(j)) <= cutoff) absent.push_back(idx);
    else present.push_back(idx);
  }
  std::vector<int> zeros;
  for (int idx : absent) {
    if (static_cast<int>(zeros.size()) == surplus) break;
    zeros.push_back(idx);
  }
  for (int idx : present) {
    if (static_cast<int>(zeros.size()) == surplus) break;
    zeros.push_back(idx);
  }
  return zeros;
}

// Restrict a parametrization by linear conditions lambda . target = -2/d
// (orthogonality of the reconstructed states). Eliminated variables are
// claimed in pivot-preference order (lowest off-diagonal first).
inline NullSpaceParametrization with_orthogonality(const NullSpaceParametrization& param,
                                                   const std::vector<RVector>& targets) {
  const int nf = param.n();
  const int rows = static_cast<int>(targets.size());
  RMatrix a(rows, nf);
  RVector rhs(rows);
  for (int i = 0; i < rows; ++i) {
    a.row(i) = (param.map.transpose() * targets[static_cast<std::size_t>(i)]).transpose();
    rhs(i) = -2.0 / param.d - param.offset.dot(targets[static_cast<std::size_t>(i)]);
  }

  const double scale = std::max(1.0, inf_norm(a));
  const double cut = 1e-11 * scale;

  // Gaussian elimination with column pivots in ascending free-index order,
  // mirroring the kernel's pivot preference.
  std::vector<int> pivot_col(static_cast<std::size_t>(rows), -1);
  std::vector<bool> used_col(static_cast<std::size_t>(nf), false);
  int rank = 0;
  for (int col = 0; col < nf && rank < rows; ++col) {
    int best_row = -1;
    double best = cut;
    for (int i = rank; i < rows; ++i) {
      if (std::abs(a(i, col)) > best) {
        best = std::abs(a(i, col));
        best_row = i;
      }
    }
    if (best_row < 0) continue;
    a.row(rank).swap(a.row(best_row));
    std::swap(rhs(rank), rhs(best_row));
    const double pivot = a(rank, col);
    a.row(rank) /= pivot;
    rhs(rank) /= pivot;
    for (int i = 0; i < rows; ++i) {
      if (i == rank) continue;
      const double factor = a(i, col);
      if (factor != 0.0) {
        a.row(i) -= factor * a.row(rank);
        rhs(i) -= factor * rhs(rank);
      }
    }
    pivot_col[static_cast<std::size_t>(rank)] = col;
    used_col[static_cast<std::size_t>(col)] = true;
    ++rank;
  }
  for (int i = rank; i < rows; ++i) {
    if (std::abs(rhs(i)) > 1e-8 * std::max(1.0, scale))
      throw SolverExhaustion("with_orthogonality: inconsistent orthogonality constraints");
  }

  NullSpaceParametrization out;
  out.d = param.d;
  out.r = param.r;
  out.near_degenerate_warning = param.near_degenerate_warning;
  std::vector<int> kept_cols;
  for (int j = 0; j < nf; ++j)
    if (!used_col[static_cast<std::size_t>(j)]) kept_cols.push_back(j);

  // x_full = particular + Z x_kept within the old free coordinates.
  RVector particular = RVector::Zero(nf);
  RMatrix z = RMatrix::Zero(nf, static_cast<int>(kept_cols.size()));
  for (std::size_t j = 0; j < kept_cols.size(); ++j)
    z(kept_cols[j], static_cast<int>(j)) = 1.0;
  for (int i = 0; i < rank; ++i) {
    const int pc = pivot_col[static_cast<std::size_t>(i)];
    particular(pc) = rhs(i);
    for (std::size_t j = 0; j < kept_cols.size(); ++j)
      z(pc, static_cast<int>(j)) = -a(i, kept_cols[j]);
  }

  out.offset = param.offset + param.map * particular;
  out.map = param.map * z;
  for (int j : kept_cols)
    out.free_indices.push_back(param.free_indices[static_cast<std::size_t>(j)]);
  const int n = static_cast<int>(param.map.rows());
  for (int i = 0; i < n; ++i) {
    if (std::find(out.free_indices.begin(), out.free_indices.end(), i) == out.free_indices.end())
      out.bound_indices.push_back(i);
  }
  return out;
}

// Enumerate alternative surplus zero-sets (lexicographic combinations) for
// retries when the preferred slice misses every solution.
inline std::vector<std::vector<int>> zero_set_candidates(const NullSpaceParametrization& param,
                                                         const HermitianOperator& op,
                                                         int limit) {
  const int surplus = param.n() - (param.d - 1);
  std::vector<std::vector<int>> out;
  if (surplus <= 0) {
    out.push_back({});
    return out;
  }
  out.push_back(choose_fixed_zero(param, op));
  if (static_cast<int>(out.size()) >= limit) return out;

  std::vector<int> combo(static_cast<std::size_t>(surplus));
  const int nf = param.n();
  auto emit = [&](auto&& self, int start, int depth) -> bool {
    if (depth == surplus) {
      std::vector<int> zeros;
      for (int pos : combo) zeros.push_back(param.free_indices[static_cast<std::size_t>(pos)]);
      if (zeros != out.front()) out.push_back(zeros);
      return static_cast<int>(out.size()) >= limit;
    }
    for (int pos = start; pos < nf; ++pos) {
      combo[static_cast<std::size_t>(depth)] = pos;
      if (self(self, pos + 1, depth + 1)) return true;
    }
    return false;
  };
  emit(emit, 0, 0);
  return out;
}

}  // namespace detail

// Full mixed-or-pure extremal run for fixed purity constants.
inline std::vector<CriticalSolution> extremal_states(const HermitianOperator& op,
                                                     const PurityConstraints& constants,
                                                     int seed) {
  if (op.d != constants.d) throw ValidationError("extremal_states: dimension mismatch");
  if (constants.admissibility.status == Admissibility::inadmissible)
    throw ValidationError("extremal_states: inadmissible constants (violated " +
                          constants.admissibility.violated_condition + ")");
  const StructureTensor& tensor = structure_tensor(op.d);
  const CommutantMatrix commutant = build_commutant(op, tensor);
  const NullSpaceParametrization param = rank_and_nullspace(commutant);
  const std::vector<int> zeros = detail::choose_fixed_zero(param, op);
  const ConstraintSystem sys = build_constraint_system(param, zeros, constants);
  const SolutionSet set = solve(sys, seed);

  const CMatrix h_matrix = reconstruct(op);
  std::vector<CriticalSolution> sols;
  sols.reserve(set.solutions.size());
  for (const RVector& x : set.solutions) {
    RVector lambda = sys.bloch(x);
    if (constants.is_pure()) lambda = detail::purify_rank_one(op.d, lambda);
    sols.push_back(detail::make_solution(op, h_matrix, lambda));
  }

  // A degenerate operator admits continua of critical states; collapse to
  // one representative per (mean value, achieved purity) signature so the
  // report stays within the Bezout count.
  const bool degenerate = param.r < op.d * (op.d - 1);
  if (degenerate && static_cast<std::int64_t>(sols.size()) > count_bound(op.d)) {
    detail::sort_solutions(sols);
    std::vector<CriticalSolution> kept;
    for (auto& sol : sols) {
      bool seen = false;
      for (const auto& k : kept) {
        if (std::abs(k.mean_value - sol.mean_value) < 1e-8 &&
            inf_norm(RVector(k.purity.c - sol.purity.c)) < 1e-8) {
          seen = true;
          break;
        }
      }
      if (!seen) kept.push_back(std::move(sol));
    }
    sols = std::move(kept);
  }
  detail::sort_solutions(sols);
  return sols;
}

// Full spectrum through the commutant pipeline. Non-degenerate operators
// resolve in one solve; degenerate ones go through recursive
// orthogonalization until d rank-one projectors are collected.
inline SpectralResult extremal_spectrum(const HermitianOperator& op, int seed) {
  const double h_scale = inf_norm(op.h);
  if (h_scale <= 1e-12 * std::max(1.0, std::abs(op.h0)))
    throw ValidationError("extremal_spectrum: scalar operator carries no spectral information");

  const StructureTensor& tensor = structure_tensor(op.d);
  const CommutantMatrix commutant = build_commutant(op, tensor);
  const NullSpaceParametrization kernel = rank_and_nullspace(commutant);
  const PurityConstraints pure = pure_constraints(op.d);
  const CMatrix h_matrix = reconstruct(op);
  const int d = op.d;

  SpectralResult result;
  std::vector<CriticalSolution> kept;

  auto orthogonal_to_kept = [&](const CriticalSolution& cand) {
    for (const auto& k : kept) {
      const double overlap = (cand.rho * k.rho).trace().real();
      if (std::abs(overlap) > tol::orthogonality) return false;
    }
    return true;
  };

  auto collect = [&](const ConstraintSystem& sys, const SolutionSet& set) {
    int added = 0;
    for (const RVector& x : set.solutions) {
      if (static_cast<int>(kept.size()) == d) break;
      const RVector lambda = detail::purify_rank_one(op.d, sys.bloch(x));
      CriticalSolution sol = detail::make_solution(op, h_matrix, lambda);
      const double purity2 = power_sums(sol.rho, 2).value(2);
      if (std::abs(purity2 - 1.0) > 1e-7) continue;  // not rank one
      if (!orthogonal_to_kept(sol)) continue;
      kept.push_back(std::move(sol));
      ++added;
    }
    return added;
  };

  const int max_rounds = d + 3;
  int rounds = 0;
  while (static_cast<int>(kept.size()) < d) {
    if (++rounds > max_rounds) break;
    NullSpaceParametrization param = kernel;
    if (!kept.empty()) {
      std::vector<RVector> targets;
      for (const auto& k : kept) targets.push_back(k.bloch.lambda);
      param = detail::with_orthogonality(kernel, targets);
    }

    int added = 0;
    const auto candidates = detail::zero_set_candidates(param, op, 24);
    for (const auto& zeros : candidates) {
      const ConstraintSystem sys = detail::make_system(param, zeros, pure);
      SolutionSet set;
      try {
        set = solve(sys, seed, d);
      } catch (const SolverExhaustion&) {
        continue;  // slice missed every solution; try the next one
      }
      added = collect(sys, set);
      if (added > 0) break;
    }
    if (added == 0 && param.n() > d - 1) {
      // Underdetermined fallback: solve on the whole constrained set.
      const ConstraintSystem sys = detail::make_system(param, {}, pure);
      try {
        const SolutionSet set = solve(sys, seed, 2 * d);
        added = collect(sys, set);
      } catch (const SolverExhaustion&) {
      }
    }
    if (added == 0) {
      SpectralResult partial;
      partial.projectors = kept;
      partial.rounds = rounds;
      throw SpectralRecursionError(
          "extremal_spectrum: no new orthogonal projector found after retries (have " +
              std::to_string(kept.size()) + " of " + std::to_string(d) + ")",
          std::move(partial));
    }
  }

  if (static_cast<int>(kept.size()) != d) {
    SpectralResult partial;
    partial.projectors = kept;
    partial.rounds = rounds;
    throw SpectralRecursionError("extremal_spectrum: round budget exhausted", std::move(partial));
  }

  detail::sort_solutions(kept);
  result.projectors = std::move(kept);
  result.rounds = rounds;
  result.eigenvalues = RVector::Zero(d);
  CMatrix sum = CMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    result.eigenvalues(i) = result.projectors[static_cast<std::size_t>(i)].mean_value;
    sum += result.projectors[static_cast<std::size_t>(i)].rho;
  }
  result.completeness_residual = inf_norm(CMatrix(sum - CMatrix::Identity(d, d)));
  return result;
}

// Weights of a commuting mixed extremal against the pure projector basis.
inline ConvexDecomposition convex_decomposition(const CriticalSolution& mixed,
                                                const SpectralResult& pure) {
  const int d = mixed.bloch.d;
  if (pure.eigenvalues.size() != d)
    throw ValidationError("convex_decomposition: basis dimension mismatch");
  ConvexDecomposition out;
  out.basis = pure;
  out.weights = RVector::Zero(d);
  for (int i = 0; i < d; ++i)
    out.weights(i) = (mixed.rho * pure.projectors[static_cast<std::size_t>(i)].rho).trace().real();

  CMatrix rebuilt = CMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i)
    rebuilt += out.weights(i) * pure.projectors[static_cast<std::size_t>(i)].rho;
  const double defect = inf_norm(CMatrix(rebuilt - mixed.rho));
  if (defect > 1e-8)
    throw ValidationError("convex_decomposition: inputs do not commute (reconstruction defect " +
                          std::to_string(defect) + ")");
  const double wsum = out.weights.sum();
  if (std::abs(wsum - 1.0) > 1e-10 || out.weights.minCoeff() < -1e-10)
    throw ValidationError("convex_decomposition: weights do not form a probability vector");
  return out;
}

// Closed interval of attainable mean values; ends are the extreme
// eigenvalues. Scalar operators collapse the interval to a point.
inline std::array<double, 2> numerical_range(const HermitianOperator& op, int seed) {
  const double h_scale = inf_norm(op.h);
  if (h_scale <= 1e-12 * std::max(1.0, std::abs(op.h0))) {
    const double value = op.h0 / op.d;
    return {value, value};
  }
  const SpectralResult spectrum = extremal_spectrum(op, seed);
  return {spectrum.eigenvalues(spectrum.eigenvalues.size() - 1), spectrum.eigenvalues(0)};
}

}  // namespace qex

#endif  // QEX_EXTREMAL_HPP
