#ifndef QEX_POLY_SOLVER_HPP
#define QEX_POLY_SOLVER_HPP

#include <Eigen/QR>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "qex/commutant.hpp"
#include "qex/common.hpp"
#include "qex/positivity.hpp"
#include "qex/su_algebra.hpp"

namespace qex {

// Residual map x -> (a_2(x) - c_2, ..., a_d(x) - c_d) over the unknown free
// components of a critical Bloch parametrization.
struct ConstraintSystem {
  int d = 0;
  std::vector<int> unknown_indices;  // Bloch indices of the unknowns
  RMatrix map;                       // lambda = offset + map * x
  RVector offset;
  PurityConstraints constants;

  int arity() const { return static_cast<int>(map.cols()); }

  RVector bloch(const RVector& x) const { return offset + map * x; }

  RVector residual(const RVector& x) const {
    const CMatrix rho = bloch_to_density(d, bloch(x));
    const TraceVector t = power_sums(rho, d);
    const RVector a = newton_girard_coeffs(t);
    return a - constants.c;
  }

  // Central differences, step 1e-6 scaled per coordinate.
  RMatrix jacobian(const RVector& x) const {
    const int m = arity();
    RMatrix jac(d - 1, m);
    for (int j = 0; j < m; ++j) {
      const double step = 1e-6 * std::max(1.0, std::abs(x(j)));
      RVector xp = x, xm = x;
      xp(j) += step;
      xm(j) -= step;
      jac.col(j) = (residual(xp) - residual(xm)) / (2.0 * step);
    }
    return jac;
  }
};

struct SolutionSet {
  std::vector<RVector> solutions;  // unknown-space vectors, canonical order
  std::vector<double> residuals;   // matching infinity-norm residuals
  int count = 0;
};

inline std::int64_t count_bound(int d) {
  if (d < 2) throw ValidationError("count_bound: dimension must be at least 2");
  return factorial(d);
}

namespace detail {

// System construction without the arity guard; the degenerate recursion
// legitimately produces systems with fewer unknowns than d-1.
inline ConstraintSystem make_system(const NullSpaceParametrization& param,
                                    const std::vector<int>& fixed_zero,
                                    const PurityConstraints& constants) {
  ConstraintSystem sys;
  sys.d = param.d;
  sys.constants = constants;
  std::vector<int> kept;
  for (int idx : param.free_indices) {
    if (std::find(fixed_zero.begin(), fixed_zero.end(), idx) == fixed_zero.end())
      kept.push_back(idx);
  }
  if (kept.size() + fixed_zero.size() != param.free_indices.size())
    throw ValidationError("make_system: fixed set contains indices that are not free");
  sys.unknown_indices = kept;
  const int n = static_cast<int>(param.map.rows());
  sys.map = RMatrix::Zero(n, static_cast<int>(kept.size()));
  sys.offset = param.offset;
  for (std::size_t j = 0; j < kept.size(); ++j) {
    // Column of the kept free variable within the parametrization.
    const auto it = std::find(param.free_indices.begin(), param.free_indices.end(), kept[j]);
    const int col = static_cast<int>(it - param.free_indices.begin());
    sys.map.col(static_cast<int>(j)) = param.map.col(col);
  }
  return sys;
}

struct NewtonOutcome {
  RVector x;
  double residual_norm = 0.0;
  bool converged = false;
};

inline NewtonOutcome damped_newton(const ConstraintSystem& sys, RVector x, int max_iters = 80) {
  NewtonOutcome out;
  RVector r = sys.residual(x);
  double rn = inf_norm(r);
  for (int iter = 0; iter < max_iters; ++iter) {
    if (rn < 1e-16) break;
    RMatrix jac = sys.jacobian(x);
    Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(jac);
    RVector delta = cod.solve(-r);
    if (!delta.allFinite()) break;
    double alpha = 1.0;
    bool improved = false;
    for (int bt = 0; bt < 40; ++bt) {
      RVector x_try = x + alpha * delta;
      RVector r_try = sys.residual(x_try);
      const double rn_try = inf_norm(r_try);
      if (rn_try < (1.0 - 1e-4 * alpha) * rn || rn_try < 1e-16) {
        x = x_try;
        r = r_try;
        rn = rn_try;
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) break;
  }
  out.x = x;
  out.residual_norm = rn;
  out.converged = rn < tol::solution;
  return out;
}

inline bool lexicographic_less(const RVector& a, const RVector& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

}  // namespace detail

// Spec-facing constructor: after zeroing, exactly d-1 unknowns must remain.
inline ConstraintSystem build_constraint_system(const NullSpaceParametrization& param,
                                                const std::vector<int>& fixed_zero,
                                                const PurityConstraints& constants) {
  if (constants.admissibility.status == Admissibility::inadmissible)
    throw ValidationError("build_constraint_system: constants are inadmissible (" +
                          constants.admissibility.violated_condition + ")");
  if (param.d != constants.d)
    throw ValidationError("build_constraint_system: dimension mismatch");
  ConstraintSystem sys = detail::make_system(param, fixed_zero, constants);
  if (sys.arity() != param.d - 1)
    throw ValidationError("build_constraint_system: zeroing leaves " + std::to_string(sys.arity()) +
                          " unknowns, expected " + std::to_string(param.d - 1));
  return sys;
}

// Multi-start damped Newton over quasi-random points in the Bloch ball.
// Deterministic for a fixed (system, seed); `early_stop_count`, when
// positive, ends the scan once that many distinct solutions are in hand.
inline SolutionSet solve(const ConstraintSystem& sys, int seed, int early_stop_count = -1) {
  const int d = sys.d;
  const int m = sys.arity();
  const double radius = 1.05 * bloch_ball_radius(d);
  const std::int64_t n_starts = 120 * count_bound(d);
  const std::int64_t bezout = count_bound(d);

  std::vector<RVector> found;
  std::vector<double> found_res;

  auto try_accept = [&](const detail::NewtonOutcome& outcome) {
    if (!outcome.converged) return;
    const CMatrix rho = bloch_to_density(d, sys.bloch(outcome.x));
    if (!is_positive_semidefinite_within(rho, tol::psd)) return;
    for (std::size_t i = 0; i < found.size(); ++i) {
      if ((found[i] - outcome.x).norm() <= tol::dedup) {
        if (outcome.residual_norm < found_res[i]) {
          found[i] = outcome.x;
          found_res[i] = outcome.residual_norm;
        }
        return;
      }
    }
    found.push_back(outcome.x);
    found_res.push_back(outcome.residual_norm);
  };

  if (m == 0) {
    // Fully determined parametrization; the single candidate either
    // satisfies the constants or the set is empty.
    detail::NewtonOutcome outcome;
    outcome.x = RVector::Zero(0);
    outcome.residual_norm = inf_norm(sys.residual(outcome.x));
    outcome.converged = outcome.residual_norm < tol::solution;
    try_accept(outcome);
  } else {
    std::uint64_t halton_index = 1 + static_cast<std::uint64_t>(seed) * 0x9e3779b9ull;
    const std::int64_t target = early_stop_count > 0
                                    ? std::min<std::int64_t>(early_stop_count, bezout)
                                    : -1;
    for (std::int64_t s = 0; s < n_starts; ++s) {
      if (target > 0 && static_cast<std::int64_t>(found.size()) >= target) break;
      RVector x0(m);
      // Next quasi-random point inside the unit ball, then scaled.
      while (true) {
        for (int j = 0; j < m; ++j)
          x0(j) = 2.0 * radical_inverse(halton_index, halton_prime(j)) - 1.0;
        ++halton_index;
        if (x0.norm() <= 1.0) break;
      }
      x0 *= radius;
      try_accept(detail::damped_newton(sys, x0));
    }
  }

  // Canonical lexicographic order, then a final dedup pass that keeps the
  // lower-residual representative of any pair within the dedup radius.
  std::vector<std::size_t> order(found.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return detail::lexicographic_less(found[a], found[b]);
  });

  SolutionSet out;
  for (std::size_t idx : order) {
    bool duplicate = false;
    for (std::size_t j = 0; j < out.solutions.size(); ++j) {
      if ((out.solutions[j] - found[idx]).norm() <= tol::dedup) {
        if (found_res[idx] < out.residuals[j]) {
          out.solutions[j] = found[idx];
          out.residuals[j] = found_res[idx];
        }
        duplicate = true;
        break;
      }
    }
    if (!duplicate) {
      out.solutions.push_back(found[idx]);
      out.residuals.push_back(found_res[idx]);
    }
  }
  out.count = static_cast<int>(out.solutions.size());

  if (out.count == 0 && sys.constants.admissibility.status != Admissibility::inadmissible) {
    throw SolverExhaustion("solve: no solutions found for admissible constants after " +
                           std::to_string(n_starts) + " starts; consider more starts");
  }
  return out;
}

}  // namespace qex

#endif  // QEX_POLY_SOLVER_HPP
