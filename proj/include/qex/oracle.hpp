#ifndef QEX_ORACLE_HPP
#define QEX_ORACLE_HPP

#include <algorithm>
#include <numeric>
#include <vector>

#include "qex/common.hpp"
#include "qex/su_algebra.hpp"

// Verification backstop, kept off the main algorithm path on purpose: a
// cyclic Jacobi eigensolver plus brute-force permutation enumeration.

namespace qex {

struct OracleSpectrum {
  RVector eigenvalues;   // descending
  CMatrix eigenvectors;  // columns, matching eigenvalue order
  double residual = 0.0; // max ||H v - e v|| over columns
};

inline OracleSpectrum eigen_oracle(const CMatrix& m) {
  if (m.rows() != m.cols()) throw ValidationError("eigen_oracle: matrix is not square");
  const int d = static_cast<int>(m.rows());
  const double scale = std::max(1.0, inf_norm(m));
  if (hermiticity_defect(m) > tol::herm_rel * scale)
    throw ValidationError("eigen_oracle: input is not Hermitian");
  CMatrix a = 0.5 * (m + m.adjoint());
  CMatrix v = CMatrix::Identity(d, d);

  auto off_norm = [&]() {
    double s = 0.0;
    for (int p = 0; p < d; ++p)
      for (int q = p + 1; q < d; ++q) s += std::norm(a(p, q));
    return std::sqrt(2.0 * s);
  };

  const double target = 1e-14 * scale * d;
  const int max_sweeps = 60;
  int sweep = 0;
  while (off_norm() > target) {
    if (++sweep > max_sweeps) {
      throw SolverExhaustion("eigen_oracle: Jacobi sweeps did not converge; off-diagonal norm " +
                             std::to_string(off_norm()));
    }
    for (int p = 0; p < d; ++p) {
      for (int q = p + 1; q < d; ++q) {
        const cxd apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        // Phase factor turns the 2x2 pivot block real symmetric, then a
        // classical Jacobi rotation annihilates it.
        const cxd phase = apq / std::abs(apq);
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * std::abs(apq));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const cxd phc = std::conj(phase);
        // A <- A G with G = diag(1, conj(phase)) * plane rotation.
        for (int i = 0; i < d; ++i) {
          const cxd aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * phc * aiq;
          a(i, q) = s * aip + c * phc * aiq;
        }
        // A <- G^dagger A.
        for (int i = 0; i < d; ++i) {
          const cxd api = a(p, i), aqi = a(q, i);
          a(p, i) = c * api - s * phase * aqi;
          a(q, i) = s * api + c * phase * aqi;
        }
        for (int i = 0; i < d; ++i) {
          const cxd vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - s * phc * viq;
          v(i, q) = s * vip + c * phc * viq;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
    }
  }

  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return a(i, i).real() > a(j, j).real(); });
  OracleSpectrum out;
  out.eigenvalues = RVector::Zero(d);
  out.eigenvectors = CMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    out.eigenvalues(i) = a(order[i], order[i]).real();
    out.eigenvectors.col(i) = v.col(order[i]);
  }
  CMatrix sym = 0.5 * (m + m.adjoint());
  double worst = 0.0;
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXcd res = sym * out.eigenvectors.col(i) - out.eigenvalues(i) * out.eigenvectors.col(i);
    worst = std::max(worst, res.norm());
  }
  out.residual = worst;
  return out;
}

// Trace sandwich for commuting spectra: both inputs sorted descending.
inline std::pair<double, double> trace_bounds(const RVector& h_spec, const RVector& rho_spec) {
  if (h_spec.size() != rho_spec.size())
    throw ValidationError("trace_bounds: spectra have different lengths");
  const int d = static_cast<int>(h_spec.size());
  double sum = rho_spec.sum();
  if (std::abs(sum - 1.0) > 1e-9)
    throw ValidationError("trace_bounds: state spectrum does not sum to 1");
  double lower = 0.0, upper = 0.0;
  for (int i = 0; i < d; ++i) {
    lower += h_spec(d - 1 - i) * rho_spec(i);
    upper += h_spec(i) * rho_spec(i);
  }
  return {lower, upper};
}

// All distinct dot products of h_spec with permutations of rho_spec,
// sorted ascending. Duplicates within a tiny band collapse, so the result
// has d! entries exactly when both spectra are non-degenerate.
inline std::vector<double> permutation_means(const RVector& h_spec, const RVector& rho_spec) {
  if (h_spec.size() != rho_spec.size())
    throw ValidationError("permutation_means: spectra have different lengths");
  const int d = static_cast<int>(h_spec.size());
  std::vector<double> gamma(rho_spec.data(), rho_spec.data() + d);
  std::sort(gamma.begin(), gamma.end());
  std::vector<double> means;
  do {
    double dot = 0.0;
    for (int i = 0; i < d; ++i) dot += h_spec(i) * gamma[static_cast<std::size_t>(i)];
    means.push_back(dot);
  } while (std::next_permutation(gamma.begin(), gamma.end()));
  std::sort(means.begin(), means.end());
  const double band = 1e-12 * std::max(1.0, std::abs(means.empty() ? 0.0 : means.back()));
  std::vector<double> unique;
  for (double value : means) {
    if (unique.empty() || value - unique.back() > band) unique.push_back(value);
  }
  return unique;
}

}  // namespace qex

#endif  // QEX_ORACLE_HPP
