#ifndef QEX_POSITIVITY_HPP
#define QEX_POSITIVITY_HPP

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qex/common.hpp"

namespace qex {

enum class Admissibility { admissible, boundary, inadmissible };

struct AdmissibilityResult {
  Admissibility status = Admissibility::inadmissible;
  std::string violated_condition;                    // set when inadmissible
  std::vector<std::pair<std::string, double>> conditions;

  std::vector<std::string> active_conditions(double band = tol::bezoutian) const {
    std::vector<std::string> out;
    for (const auto& [name, value] : conditions)
      if (std::abs(value) <= band) out.push_back(name);
    return out;
  }
};

inline const char* to_string(Admissibility a) {
  switch (a) {
    case Admissibility::admissible: return "admissible";
    case Admissibility::boundary: return "boundary";
    case Admissibility::inadmissible: return "inadmissible";
  }
  return "?";
}

enum class PurityKind { pure, mixed };

// Characteristic-polynomial constants (c_2, ..., c_d) fixing the degree of
// mixing; admissibility is evaluated once at construction.
struct PurityConstraints {
  int d = 0;
  RVector c;  // c(k-2) holds c_k
  PurityKind kind = PurityKind::pure;
  AdmissibilityResult admissibility;

  double value(int k) const { return c(k - 2); }
  bool is_pure() const { return kind == PurityKind::pure; }
};

// Power sums t_j = Tr(rho^j), j = 1, ..., 2(d-1); t(0) holds t_1.
struct TraceVector {
  int d = 0;
  RVector t;

  double value(int j) const { return t(j - 1); }
};

struct BezoutianMatrix {
  int d = 0;
  RMatrix B;
};

inline double binomial(int n, int k) {
  double out = 1.0;
  for (int i = 0; i < k; ++i) out = out * (n - i) / (i + 1);
  return out;
}

inline double purity_upper_bound(int d, int k) {
  if (k < 2 || k > d) {
    std::ostringstream msg;
    msg << "purity_upper_bound: index " << k << " out of range for d=" << d;
    throw ValidationError(msg.str());
  }
  return binomial(d, k) / std::pow(static_cast<double>(d), k);
}

// Newton-Girard recursion: power sums to characteristic coefficients.
// Returns (a_2, ..., a_d); assumes t_1 = 1 is the first entry.
inline RVector newton_girard_coeffs(const TraceVector& traces) {
  const int d = traces.d;
  if (traces.t.size() < d)
    throw ValidationError("newton_girard_coeffs: trace vector too short");
  std::vector<double> a(static_cast<std::size_t>(d) + 1, 0.0);
  a[0] = 1.0;
  for (int k = 1; k <= d; ++k) {
    double sum = 0.0;
    for (int j = 1; j <= k; ++j) {
      const double term = a[static_cast<std::size_t>(k - j)] * traces.value(j);
      sum += (j % 2 == 1) ? term : -term;
    }
    a[static_cast<std::size_t>(k)] = sum / k;
  }
  RVector out(d - 1);
  for (int k = 2; k <= d; ++k) out(k - 2) = a[static_cast<std::size_t>(k)];
  return out;
}

// Generic variant for arbitrary power-sum sequences (t_1 need not be 1);
// used on the Bezoutian itself for the d=4 admissibility conditions.
inline std::vector<double> elementary_from_power_sums(const std::vector<double>& t) {
  std::vector<double> a(t.size() + 1, 0.0);
  a[0] = 1.0;
  for (std::size_t k = 1; k <= t.size(); ++k) {
    double sum = 0.0;
    for (std::size_t j = 1; j <= k; ++j) {
      const double term = a[k - j] * t[j - 1];
      sum += (j % 2 == 1) ? term : -term;
    }
    a[k] = sum / static_cast<double>(k);
  }
  return {a.begin() + 1, a.end()};
}

// Newton identities run forward (t_0 enters as the stage index k), then the
// Cayley-Hamilton recursion extends the sequence to t_{2(d-1)}.
inline TraceVector traces_from_constants(const PurityConstraints& constraints) {
  const int d = constraints.d;
  std::vector<double> c(static_cast<std::size_t>(d) + 1, 0.0);
  c[1] = 1.0;
  for (int k = 2; k <= d; ++k) c[static_cast<std::size_t>(k)] = constraints.value(k);
  const int len = 2 * (d - 1);
  std::vector<double> t(static_cast<std::size_t>(len) + 1, 0.0);
  for (int k = 1; k <= d && k <= len; ++k) {
    double sum = 0.0;
    for (int p = 1; p <= k; ++p) {
      const double tv = (k - p == 0) ? static_cast<double>(k) : t[static_cast<std::size_t>(k - p)];
      const double term = c[static_cast<std::size_t>(p)] * tv;
      sum += (p % 2 == 1) ? term : -term;
    }
    t[static_cast<std::size_t>(k)] = sum;
  }
  for (int k = d + 1; k <= len; ++k) {
    double sum = 0.0;
    for (int p = 1; p <= d; ++p) {
      const double term = c[static_cast<std::size_t>(p)] * t[static_cast<std::size_t>(k - p)];
      sum += (p % 2 == 1) ? term : -term;
    }
    t[static_cast<std::size_t>(k)] = sum;
  }
  TraceVector out;
  out.d = d;
  out.t = RVector::Zero(len);
  for (int k = 1; k <= len; ++k) out.t(k - 1) = t[static_cast<std::size_t>(k)];
  return out;
}

// Hankel matrix of power sums with the dimension in the top-left corner.
inline BezoutianMatrix bezoutian(const TraceVector& traces) {
  const int d = traces.d;
  if (traces.t.size() < 2 * (d - 1))
    throw ValidationError("bezoutian: trace vector too short");
  BezoutianMatrix out;
  out.d = d;
  out.B = RMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      out.B(i, j) = (i + j == 0) ? static_cast<double>(d) : traces.value(i + j);
  return out;
}

// det B_d; vanishes exactly when the underlying spectrum has a repeated
// eigenvalue, which is how degeneracy is detected without diagonalizing.
inline double degeneracy_indicator(const TraceVector& traces) {
  return bezoutian(traces).B.determinant();
}

namespace detail {

// Diagonal-pivoted Cholesky PSD probe for dimensions without a transcribed
// inequality set. Returns the most negative pivot encountered (0 if none).
inline double pivoted_cholesky_defect(RMatrix a, double band) {
  const int n = static_cast<int>(a.rows());
  double worst = 0.0;
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  for (int step = 0; step < n; ++step) {
    int pivot = -1;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
      if (!done[static_cast<std::size_t>(i)] && a(i, i) > best) {
        best = a(i, i);
        pivot = i;
      }
    }
    if (pivot < 0) break;
    if (best <= band) {
      // Remaining block must be negligible for PSD to hold.
      for (int i = 0; i < n; ++i) {
        if (done[static_cast<std::size_t>(i)]) continue;
        worst = std::min(worst, a(i, i));
      }
      break;
    }
    done[static_cast<std::size_t>(pivot)] = true;
    for (int i = 0; i < n; ++i) {
      if (done[static_cast<std::size_t>(i)]) continue;
      for (int j = 0; j < n; ++j) {
        if (done[static_cast<std::size_t>(j)]) continue;
        a(i, j) -= a(i, pivot) * a(pivot, j) / best;
      }
    }
  }
  return worst;
}

inline AdmissibilityResult evaluate_admissibility(int d, const RVector& c) {
  AdmissibilityResult result;
  auto& conds = result.conditions;
  const double band = tol::bezoutian;

  for (int k = 2; k <= d; ++k) {
    const double ub = purity_upper_bound(d, k);
    conds.emplace_back("c" + std::to_string(k) + "_lower", c(k - 2));
    conds.emplace_back("c" + std::to_string(k) + "_upper", ub - c(k - 2));
  }
  bool box_ok = true;
  for (const auto& [name, value] : conds) {
    if (value < -band) {
      result.status = Admissibility::inadmissible;
      result.violated_condition = name;
      box_ok = false;
      break;
    }
  }

  if (box_ok) {
    if (d == 3) {
      const double c2 = c(0), c3 = c(1);
      const double value = c2 * c2 - 4.0 * c2 * c2 * c2 + 18.0 * c2 * c3 - c3 * (4.0 + 27.0 * c3);
      const double scale = std::max(1.0, std::abs(c2 * c2) + std::abs(4 * c2 * c2 * c2) +
                                             std::abs(18 * c2 * c3) + std::abs(c3) * (4 + 27 * std::abs(c3)));
      conds.emplace_back("det_B3", value / scale);
    } else if (d >= 4) {
      // Coefficients of the Bezoutian's characteristic polynomial; all of
      // them nonnegative is the real-spectrum certificate.
      PurityConstraints tmp;
      tmp.d = d;
      tmp.c = c;
      TraceVector t = traces_from_constants(tmp);
      RMatrix B = bezoutian(t).B;
      if (d == 4) {
        std::vector<double> pw(static_cast<std::size_t>(d), 0.0);
        RMatrix power = RMatrix::Identity(d, d);
        for (int j = 1; j <= d; ++j) {
          power = RMatrix(power * B);
          pw[static_cast<std::size_t>(j - 1)] = power.trace();
        }
        const std::vector<double> ek = elementary_from_power_sums(pw);
        static const char* names[] = {"tr_B4", "e2_B4", "e3_B4", "det_B4"};
        for (int k = 0; k < 4; ++k) conds.emplace_back(names[k], ek[static_cast<std::size_t>(k)]);
      } else {
        conds.emplace_back("cholesky_B" + std::to_string(d), pivoted_cholesky_defect(B, band));
      }
    }
    double min_value = 0.0;
    std::string min_name;
    bool first = true;
    for (const auto& [name, value] : conds) {
      if (first || value < min_value) {
        min_value = value;
        min_name = name;
        first = false;
      }
    }
    if (min_value < -band) {
      result.status = Admissibility::inadmissible;
      result.violated_condition = min_name;
    } else {
      // The two exact vertices (pure, maximal mixing) correspond to
      // explicitly known states, so they count as admissible even though
      // the generic boundary conditions vanish there.
      bool pure_vertex = true, mixed_vertex = true;
      for (int k = 2; k <= d; ++k) {
        if (std::abs(c(k - 2)) > band) pure_vertex = false;
        if (std::abs(c(k - 2) - purity_upper_bound(d, k)) > band) mixed_vertex = false;
      }
      if (pure_vertex || mixed_vertex)
        result.status = Admissibility::admissible;
      else if (min_value <= band) {
        result.status = Admissibility::boundary;
        result.violated_condition = min_name;
      } else {
        result.status = Admissibility::admissible;
      }
    }
  }
  return result;
}

}  // namespace detail

inline PurityConstraints make_purity_constraints(int d, const RVector& c) {
  if (d < 2) throw ValidationError("make_purity_constraints: dimension must be at least 2");
  if (c.size() != d - 1)
    throw ValidationError("make_purity_constraints: expected " + std::to_string(d - 1) + " constants");
  PurityConstraints out;
  out.d = d;
  out.c = c;
  out.kind = (inf_norm(c) == 0.0) ? PurityKind::pure : PurityKind::mixed;
  out.admissibility = detail::evaluate_admissibility(d, c);
  return out;
}

inline PurityConstraints pure_constraints(int d) {
  return make_purity_constraints(d, RVector::Zero(d - 1));
}

inline PurityConstraints maximally_mixed_constraints(int d) {
  RVector c(d - 1);
  for (int k = 2; k <= d; ++k) c(k - 2) = purity_upper_bound(d, k);
  return make_purity_constraints(d, c);
}

inline const AdmissibilityResult& is_admissible(const PurityConstraints& constraints) {
  return constraints.admissibility;
}

// Power sums of a (small) Hermitian matrix, j = 1, ..., count.
inline TraceVector power_sums(const CMatrix& rho, int count = 0) {
  const int d = static_cast<int>(rho.rows());
  const int len = count > 0 ? count : 2 * (d - 1);
  TraceVector out;
  out.d = d;
  out.t = RVector::Zero(std::max(len, d));
  CMatrix power = CMatrix::Identity(d, d);
  for (int j = 1; j <= out.t.size(); ++j) {
    power = CMatrix(power * rho);
    out.t(j - 1) = power.trace().real();
  }
  return out;
}

// Eigenvalue floor test without an eigensolver: gamma_min >= -shift exactly
// when every characteristic coefficient of rho + shift*I is nonnegative.
inline bool is_positive_semidefinite_within(const CMatrix& rho, double shift) {
  const int d = static_cast<int>(rho.rows());
  CMatrix shifted = rho + shift * CMatrix::Identity(d, d);
  std::vector<double> pw(static_cast<std::size_t>(d), 0.0);
  CMatrix power = CMatrix::Identity(d, d);
  for (int j = 1; j <= d; ++j) {
    power = CMatrix(power * shifted);
    pw[static_cast<std::size_t>(j - 1)] = power.trace().real();
  }
  const std::vector<double> ek = elementary_from_power_sums(pw);
  const double slack = 1e-12 * std::max(1.0, std::abs(pw[0]));
  for (double e : ek)
    if (e < -slack) return false;
  return true;
}

}  // namespace qex

#endif  // QEX_POSITIVITY_HPP
