#ifndef QEX_COMMON_HPP
#define QEX_COMMON_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qex {

using cxd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Thrown for rejected inputs (bad dimensions, non-Hermitian matrices,
// inadmissible purity constants). Maps to CLI exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when the multi-start solver cannot produce a required solution.
// Maps to CLI exit code 3.
class SolverExhaustion : public std::runtime_error {
 public:
  explicit SolverExhaustion(const std::string& what) : std::runtime_error(what) {}
};

// File and serialization failures. Maps to CLI exit code 4.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

namespace tol {
// Hermiticity acceptance, relative to the max-abs entry of the input.
inline constexpr double herm_rel = 1e-10;
// Rank threshold on singular values, relative to the largest one.
inline constexpr double rank_rel = 1e-10;
// Commutation residual budget, relative to the operator norm.
inline constexpr double null_space = 1e-9;
// Final polynomial-system residual a solution must reach.
inline constexpr double solution = 1e-11;
// Distance in free-variable space below which two solutions are one.
inline constexpr double dedup = 1e-7;
// Most negative eigenvalue tolerated in a reconstructed state.
inline constexpr double psd = 1e-8;
// Band around zero for admissibility boundary classification.
inline constexpr double bezoutian = 1e-9;
// Pairwise projector overlap accepted as orthogonal.
inline constexpr double orthogonality = 1e-8;
}  // namespace tol

inline double inf_norm(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double inf_norm(const RMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double inf_norm(const RVector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

inline std::int64_t factorial(int n) {
  std::int64_t out = 1;
  for (int i = 2; i <= n; ++i) out *= i;
  return out;
}

// Van der Corput radical inverse; the workhorse behind the Halton starts.
inline double radical_inverse(std::uint64_t index, std::uint64_t base) {
  double inv_base = 1.0 / static_cast<double>(base);
  double scale = inv_base;
  double value = 0.0;
  while (index > 0) {
    value += static_cast<double>(index % base) * scale;
    index /= base;
    scale *= inv_base;
  }
  return value;
}

inline std::uint64_t halton_prime(int dim) {
  static constexpr std::uint64_t primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  if (dim < 0 || dim >= static_cast<int>(std::size(primes)))
    throw std::logic_error("halton_prime: dimension out of table");
  return primes[dim];
}

inline std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed = 1469598103934665603ull) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t hash = seed;
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 1099511628211ull;
  }
  return hash;
}

inline std::string lowercase_hex(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

}  // namespace qex

#endif  // QEX_COMMON_HPP
