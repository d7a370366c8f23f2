#ifndef QEX_TEST_SUPPORT_HPP
#define QEX_TEST_SUPPORT_HPP

#include <random>

#include "qex/common.hpp"

namespace qex::testing {

inline CMatrix random_complex(int d, std::mt19937& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = cxd(normal(rng), normal(rng));
  return m;
}

inline CMatrix random_hermitian(int d, std::mt19937& rng) {
  CMatrix g = random_complex(d, rng);
  return 0.5 * (g + g.adjoint());
}

inline CMatrix random_density(int d, std::mt19937& rng) {
  CMatrix g = random_complex(d, rng);
  CMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

inline CMatrix random_unitary(int d, std::mt19937& rng) {
  CMatrix g = random_complex(d, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    const cxd diag = r(i, i);
    if (std::abs(diag) > 0) q.col(i) *= diag / std::abs(diag);
  }
  return q;
}

}  // namespace qex::testing

#endif  // QEX_TEST_SUPPORT_HPP
