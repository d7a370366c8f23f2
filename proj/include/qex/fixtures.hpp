#ifndef QEX_FIXTURES_HPP
#define QEX_FIXTURES_HPP

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qex/common.hpp"

// Named parametrized operator families used by the fixture files, the CLI
// sweep mode, and the test suites.

namespace qex::fixtures {

// H = (1/2) [[h0+h3, h1-i h2], [h1+i h2, h0-h3]].
inline CMatrix qubit_generic(double h0, double h1, double h2, double h3) {
  CMatrix h(2, 2);
  h << cxd(0.5 * (h0 + h3), 0.0), cxd(0.5 * h1, -0.5 * h2),
       cxd(0.5 * h1, 0.5 * h2), cxd(0.5 * (h0 - h3), 0.0);
  return h;
}

// Two-mode condensate / two-qubit exchange Hamiltonian b Jz^2 + c Jx, j=1.
inline CMatrix qutrit_bec(double b, double c) {
  const double s = c / std::sqrt(2.0);
  CMatrix h(3, 3);
  h << cxd(b, 0), cxd(s, 0), cxd(0, 0),
       cxd(s, 0), cxd(0, 0), cxd(s, 0),
       cxd(0, 0), cxd(s, 0), cxd(b, 0);
  return h;
}

// Fixed 3x3 operator with a doubly degenerate eigenvalue 4/3 (and 20/3).
inline CMatrix qutrit_degenerate() {
  CMatrix h(3, 3);
  h << cxd(2, 0), cxd(-1, 1), cxd(-1, -1.0 / 3.0),
       cxd(-1, -1), cxd(13.0 / 3.0, 0), cxd(1, 2),
       cxd(-1, 1.0 / 3.0), cxd(1, -2), cxd(3, 0);
  return h;
}

// 4x4 family; delta couples the first two levels and delta=0 degenerates
// the spectrum into two pairs.
inline CMatrix quartit_example(double a, double b, double delta) {
  CMatrix h(4, 4);
  h << cxd(a, 0), cxd(delta, 0), cxd(b, a), cxd(b, a),
       cxd(delta, 0), cxd(a, 0), cxd(-b, a), cxd(b, -a),
       cxd(b, -a), cxd(-b, -a), cxd(b, 0), cxd(0, 0),
       cxd(b, -a), cxd(b, a), cxd(0, 0), cxd(b, 0);
  return h;
}

struct Family {
  std::vector<std::string> parameter_names;
  std::map<std::string, double> defaults;
  std::function<CMatrix(const std::map<std::string, double>&)> build;
};

inline const std::map<std::string, Family>& registry() {
  static const std::map<std::string, Family> families = {
      {"qubit_generic",
       {{"h0", "h1", "h2", "h3"},
        {{"h0", 0.0}, {"h1", 1.0}, {"h2", 1.0}, {"h3", 1.0}},
        [](const std::map<std::string, double>& p) {
          return qubit_generic(p.at("h0"), p.at("h1"), p.at("h2"), p.at("h3"));
        }}},
      {"qutrit_bec",
       {{"b", "c"},
        {{"b", 1.0}, {"c", 1.0}},
        [](const std::map<std::string, double>& p) { return qutrit_bec(p.at("b"), p.at("c")); }}},
      {"qutrit_degenerate",
       {{},
        {},
        [](const std::map<std::string, double>&) { return qutrit_degenerate(); }}},
      {"quartit_example",
       {{"a", "b", "delta"},
        {{"a", 1.0}, {"b", 0.5}, {"delta", 0.25}},
        [](const std::map<std::string, double>& p) {
          return quartit_example(p.at("a"), p.at("b"), p.at("delta"));
        }}},
  };
  return families;
}

}  // namespace qex::fixtures

#endif  // QEX_FIXTURES_HPP
