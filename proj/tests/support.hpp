#pragma once

#include <cmath>

#include <doctest.h>

#include "qmi/operator_core.hpp"
#include "qmi/random.hpp"

namespace qmi::testing {

inline double frob(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).norm(); }

inline ComplexMatrix diag(std::initializer_list<double> values) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(values.size()),
                                        static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

inline ComplexVector ket(std::initializer_list<Complex> amps) {
  ComplexVector v(static_cast<Eigen::Index>(amps.size()));
  Eigen::Index i = 0;
  for (Complex a : amps) v(i++) = a;
  return v;
}

inline ComplexMatrix bell_phi_plus() {
  const ComplexVector v = ket({1.0, 0.0, 0.0, 1.0}) / std::sqrt(2.0);
  return v * v.adjoint();
}

/// Binary entropy in nats.
inline double h2(double p) {
  double h = 0.0;
  if (p > 0) h -= p * std::log(p);
  if (p < 1) h -= (1 - p) * std::log(1 - p);
  return h;
}

}  // namespace qmi::testing
