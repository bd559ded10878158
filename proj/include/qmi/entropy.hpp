#pragma once

#include <limits>

#include "qmi/operator_core.hpp"

namespace qmi {

/// Entropy in nats. Relative entropies may be the distinguished +infinity.
class EntropyValue {
 public:
  constexpr EntropyValue() = default;
  constexpr explicit EntropyValue(double nats) : nats_(nats) {}
  static constexpr EntropyValue infinity() { return EntropyValue(std::numeric_limits<double>::infinity()); }

  constexpr double nats() const { return nats_; }
  double bits() const;
  constexpr bool is_finite() const { return nats_ < std::numeric_limits<double>::infinity(); }

 private:
  double nats_ = 0.0;
};

namespace tol {
/// Probability mass of rho on the numerical kernel of sigma above which S(rho, sigma) = +inf.
inline constexpr double kSupport = 1e-9;
}  // namespace tol

EntropyValue von_neumann_entropy(const DensityOperator& rho);
/// -sum lambda ln lambda over eigenvalues of any PSD matrix (trace need not be 1).
double entropy_of_psd(const ComplexMatrix& p, double zero_tol = tol::kZero);

EntropyValue umegaki_relative_entropy(const DensityOperator& rho, const DensityOperator& sigma);
/// Same functional on arbitrary PSD operands; rho is not renormalized.
EntropyValue relative_entropy_psd(const ComplexMatrix& rho, const ComplexMatrix& sigma,
                                  double zero_tol = tol::kZero, double support_tol = tol::kSupport);

EntropyValue shannon_entropy(const ProbabilityVector& p);
double shannon_of(std::span<const double> p);

EntropyValue kl_divergence(const ProbabilityVector& p, const ProbabilityVector& q);
double kl_of(std::span<const double> p, std::span<const double> q);

}  // namespace qmi
