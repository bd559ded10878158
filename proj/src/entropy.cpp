#include "qmi/entropy.hpp"

#include <cmath>
#include <numbers>

namespace qmi {

double EntropyValue::bits() const { return nats_ / std::numbers::ln2; }

double entropy_of_psd(const ComplexMatrix& p, double zero_tol) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(p), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lam = es.eigenvalues()(i);
    if (lam > zero_tol) s -= lam * std::log(lam);
  }
  return s;
}

EntropyValue von_neumann_entropy(const DensityOperator& rho) {
  return EntropyValue(std::max(0.0, entropy_of_psd(rho.matrix())));
}

EntropyValue relative_entropy_psd(const ComplexMatrix& rho, const ComplexMatrix& sigma, double zero_tol,
                                  double support_tol) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols() || rho.rows() != rho.cols()) {
    throw DimensionError("relative entropy: operand dimensions differ");
  }
  const EigenPairs sig = eigh_descending(sigma);
  // tr rho ln sigma and the kernel mass in one pass over sigma's eigenbasis.
  double cross = 0.0;
  double kernel_mass = 0.0;
  for (Eigen::Index j = 0; j < sig.values.size(); ++j) {
    const double weight = sig.vectors.col(j).dot(rho * sig.vectors.col(j)).real();
    if (sig.values(j) > zero_tol) {
      cross += weight * std::log(sig.values(j));
    } else {
      kernel_mass += weight;
    }
  }
  if (kernel_mass > support_tol) return EntropyValue::infinity();
  const double self = -entropy_of_psd(rho, zero_tol);
  return EntropyValue(self - cross);
}

EntropyValue umegaki_relative_entropy(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim()) throw DimensionError("umegaki_relative_entropy: dimension mismatch");
  const EntropyValue s = relative_entropy_psd(rho.matrix(), sigma.matrix());
  return s.is_finite() ? EntropyValue(std::max(0.0, s.nats())) : s;
}

double shannon_of(std::span<const double> p) {
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * std::log(x);
  return h;
}

EntropyValue shannon_entropy(const ProbabilityVector& p) { return EntropyValue(shannon_of(p.probs())); }

double kl_of(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DimensionError("kl_divergence: length mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    d += p[i] * std::log(p[i] / q[i]);
  }
  return d;
}

EntropyValue kl_divergence(const ProbabilityVector& p, const ProbabilityVector& q) {
  const double d = kl_of(p.probs(), q.probs());
  return std::isinf(d) ? EntropyValue::infinity() : EntropyValue(std::max(0.0, d));
}

}  // namespace qmi
