#pragma once

// Dense complex linear algebra and the state types shared by every module.

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qmi {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace tol {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kPsd = 1e-10;
inline constexpr double kTrace = 1e-10;
/// Relative to max(1, |largest eigenvalue|).
inline constexpr double kDegeneracy = 1e-8;
/// Kernel detection for logs, supports and rank counts.
inline constexpr double kZero = 1e-12;
inline constexpr double kProbabilitySum = 1e-12;
}  // namespace tol

inline std::span<const double> as_span(const RealVector& x) {
  return {x.data(), static_cast<std::size_t>(x.size())};
}

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input violates a documented precondition (not a state, bad parameter, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two algebraically equivalent routes disagreed beyond tolerance.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Positive semidefinite, unit-trace, Hermitian matrix. Immutable once built.
class DensityOperator {
 public:
  /// Validates and stores the Hermitian part of `m`. Throws InvalidArgument.
  explicit DensityOperator(ComplexMatrix m);

  static DensityOperator maximally_mixed(int dim);
  static DensityOperator pure(const ComplexVector& psi);
  static DensityOperator diagonal(std::span<const double> probs);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  ComplexMatrix m_;
};

class ProbabilityVector {
 public:
  explicit ProbabilityVector(std::vector<double> probs);
  static ProbabilityVector uniform(int n);

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& probs() const { return p_; }

 private:
  std::vector<double> p_;
};

/// Eigenvalues grouped into degenerate blocks, descending.
struct SpectralDecomposition {
  std::vector<double> eigenvalues;
  std::vector<int> multiplicities;
  std::vector<ComplexMatrix> projectors;
  /// Orthonormal columns spanning each block, as returned by the eigensolver.
  std::vector<ComplexMatrix> bases;

  ComplexMatrix reconstruct() const;
};

/// rho = sum_k weights[k] |v_k><v_k| with orthonormal v_k.
struct SchattenDecomposition {
  std::vector<double> weights;
  std::vector<ComplexVector> vectors;

  ComplexMatrix reconstruct() const;
  /// Columns are the vectors, in order.
  ComplexMatrix basis() const;
};

struct Purification {
  /// Unit vector in (state space) ⊗ (ancilla), ancilla index fastest.
  ComplexVector psi;
  int ancilla_dim = 0;
};

enum class Keep { First, Second };

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// Marginal of a (d_first*d_second)-square operator on the kept factor.
ComplexMatrix partial_trace(const ComplexMatrix& theta, int d_first, int d_second, Keep keep);

double max_hermitian_defect(const ComplexMatrix& m);
ComplexMatrix hermitian_part(const ComplexMatrix& m);

SpectralDecomposition spectral(const ComplexMatrix& h, double degeneracy_tol = tol::kDegeneracy);

SchattenDecomposition canonical_schatten(const DensityOperator& rho);

/// Number of real parameters accepted by schatten_family for this state.
std::size_t schatten_param_count(const DensityOperator& rho);

/// Number of parameters that actually move the decomposition (blocks with positive weight).
std::size_t schatten_active_param_count(const DensityOperator& rho);

/// Canonical decomposition with every degenerate block rotated by exp(i H(params)).
SchattenDecomposition schatten_family(const DensityOperator& rho, std::span<const double> params);

ComplexMatrix matrix_log_on_support(const ComplexMatrix& p, double zero_tol = tol::kZero);
ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& p);
/// Pseudo-inverse square root; zero on the numerical kernel.
ComplexMatrix matrix_inv_sqrt_on_support(const ComplexMatrix& p, double zero_tol = tol::kZero);
ComplexMatrix matrix_exp_hermitian(const ComplexMatrix& h);

Purification purify(const DensityOperator& theta, double zero_tol = tol::kZero);

/// m x m Hermitian matrix from m^2 reals: diagonal first, then (re, im) of the upper triangle.
ComplexMatrix hermitian_from_params(std::span<const double> params, int m);
ComplexMatrix unitary_from_params(std::span<const double> params, int m);

/// Z (Z^dagger Z)^{-1/2}, the closest isometry to a full-column-rank Z.
ComplexMatrix polar_isometry(const ComplexMatrix& z);

/// Multiplies v by a phase so its first component with |c| > 1e-8 is real positive.
ComplexVector phase_fixed(ComplexVector v);

/// Numerical rank of a PSD matrix.
int numerical_rank(const ComplexMatrix& p, double zero_tol = tol::kZero);

/// Hermitian eigen-decomposition, eigenvalues descending.
struct EigenPairs {
  RealVector values;
  ComplexMatrix vectors;
};
EigenPairs eigh_descending(const ComplexMatrix& h);

}  // namespace qmi
