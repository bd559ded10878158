#pragma once

// Completely positive trace-preserving maps and the classical <-> quantum embeddings.

#include <variant>
#include <vector>

#include "qmi/operator_core.hpp"
#include "qmi/random.hpp"

namespace qmi {

namespace tol {
inline constexpr double kTracePreserving = 1e-9;
inline constexpr double kIsometry = 1e-9;
inline constexpr double kPovmSum = 1e-9;
inline constexpr double kChoiPsd = 1e-9;
}  // namespace tol

/// rho -> sum_i K_i rho K_i^dagger with sum_i K_i^dagger K_i = I.
class KrausChannel {
 public:
  KrausChannel(int in_dim, int out_dim, std::vector<ComplexMatrix> ops);

  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }
  const std::vector<ComplexMatrix>& ops() const { return ops_; }

  /// The linear extension to arbitrary in_dim-square operators.
  ComplexMatrix apply_matrix(const ComplexMatrix& x) const;
  DensityOperator apply(const DensityOperator& rho) const;

  double trace_preservation_defect() const;

 private:
  int in_dim_;
  int out_dim_;
  std::vector<ComplexMatrix> ops_;
};

/// `second` after `first`.
KrausChannel compose(const KrausChannel& second, const KrausChannel& first);

/// Isometry G -> F1 ⊗ K; row index = noise * d_out + out.
class StinespringIsometry {
 public:
  StinespringIsometry(ComplexMatrix isometry, int d_noise, int d_out);

  const ComplexMatrix& isometry() const { return v_; }
  int d_noise() const { return d_noise_; }
  int d_out() const { return d_out_; }
  int d_in() const { return static_cast<int>(v_.cols()); }

 private:
  ComplexMatrix v_;
  int d_noise_;
  int d_out_;
};

DensityOperator stinespring_apply(const StinespringIsometry& st, const DensityOperator& rho);
KrausChannel stinespring_to_kraus(const StinespringIsometry& st);
StinespringIsometry kraus_to_stinespring(const KrausChannel& ch);

class Povm {
 public:
  explicit Povm(std::vector<ComplexMatrix> effects);
  /// Rank-one projectors onto the columns of a unitary.
  static Povm projective(const ComplexMatrix& basis);
  static Povm computational(int dim);

  const std::vector<ComplexMatrix>& effects() const { return effects_; }
  int dim() const { return static_cast<int>(effects_.front().rows()); }
  int outcomes() const { return static_cast<int>(effects_.size()); }
  /// Born-rule outcome distribution tr(sigma M_j), clipped at zero.
  std::vector<double> probabilities(const ComplexMatrix& sigma) const;

 private:
  std::vector<ComplexMatrix> effects_;
};

ComplexMatrix choi_matrix(const KrausChannel& ch);

namespace channel_kind {
struct Identity { int dim; };
/// (1 - p) rho + p I/d
struct Depolarizing { int dim; double p; };
/// Qubit: K0 = diag(1, sqrt(1-g)), K1 = sqrt(g)|0><1|.
struct AmplitudeDamping { double gamma; };
/// (1 - lambda) rho + lambda diag(rho) in the computational basis.
struct PhaseDamping { int dim; double lambda; };
struct Unitary { ComplexMatrix u; };
/// |k><k| -> states[k]; off-diagonal input coherences are discarded.
struct ClassicalQuantum { std::vector<DensityOperator> states; };
/// sigma -> diag(tr sigma M_j).
struct Measure { Povm povm; };
/// transition[k][j] = P(j | k).
struct Classical { std::vector<std::vector<double>> transition; };
/// Every input is replaced by `state`.
struct Constant { int in_dim; DensityOperator state; };
}  // namespace channel_kind

using ChannelSpec =
    std::variant<channel_kind::Identity, channel_kind::Depolarizing, channel_kind::AmplitudeDamping,
                 channel_kind::PhaseDamping, channel_kind::Unitary, channel_kind::ClassicalQuantum,
                 channel_kind::Measure, channel_kind::Classical, channel_kind::Constant>;

KrausChannel make_channel(const ChannelSpec& spec);

KrausChannel identity_channel(int dim);
KrausChannel depolarizing_channel(int dim, double p);
KrausChannel amplitude_damping_channel(double gamma);
KrausChannel phase_damping_channel(int dim, double lambda);
KrausChannel unitary_channel(const ComplexMatrix& u);
KrausChannel cq_channel(const std::vector<DensityOperator>& states);
KrausChannel measurement_channel(const Povm& povm);
KrausChannel classical_channel(const std::vector<std::vector<double>>& transition);
KrausChannel constant_channel(int in_dim, const DensityOperator& state);

DensityOperator to_diagonal_state(const ProbabilityVector& p);
ProbabilityVector diagonal_distribution(const DensityOperator& rho);
/// True if every |k><k| maps to a diagonal state (off-diagonal magnitude <= tol).
bool is_classical(const KrausChannel& ch, double tol = 1e-10);

}  // namespace qmi

namespace qmi {

/// Random CPTP map from a Haar-like Stinespring isometry with `n_kraus` noise levels,
/// raised to ceil(in_dim / out_dim) when smaller.
KrausChannel random_channel(int in_dim, int out_dim, int n_kraus, Rng& rng);

/// Random d-outcome POVM on `dim`, via the normalized-Ginibre construction.
Povm random_povm(int dim, int outcomes, Rng& rng);

}  // namespace qmi
