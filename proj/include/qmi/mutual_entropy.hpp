#pragma once

#include <vector>

#include "qmi/channels.hpp"
#include "qmi/entropy.hpp"
#include "qmi/optimize.hpp"

namespace qmi {

/// Bipartite state on input ⊗ output with its two marginals.
class CompoundState {
 public:
  CompoundState(DensityOperator theta, int d_in, int d_out);

  const DensityOperator& theta() const { return theta_; }
  int d_in() const { return d_in_; }
  int d_out() const { return d_out_; }
  const DensityOperator& input_marginal() const { return input_; }
  const DensityOperator& output_marginal() const { return output_; }

 private:
  DensityOperator theta_;
  int d_in_;
  int d_out_;
  DensityOperator input_;
  DensityOperator output_;
};

/// theta = sum_k lambda_k E_k ⊗ ch(E_k). Throws InvalidArgument if `dec` does not decompose rho.
CompoundState compound_state(const DensityOperator& rho, const KrausChannel& ch, const SchattenDecomposition& dec);

struct MutualEntropyTerms {
  /// S(theta_E, rho ⊗ ch(rho)).
  EntropyValue compound_form;
  /// sum_k lambda_k S(ch(E_k), ch(rho)); the returned value.
  EntropyValue ensemble_form;
  bool agree = true;
};

namespace tol {
inline constexpr double kFormAgreement = 1e-7;
inline constexpr double kFormFailure = 1e-6;
}  // namespace tol

/// Both forms at one decomposition. Throws ConsistencyError if they differ by more than 1e-6.
MutualEntropyTerms mutual_entropy_fixed(const DensityOperator& rho, const KrausChannel& ch,
                                        const SchattenDecomposition& dec);

/// Ensemble form only, without validation. Weights <= zero_tol are skipped.
double ensemble_mutual_entropy(const ComplexMatrix& output, const KrausChannel& ch,
                               const SchattenDecomposition& dec);

struct OhyaResult {
  EntropyValue value;
  SchattenDecomposition decomposition;
  bool converged = true;
  bool searched = false;
  long evals = 1;
  long numerical_events = 0;
};

/// Supremum over Schatten decompositions. A state without positive degenerate eigenvalues has a
/// unique decomposition and is evaluated once. `starts` seed the block-rotation parameters
/// (length schatten_active_param_count(rho)).
OhyaResult ohya_mutual_entropy(const DensityOperator& rho, const KrausChannel& ch, const SearchBudget& budget = {},
                               const std::vector<StartPoint>& starts = {});

/// Input distribution through a channel that keeps diagonal states diagonal.
/// Throws InvalidArgument for non-classical channels, ConsistencyError if the divergence and
/// entropy-difference forms disagree beyond 1e-8.
EntropyValue classical_mutual_entropy(const ProbabilityVector& lambda, const KrausChannel& ch);

struct PseudoResult {
  EntropyValue value;
  std::vector<double> weights;
  std::vector<DensityOperator> components;
  bool converged = false;
  long evals = 0;
};

/// Sup of sum_k lambda_k S(ch(rho_k), ch(rho)) over decompositions rho = sum_k lambda_k rho_k into
/// n_components states. Decompositions are parameterized as lambda_k rho_k = rho^{1/2} M_k rho^{1/2}
/// with {M_k} a POVM; the search is seeded at the optimal orthogonal decomposition.
PseudoResult pseudo_mutual_entropy(const DensityOperator& rho, const KrausChannel& ch, int n_components,
                                   const SearchBudget& budget = {});

/// S(ch(sigma)) - sum_k lambda_k S(ch(sigma_k)), sigma = sum_k lambda_k sigma_k.
EntropyValue holevo_bound(const ProbabilityVector& lambda, const std::vector<DensityOperator>& coded,
                          const KrausChannel& ch);

/// Effects W^dagger B_k^dagger B_k W with W = (sum_k B_k^dagger B_k)^{-1/2}; params hold n d x d
/// complex matrices as interleaved (re, im), row-major. Valid for any parameter vector.
/// Decomposition rho = sum_k rho^{1/2} M_k rho^{1/2} evaluated as sum_k lambda_k S(ch(rho_k), ch(rho)).
/// Returns +infinity if a term is infinite.
double pseudo_value(const ComplexMatrix& rho_sqrt, const ComplexMatrix& output, const KrausChannel& ch,
                    const std::vector<ComplexMatrix>& effects);

/// Projectors onto an orthogonal decomposition, surplus vectors merged into the last of `n` effects.
std::vector<ComplexMatrix> merged_projectors(const SchattenDecomposition& dec, int n);

std::vector<ComplexMatrix> povm_from_params(std::span<const double> params, int dim, int outcomes);
std::size_t povm_param_count(int dim, int outcomes);
/// Parameters reproducing a given POVM exactly (B_k = M_k^{1/2}).
RealVector povm_params_for(const std::vector<ComplexMatrix>& effects);

}  // namespace qmi
