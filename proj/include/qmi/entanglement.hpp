#pragma once

// Entangling operators, the q/d/c hierarchy of compound states, and entanglement-based entropies.

#include <optional>
#include <string>
#include <vector>

#include "qmi/capacity.hpp"
#include "qmi/channels.hpp"
#include "qmi/entropy.hpp"
#include "qmi/mutual_entropy.hpp"
#include "qmi/optimize.hpp"

namespace qmi {

/// kappa: G -> F (x) K, stored as one vector per G-basis vector |n> (basis column n).
/// Entry (f, k) of kappa_n sits at index f * k_dim + k.
struct EntanglingOperator {
  std::vector<ComplexVector> kappa;
  /// Orthonormal G-basis, one column per kappa_n, in the computational basis of G.
  ComplexMatrix basis;
  int g_dim = 0;
  int f_dim = 0;
  int k_dim = 0;

  /// kappa_n as a k_dim x f_dim matrix.
  ComplexMatrix amplitude(int n) const;
  /// tr_F kappa_n kappa_m^dagger, a k_dim x k_dim operator.
  ComplexMatrix block(int n, int m) const;
  /// Gram matrix, entry (n, m) = <kappa_m | kappa_n>.
  ComplexMatrix gram() const;
  /// sum_n ||kappa_n||^2.
  double normalization() const;
  /// Compound density on G (x) K in the computational basis, reassembled from the blocks.
  ComplexMatrix compound() const;
};

enum class EntanglementClass { q, d, c };
std::string to_string(EntanglementClass c);
EntanglementClass entanglement_class_from(const std::string& s);

struct ClassificationReport {
  EntanglementClass cls = EntanglementClass::c;
  /// Largest Frobenius norm of an off-diagonal block in the G eigenbasis.
  double off_diag_norm = 0.0;
  /// Largest operator norm of [w_n, w_m] over normalized diagonal blocks.
  double max_commutator = 0.0;
};

namespace tol {
inline constexpr double kOffDiagonal = 1e-8;
inline constexpr double kCommutator = 1e-8;
}  // namespace tol

struct EntangledCompound {
  CompoundState compound;
  EntanglementClass cls;
  std::optional<EntanglingOperator> kappa;
};

/// Entangling operator of a bipartite state, with |n> the canonical eigenbasis of tr_K theta.
EntanglingOperator entangling_from_state(const DensityOperator& theta, int d_g, int d_k);
/// Same, in a caller-chosen orthonormal G-basis (for testing weak orthogonality against other bases).
EntanglingOperator entangling_in_basis(const DensityOperator& theta, int d_g, int d_k, const ComplexMatrix& basis);

/// max |Gram(n, m) - p_n delta_nm|, p the eigenvalues of tr_K theta in basis order.
double weak_orthogonality_defect(const EntanglingOperator& kappa, const std::vector<double>& p);
/// max over n != m of ||tr_F kappa_n kappa_m^dagger||_F.
double strong_orthogonality_defect(const EntanglingOperator& kappa);

/// phi(A) = sum_{m,n} |m> kappa_m^dagger (I (x) A) kappa_n <n|, an operator on G.
ComplexMatrix phi(const EntanglingOperator& kappa, const ComplexMatrix& a);
/// phi_*(B) = sum_{n,m} <n|B|m> tr_F kappa_n kappa_m^dagger, an operator on K.
ComplexMatrix phi_star(const EntanglingOperator& kappa, const ComplexMatrix& b);

EntangledCompound standard_entanglement(const DensityOperator& sigma);
EntangledCompound d_compound(const ProbabilityVector& p, const std::vector<DensityOperator>& omegas);

ClassificationReport classify_compound(const DensityOperator& theta, int d_g, int d_k);
EntangledCompound make_entangled_compound(const DensityOperator& theta, int d_g, int d_k);

/// S(theta, rho (x) sigma). A support failure means a kernel was misjudged and raises ConsistencyError.
EntropyValue entangled_mutual_entropy(const CompoundState& theta);

struct QBlock {
  double mu;
  DensityOperator sigma;  // normalized
};
/// sum_i (mu_i ln mu_i - 2 tr s_i ln s_i) with s_i = mu_i sigma_i.
EntropyValue q_entropy_closed_form(const std::vector<QBlock>& blocks);

struct QEntropySearch {
  EntropyValue value;
  EntropyValue closed_form;
  bool converged = false;
  long evals = 0;
  std::optional<DensityOperator> maximizer;
};
/// sup of the entangled mutual entropy over compounds with output marginal sigma.
/// G has the dimension of K; the purifying space has dimension f_dim.
QEntropySearch q_entropy_sup(const DensityOperator& sigma, const SearchBudget& budget = {}, int f_dim = 2);

struct Disentanglement {
  double h_sigma;
  double mutual;
  double conditional;
  double degree;
};
Disentanglement conditional_and_degree(const CompoundState& theta);

struct ClassMutualOptions {
  /// Purifying space for q; 0 selects d_G * d_K.
  int f_dim = 0;
  /// Constrain only the two marginals instead of fixing the diagonal blocks to ch(|n><n|).
  bool relaxed = false;
  PenaltySchedule schedule{};
};

struct ClassMutualResult {
  EntropyValue value;
  EntanglementClass cls = EntanglementClass::q;
  bool converged = false;
  bool feasible = true;
  double violation = 0.0;
  long evals = 0;
  std::optional<DensityOperator> compound;
  /// Search coordinates of the maximizer (Schatten block parameters first).
  RealVector params;
};

/// Class-constrained mutual entropy I_x(rho, ch). The c class can be empty; the result is then 0 with feasible=false.
ClassMutualResult class_mutual_entropy(const DensityOperator& rho, const KrausChannel& ch, EntanglementClass cls,
                                       const SearchBudget& budget = {}, const ClassMutualOptions& options = {},
                                       const ClassMutualResult* seed = nullptr);

/// I_c, I_d, I_q computed in that order, each seeded from the previous one.
std::vector<ClassMutualResult> class_mutual_chain(const DensityOperator& rho, const KrausChannel& ch,
                                                  const SearchBudget& budget = {},
                                                  const ClassMutualOptions& options = {});

struct ClassCapacityOptions {
  ClassMutualOptions mutual{};
  StateFamily family{};
  /// Budget of the class-constrained search at every outer evaluation.
  SearchBudget inner{2, 200, 1234, 1e-9};
};

/// C_x = sup over input states of I_x. `seed`, when given, supplies an input state tried first.
CapacityReport class_capacity(const KrausChannel& ch, EntanglementClass cls, const SearchBudget& budget = {},
                              const ClassCapacityOptions& options = {}, const CapacityReport* seed = nullptr);

/// C_c, C_d, C_q, each seeded from the previous maximizer.
std::vector<CapacityReport> class_capacity_chain(const KrausChannel& ch, const SearchBudget& budget = {},
                                                 const ClassCapacityOptions& options = {});

}  // namespace qmi
