#pragma once

// Classical -> quantum -> classical transmission and the capacity functionals built on it.

#include <optional>
#include <string>
#include <vector>

#include "qmi/channels.hpp"
#include "qmi/entropy.hpp"
#include "qmi/mutual_entropy.hpp"
#include "qmi/optimize.hpp"

namespace qmi {

/// Coded states sigma_k, one per input letter.
class CodingScheme {
 public:
  explicit CodingScheme(std::vector<DensityOperator> states);
  int alphabet_size() const { return static_cast<int>(states_.size()); }
  int dim() const { return states_.front().dim(); }
  const std::vector<DensityOperator>& states() const { return states_; }

 private:
  std::vector<DensityOperator> states_;
};

struct CqcInstance {
  ProbabilityVector lambda;
  CodingScheme coding;
  KrausChannel channel;
  Povm decoding;

  /// Throws DimensionError unless coding dim = channel input and decoding acts on the channel output.
  void validate() const;
};

/// Sum_k lambda_k KL(decode(ch sigma_k) || decode(ch sigma)), cross-checked against the entropy-difference form.
EntropyValue cqc_mutual_entropy(const CqcInstance& inst);

/// Output distribution of letter k and of the mixture, for inspection.
std::vector<std::vector<double>> cqc_transition(const CodingScheme& coding, const KrausChannel& ch, const Povm& decoding);

/// Input states searched by the quantum capacities.
struct StateFamily {
  enum class Kind { Full, Rank, Diagonal };
  Kind kind = Kind::Full;
  /// Used by Kind::Rank.
  int rank = 0;

  static StateFamily full() { return {}; }
  static StateFamily of_rank(int r) { return {Kind::Rank, r}; }
  static StateFamily diagonal() { return {Kind::Diagonal, 0}; }
};

std::string to_string(StateFamily::Kind kind);

/// rho = sum_j softmax(t)_j |u_j><u_j| with U = polar(Z); Z is dim x r, or U = I for the diagonal family.
std::size_t state_param_count(int dim, const StateFamily& family);
DensityOperator state_from_params(std::span<const double> params, int dim, const StateFamily& family);
/// Parameters of the maximally mixed member of the family (Z = [I; 0], t = 0).
RealVector state_params_center(int dim, const StateFamily& family);
/// Parameters that reproduce rho (which must belong to the family) exactly.
RealVector state_params_for(const DensityOperator& rho, const StateFamily& family);
/// sup S(rho) over the family: ln d, or ln r for rank-limited states.
double family_entropy_bound(int dim, const StateFamily& family);

enum class CqcMode { Fixed, CodingFree, CodingDecodingFree };
std::string to_string(CqcMode mode);

struct CapacityReport {
  EntropyValue value;
  bool converged = false;
  bool feasible = true;
  long evals = 0;
  std::string mode;
  /// Upper bound from the inequality chain (sup S or sup H).
  double bound = 0.0;
  std::optional<DensityOperator> input_state;
  std::vector<double> weights;
  std::vector<DensityOperator> states;
  std::vector<ComplexMatrix> effects;
  /// Search coordinates of the maximizer.
  RealVector params;
};

struct CapacityOptions {
  StateFamily family;
  /// Budget of the Schatten search at each outer evaluation (degenerate inputs only).
  SearchBudget inner{2, 120, 1234, 1e-9};
};

/// sup over the family of the Ohya mutual entropy.
CapacityReport quantum_capacity(const KrausChannel& ch, const SearchBudget& budget = {},
                                const CapacityOptions& options = {});

/// sup over the family of the pseudo-mutual entropy; seeded at the quantum_capacity maximizer.
/// n_components <= 0 selects the input dimension.
CapacityReport pseudo_capacity(const KrausChannel& ch, int n_components = 0, const SearchBudget& budget = {},
                               const CapacityOptions& options = {}, const CapacityReport* seed = nullptr);

struct CqcOptions {
  /// CodingFree and CodingDecodingFree: mixed coded states instead of pure ones.
  bool mixed_coding = false;
  /// CodingDecodingFree: number of POVM outcomes; 0 keeps the given decoding's count.
  int outcomes = 0;
  /// CodingDecodingFree: restrict the decoding to projective measurements.
  bool projective_only = false;
};

/// Capacity of the C-Q-C pipeline with the given channel. `inst.lambda` is only a starting point.
/// `seed`, when present, is a report from a less free mode whose maximizer is tried first.
CapacityReport cqc_capacity(const CqcInstance& inst, CqcMode mode, const SearchBudget& budget = {},
                            const CqcOptions& options = {}, const CapacityReport* seed = nullptr);

/// All three modes, each seeded from the one before, so the values are ordered by construction.
std::vector<CapacityReport> cqc_capacity_chain(const CqcInstance& inst, const SearchBudget& budget = {},
                                               const CqcOptions& options = {});

std::vector<double> softmax(std::span<const double> t);

}  // namespace qmi
