#include "qmi/mutual_entropy.hpp"

#include <cmath>
#include <numeric>

namespace qmi {

namespace {

DensityOperator marginal(const ComplexMatrix& theta, int d_in, int d_out, Keep keep) {
  ComplexMatrix m = hermitian_part(partial_trace(theta, d_in, d_out, keep));
  m /= m.trace().real();
  return DensityOperator(std::move(m));
}

void require_decomposes(const DensityOperator& rho, const SchattenDecomposition& dec) {
  if (dec.vectors.empty() || dec.vectors.front().size() != rho.dim()) {
    throw DimensionError("decomposition dimension does not match the state");
  }
  const double err = (dec.reconstruct() - rho.matrix()).norm();
  if (err > 1e-8) {
    throw InvalidArgument("decomposition does not reconstruct the state (Frobenius error " + std::to_string(err) + ")");
  }
}

}  // namespace

CompoundState::CompoundState(DensityOperator theta, int d_in, int d_out)
    : theta_(std::move(theta)),
      d_in_(d_in),
      d_out_(d_out),
      input_(marginal(theta_.matrix(), d_in, d_out, Keep::First)),
      output_(marginal(theta_.matrix(), d_in, d_out, Keep::Second)) {}

CompoundState compound_state(const DensityOperator& rho, const KrausChannel& ch, const SchattenDecomposition& dec) {
  if (rho.dim() != ch.in_dim()) throw DimensionError("compound_state: state and channel dimensions differ");
  require_decomposes(rho, dec);
  const int d_in = rho.dim();
  const int d_out = ch.out_dim();
  ComplexMatrix theta = ComplexMatrix::Zero(static_cast<Eigen::Index>(d_in) * d_out,
                                            static_cast<Eigen::Index>(d_in) * d_out);
  for (std::size_t k = 0; k < dec.vectors.size(); ++k) {
    if (dec.weights[k] <= 0.0) continue;
    const ComplexMatrix e = dec.vectors[k] * dec.vectors[k].adjoint();
    theta += dec.weights[k] * tensor_product(e, ch.apply_matrix(e));
  }
  theta = hermitian_part(theta);
  theta /= theta.trace().real();
  return CompoundState(DensityOperator(std::move(theta)), d_in, d_out);
}

double ensemble_mutual_entropy(const ComplexMatrix& output, const KrausChannel& ch, const SchattenDecomposition& dec) {
  double total = 0.0;
  for (std::size_t k = 0; k < dec.vectors.size(); ++k) {
    const double w = dec.weights[k];
    if (w <= tol::kZero) continue;
    const ComplexMatrix out_k = ch.apply_matrix(dec.vectors[k] * dec.vectors[k].adjoint());
    const EntropyValue s = relative_entropy_psd(out_k, output);
    if (!s.is_finite()) return std::numeric_limits<double>::infinity();
    total += w * s.nats();
  }
  return total;
}

MutualEntropyTerms mutual_entropy_fixed(const DensityOperator& rho, const KrausChannel& ch,
                                        const SchattenDecomposition& dec) {
  const CompoundState cs = compound_state(rho, ch, dec);
  const DensityOperator out = ch.apply(rho);
  MutualEntropyTerms t;
  t.compound_form = relative_entropy_psd(cs.theta().matrix(), tensor_product(rho.matrix(), out.matrix()));
  t.ensemble_form = EntropyValue(ensemble_mutual_entropy(out.matrix(), ch, dec));
  if (!t.compound_form.is_finite() || !t.ensemble_form.is_finite()) {
    throw ConsistencyError("mutual_entropy_fixed: infinite relative entropy; the compound state's range should lie "
                           "in that of the product of marginals");
  }
  const double diff = std::abs(t.compound_form.nats() - t.ensemble_form.nats());
  t.agree = diff <= tol::kFormAgreement;
  if (diff > tol::kFormFailure) {
    throw ConsistencyError("mutual_entropy_fixed: compound and ensemble forms differ by " + std::to_string(diff));
  }
  t.ensemble_form = EntropyValue(std::max(0.0, t.ensemble_form.nats()));
  return t;
}

OhyaResult ohya_mutual_entropy(const DensityOperator& rho, const KrausChannel& ch, const SearchBudget& budget,
                               const std::vector<StartPoint>& starts) {
  if (rho.dim() != ch.in_dim()) throw DimensionError("ohya_mutual_entropy: state and channel dimensions differ");
  const std::size_t total = schatten_param_count(rho);
  const std::size_t active = schatten_active_param_count(rho);
  OhyaResult res;
  if (active == 0) {
    res.decomposition = canonical_schatten(rho);
    res.value = mutual_entropy_fixed(rho, ch, res.decomposition).ensemble_form;
    return res;
  }
  // Active blocks come first in descending order, so the inactive (zero-weight) tail stays at 0.
  const ComplexMatrix output = ch.apply(rho).matrix();
  auto decomposition_at = [&](const RealVector& x) {
    std::vector<double> full(total, 0.0);
    std::copy(x.data(), x.data() + x.size(), full.begin());
    return schatten_family(rho, full);
  };
  const Objective objective = [&](const RealVector& x) {
    return ensemble_mutual_entropy(output, ch, decomposition_at(x));
  };
  std::vector<StartPoint> seeds{{RealVector::Zero(static_cast<Eigen::Index>(active)), 0.5}};
  seeds.insert(seeds.end(), starts.begin(), starts.end());
  const SearchResult sr = maximize(objective, static_cast<int>(active), budget, seeds, 1.0);
  res.searched = true;
  res.converged = sr.converged;
  res.evals = sr.evals;
  res.numerical_events = sr.numerical_events;
  res.decomposition = decomposition_at(sr.x);
  res.value = mutual_entropy_fixed(rho, ch, res.decomposition).ensemble_form;
  return res;
}

EntropyValue classical_mutual_entropy(const ProbabilityVector& lambda, const KrausChannel& ch) {
  if (static_cast<int>(lambda.size()) != ch.in_dim()) throw DimensionError("classical_mutual_entropy: length mismatch");
  if (!is_classical(ch)) throw InvalidArgument("classical_mutual_entropy: channel does not preserve diagonal states");
  const int n = ch.in_dim();
  const ComplexMatrix out = ch.apply(to_diagonal_state(lambda)).matrix();
  double divergence_form = 0.0;
  double conditional = 0.0;
  for (int k = 0; k < n; ++k) {
    if (lambda[k] <= 0.0) continue;
    ComplexMatrix delta = ComplexMatrix::Zero(n, n);
    delta(k, k) = 1.0;
    const ComplexMatrix out_k = ch.apply_matrix(delta);
    const EntropyValue s = relative_entropy_psd(out_k, out);
    if (!s.is_finite()) throw ConsistencyError("classical_mutual_entropy: output not absolutely continuous");
    divergence_form += lambda[k] * s.nats();
    std::vector<double> diag(out_k.rows());
    for (Eigen::Index j = 0; j < out_k.rows(); ++j) diag[j] = out_k(j, j).real();
    conditional += lambda[k] * shannon_of(diag);
  }
  std::vector<double> out_diag(out.rows());
  for (Eigen::Index j = 0; j < out.rows(); ++j) out_diag[j] = out(j, j).real();
  const double shannon_form = shannon_of(out_diag) - conditional;
  if (std::abs(shannon_form - divergence_form) > 1e-8) {
    throw ConsistencyError("classical_mutual_entropy: divergence and Shannon forms differ by " +
                           std::to_string(std::abs(shannon_form - divergence_form)));
  }
  return EntropyValue(std::max(0.0, divergence_form));
}

std::size_t povm_param_count(int dim, int outcomes) { return 2u * outcomes * dim * dim; }

std::vector<ComplexMatrix> povm_from_params(std::span<const double> params, int dim, int outcomes) {
  if (params.size() != povm_param_count(dim, outcomes)) throw InvalidArgument("povm_from_params: wrong length");
  std::vector<ComplexMatrix> grams;
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  std::size_t k = 0;
  for (int j = 0; j < outcomes; ++j) {
    ComplexMatrix b(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c, k += 2) b(r, c) = Complex(params[k], params[k + 1]);
    grams.emplace_back(b.adjoint() * b);
    sum += grams.back();
  }
  const ComplexMatrix w = matrix_inv_sqrt_on_support(sum, 1e-14);
  for (auto& g : grams) g = hermitian_part(w * g * w);
  return grams;
}

RealVector povm_params_for(const std::vector<ComplexMatrix>& effects) {
  const int dim = static_cast<int>(effects.front().rows());
  RealVector x(static_cast<Eigen::Index>(povm_param_count(dim, static_cast<int>(effects.size()))));
  Eigen::Index k = 0;
  for (const auto& m : effects) {
    const ComplexMatrix b = matrix_sqrt_psd(m);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) {
        x(k++) = b(r, c).real();
        x(k++) = b(r, c).imag();
      }
  }
  return x;
}

namespace {

std::vector<ComplexMatrix> pieces_from(const ComplexMatrix& root, const std::vector<ComplexMatrix>& effects) {
  std::vector<ComplexMatrix> out;
  out.reserve(effects.size());
  for (const auto& m : effects) out.emplace_back(hermitian_part(root * m * root));
  return out;
}

}  // namespace

double pseudo_value(const ComplexMatrix& rho_sqrt, const ComplexMatrix& output, const KrausChannel& ch,
                    const std::vector<ComplexMatrix>& effects) {
  double total = 0.0;
  for (const auto& x : pieces_from(rho_sqrt, effects)) {
    const double w = x.trace().real();
    if (w <= tol::kZero) continue;
    const EntropyValue s = relative_entropy_psd(ch.apply_matrix(x) / w, output);
    if (!s.is_finite()) return std::numeric_limits<double>::infinity();
    total += w * s.nats();
  }
  return total;
}

std::vector<ComplexMatrix> merged_projectors(const SchattenDecomposition& dec, int n) {
  const Eigen::Index d = dec.vectors.front().size();
  std::vector<ComplexMatrix> out(n, ComplexMatrix::Zero(d, d));
  for (std::size_t k = 0; k < dec.vectors.size(); ++k) {
    out[std::min<std::size_t>(k, n - 1)] += dec.vectors[k] * dec.vectors[k].adjoint();
  }
  return out;
}

PseudoResult pseudo_mutual_entropy(const DensityOperator& rho, const KrausChannel& ch, int n_components,
                                   const SearchBudget& budget) {
  if (n_components < 1) throw InvalidArgument("pseudo_mutual_entropy: n_components must be >= 1");
  if (rho.dim() != ch.in_dim()) throw DimensionError("pseudo_mutual_entropy: state and channel dimensions differ");
  const int d = rho.dim();
  const ComplexMatrix root = matrix_sqrt_psd(rho.matrix());
  const ComplexMatrix output = ch.apply(rho).matrix();

  // Seed: the best orthogonal decomposition, surplus projectors merged into the last component.
  const OhyaResult ohya = ohya_mutual_entropy(rho, ch, budget);
  const Objective objective = [&](const RealVector& x) {
    return pseudo_value(root, output, ch, povm_from_params(as_span(x), d, n_components));
  };
  const std::vector<StartPoint> starts{{povm_params_for(merged_projectors(ohya.decomposition, n_components)), 0.1}};
  const SearchResult sr =
      maximize(objective, static_cast<int>(povm_param_count(d, n_components)), budget, starts, 1.0);

  PseudoResult res;
  res.converged = sr.converged;
  res.evals = sr.evals + ohya.evals;
  res.value = EntropyValue(std::max(0.0, sr.value));
  for (const auto& x : pieces_from(root, povm_from_params(as_span(sr.x), d, n_components))) {
    const double w = x.trace().real();
    if (w <= tol::kZero) continue;
    res.weights.push_back(w);
    res.components.emplace_back(hermitian_part(x / w));
  }
  return res;
}

EntropyValue holevo_bound(const ProbabilityVector& lambda, const std::vector<DensityOperator>& coded,
                          const KrausChannel& ch) {
  if (lambda.size() != coded.size()) throw DimensionError("holevo_bound: lambda and coded states differ in length");
  ComplexMatrix sigma = ComplexMatrix::Zero(ch.in_dim(), ch.in_dim());
  double conditional = 0.0;
  for (std::size_t k = 0; k < coded.size(); ++k) {
    if (coded[k].dim() != ch.in_dim()) throw DimensionError("holevo_bound: coded state dimension mismatch");
    sigma += lambda[k] * coded[k].matrix();
    if (lambda[k] > 0.0) conditional += lambda[k] * entropy_of_psd(ch.apply_matrix(coded[k].matrix()));
  }
  const double chi = entropy_of_psd(ch.apply_matrix(sigma)) - conditional;
  if (chi < -1e-9) throw ConsistencyError("holevo_bound: negative value " + std::to_string(chi));
  return EntropyValue(std::max(0.0, chi));
}

}  // namespace qmi
