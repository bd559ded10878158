#include "qmi/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qmi {

namespace {

// sum_k lambda_k KL(p_k || q) with q the lambda-mixture; +inf never occurs since p_k << q.
double transmitted(std::span<const double> lambda, const std::vector<std::vector<double>>& rows) {
  const std::size_t m = rows.front().size();
  std::vector<double> q(m, 0.0);
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (std::size_t j = 0; j < m; ++j) q[j] += lambda[k] * rows[k][j];
  double total = 0.0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (lambda[k] <= 0.0) continue;
    for (std::size_t j = 0; j < m; ++j) {
      if (rows[k][j] > 0.0) total += lambda[k] * rows[k][j] * std::log(rows[k][j] / q[j]);
    }
  }
  return total;
}

std::vector<double> decode(const Povm& povm, const ComplexMatrix& sigma) {
  std::vector<double> p = povm.probabilities(sigma);
  for (double& x : p) x = std::max(0.0, x);
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& x : p) x /= s;
  return p;
}

RealVector logits_for(const std::vector<double>& w) {
  RealVector t(static_cast<Eigen::Index>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i) t(static_cast<Eigen::Index>(i)) = std::log(std::max(w[i], 1e-12));
  return t.array() - t.mean();
}

ComplexVector vector_from(std::span<const double> x, int d) {
  ComplexVector v(d);
  for (int i = 0; i < d; ++i) v(i) = Complex(x[2 * i], x[2 * i + 1]);
  return v;
}

ComplexMatrix matrix_from(std::span<const double> x, int rows, int cols) {
  ComplexMatrix m(rows, cols);
  std::size_t k = 0;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c, k += 2) m(r, c) = Complex(x[k], x[k + 1]);
  return m;
}

void append(RealVector& x, const ComplexMatrix& m) {
  const Eigen::Index base = x.size();
  x.conservativeResize(base + 2 * m.size());
  Eigen::Index k = base;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      x(k++) = m(r, c).real();
      x(k++) = m(r, c).imag();
    }
}

void append(RealVector& x, const RealVector& y) {
  const Eigen::Index base = x.size();
  x.conservativeResize(base + y.size());
  x.tail(y.size()) = y;
}

}  // namespace

std::vector<double> softmax(std::span<const double> t) {
  const double mx = *std::max_element(t.begin(), t.end());
  std::vector<double> w(t.size());
  double s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) s += (w[i] = std::exp(t[i] - mx));
  for (double& x : w) x /= s;
  return w;
}

CodingScheme::CodingScheme(std::vector<DensityOperator> states) : states_(std::move(states)) {
  if (states_.empty()) throw InvalidArgument("CodingScheme: empty alphabet");
  for (const auto& s : states_)
    if (s.dim() != states_.front().dim()) throw DimensionError("CodingScheme: coded states differ in dimension");
}

void CqcInstance::validate() const {
  if (static_cast<int>(lambda.size()) != coding.alphabet_size())
    throw DimensionError("cqc: lambda length differs from the alphabet size");
  if (coding.dim() != channel.in_dim()) throw DimensionError("cqc: coding dimension differs from channel input");
  if (decoding.dim() != channel.out_dim()) throw DimensionError("cqc: decoding dimension differs from channel output");
}

std::vector<std::vector<double>> cqc_transition(const CodingScheme& coding, const KrausChannel& ch,
                                                const Povm& decoding) {
  std::vector<std::vector<double>> rows;
  for (const auto& s : coding.states()) rows.push_back(decode(decoding, ch.apply_matrix(s.matrix())));
  return rows;
}

EntropyValue cqc_mutual_entropy(const CqcInstance& inst) {
  inst.validate();
  const auto rows = cqc_transition(inst.coding, inst.channel, inst.decoding);
  const double divergence = transmitted(inst.lambda.probs(), rows);
  std::vector<double> q(rows.front().size(), 0.0);
  double conditional = 0.0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (std::size_t j = 0; j < q.size(); ++j) q[j] += inst.lambda[k] * rows[k][j];
    conditional += inst.lambda[k] * shannon_of(rows[k]);
  }
  const double difference = shannon_of(q) - conditional;
  if (std::abs(difference - divergence) > 1e-8) {
    throw ConsistencyError("cqc_mutual_entropy: divergence and entropy-difference forms differ by " +
                           std::to_string(std::abs(difference - divergence)));
  }
  return EntropyValue(std::max(0.0, divergence));
}

std::string to_string(StateFamily::Kind kind) {
  switch (kind) {
    case StateFamily::Kind::Full: return "full";
    case StateFamily::Kind::Rank: return "rank";
    case StateFamily::Kind::Diagonal: return "diagonal";
  }
  return "full";
}

namespace {

int family_rank(int dim, const StateFamily& family) {
  if (family.kind != StateFamily::Kind::Rank) return dim;
  if (family.rank < 1 || family.rank > dim) throw InvalidArgument("StateFamily: rank must lie in [1, dim]");
  return family.rank;
}

}  // namespace

std::size_t state_param_count(int dim, const StateFamily& family) {
  const int r = family_rank(dim, family);
  if (family.kind == StateFamily::Kind::Diagonal) return static_cast<std::size_t>(dim);
  return static_cast<std::size_t>(r) * (1 + 2 * dim);
}

DensityOperator state_from_params(std::span<const double> params, int dim, const StateFamily& family) {
  if (params.size() != state_param_count(dim, family)) throw InvalidArgument("state_from_params: wrong length");
  const int r = family_rank(dim, family);
  const std::vector<double> w = softmax(params.subspan(0, r));
  if (family.kind == StateFamily::Kind::Diagonal) return DensityOperator::diagonal(w);
  const ComplexMatrix u = polar_isometry(matrix_from(params.subspan(r), dim, r));
  ComplexMatrix rho = u * RealVector::Map(w.data(), r).cast<Complex>().asDiagonal() * u.adjoint();
  rho = hermitian_part(rho);
  rho /= rho.trace().real();
  return DensityOperator(std::move(rho));
}

RealVector state_params_center(int dim, const StateFamily& family) {
  const int r = family_rank(dim, family);
  RealVector x = RealVector::Zero(r);
  if (family.kind != StateFamily::Kind::Diagonal) append(x, ComplexMatrix(ComplexMatrix::Identity(dim, r)));
  return x;
}

double family_entropy_bound(int dim, const StateFamily& family) { return std::log(family_rank(dim, family)); }

std::string to_string(CqcMode mode) {
  switch (mode) {
    case CqcMode::Fixed: return "fixed";
    case CqcMode::CodingFree: return "coding-free";
    case CqcMode::CodingDecodingFree: return "coding-decoding-free";
  }
  return "fixed";
}

RealVector state_params_for(const DensityOperator& rho, const StateFamily& family) {
  const int d = rho.dim();
  const int r = family_rank(d, family);
  const auto dec = canonical_schatten(rho);
  std::vector<double> w(dec.weights.begin(), dec.weights.begin() + r);
  if (family.kind == StateFamily::Kind::Diagonal) {
    for (int i = 0; i < d; ++i) w[i] = rho.matrix()(i, i).real();
    return logits_for(w);
  }
  RealVector x = logits_for(w);
  append(x, ComplexMatrix(dec.basis().leftCols(r)));
  return x;
}

CapacityReport quantum_capacity(const KrausChannel& ch, const SearchBudget& budget, const CapacityOptions& options) {
  const int d = ch.in_dim();
  const int n = static_cast<int>(state_param_count(d, options.family));
  SearchBudget inner = options.inner;
  inner.seed = budget.seed;
  const Objective objective = [&](const RealVector& x) {
    return ohya_mutual_entropy(state_from_params(as_span(x), d, options.family), ch, inner).value.nats();
  };
  const SearchResult sr = maximize(objective, n, budget, {{state_params_center(d, options.family), 0.5}}, 1.0);

  const DensityOperator rho = state_from_params(as_span(sr.x), d, options.family);
  const OhyaResult best = ohya_mutual_entropy(rho, ch, budget);
  CapacityReport rep;
  rep.mode = "quantum/" + to_string(options.family.kind);
  rep.value = EntropyValue(std::max(best.value.nats(), std::max(0.0, sr.value)));
  rep.converged = sr.converged;
  rep.evals = sr.evals + best.evals;
  rep.bound = family_entropy_bound(d, options.family);
  rep.input_state = rho;
  rep.params = sr.x;
  rep.weights = best.decomposition.weights;
  for (const auto& v : best.decomposition.vectors) rep.states.push_back(DensityOperator::pure(v));
  return rep;
}

CapacityReport pseudo_capacity(const KrausChannel& ch, int n_components, const SearchBudget& budget,
                               const CapacityOptions& options, const CapacityReport* seed) {
  const int d = ch.in_dim();
  if (n_components <= 0) n_components = d;
  CapacityReport base;
  if (seed == nullptr || !seed->input_state) {
    base = quantum_capacity(ch, budget, options);
    seed = &base;
  }
  const int ns = static_cast<int>(state_param_count(d, options.family));
  const int np = static_cast<int>(povm_param_count(d, n_components));

  auto split = [&](const RealVector& x) {
    const DensityOperator rho = state_from_params(std::span<const double>(x.data(), ns), d, options.family);
    auto effects = povm_from_params(std::span<const double>(x.data() + ns, np), d, n_components);
    return std::pair{rho, std::move(effects)};
  };
  const Objective objective = [&](const RealVector& x) {
    const auto [rho, effects] = split(x);
    return pseudo_value(matrix_sqrt_psd(rho.matrix()), ch.apply_matrix(rho.matrix()), ch, effects);
  };

  // Start at the orthogonal maximizer: its eigenprojectors reproduce the quantum capacity value.
  SchattenDecomposition dec;
  dec.weights = seed->weights;
  for (const auto& s : seed->states) dec.vectors.push_back(canonical_schatten(s).vectors.front());
  RealVector x0 = state_params_for(*seed->input_state, options.family);
  append(x0, povm_params_for(merged_projectors(dec, n_components)));
  const SearchResult sr = maximize(objective, ns + np, budget, {{x0, 0.1}}, 1.0);

  const auto [rho, effects] = split(sr.x);
  const ComplexMatrix root = matrix_sqrt_psd(rho.matrix());
  CapacityReport rep;
  rep.mode = "pseudo/" + to_string(options.family.kind);
  rep.value = EntropyValue(std::max(0.0, sr.value));
  rep.converged = sr.converged;
  rep.evals = sr.evals + (seed == &base ? base.evals : 0);
  rep.bound = family_entropy_bound(d, options.family);
  rep.input_state = rho;
  rep.params = sr.x;
  for (const auto& m : effects) {
    const ComplexMatrix piece = hermitian_part(root * m * root);
    const double w = piece.trace().real();
    if (w <= tol::kZero) continue;
    rep.weights.push_back(w);
    rep.states.emplace_back(hermitian_part(piece / w));
  }
  return rep;
}

namespace {

struct CqcLayout {
  int n = 0;        // alphabet
  int d = 0;        // coding dim
  int d_out = 0;    // decoding dim
  int outcomes = 0;
  bool coding_free = false;
  bool decoding_free = false;
  bool mixed = false;
  bool projective = false;

  int coding_block() const { return mixed ? 2 * d * d : 2 * d; }
  int coding_params() const { return coding_free ? n * coding_block() : 0; }
  int decoding_params() const {
    if (!decoding_free) return 0;
    return projective ? 2 * d_out * d_out : static_cast<int>(povm_param_count(d_out, outcomes));
  }
  int total() const { return n + coding_params() + decoding_params(); }
};

struct CqcPoint {
  std::vector<double> lambda;
  std::vector<DensityOperator> coding;
  std::vector<ComplexMatrix> effects;
};

CqcPoint unpack(const RealVector& x, const CqcLayout& L, const CqcInstance& inst) {
  CqcPoint p;
  const std::span<const double> all(x.data(), static_cast<std::size_t>(x.size()));
  p.lambda = softmax(all.subspan(0, L.n));
  std::size_t off = L.n;
  if (L.coding_free) {
    for (int k = 0; k < L.n; ++k, off += L.coding_block()) {
      const auto block = all.subspan(off, L.coding_block());
      if (L.mixed) {
        const ComplexMatrix a = matrix_from(block, L.d, L.d);
        ComplexMatrix s = a * a.adjoint();
        const double t = s.trace().real();
        if (!(t > 1e-300)) throw InvalidArgument("degenerate coding parameters");
        p.coding.emplace_back(hermitian_part(s / t));
      } else {
        const ComplexVector v = vector_from(block, L.d);
        const double nv = v.norm();
        if (!(nv > 1e-150)) throw InvalidArgument("degenerate coding parameters");
        p.coding.push_back(DensityOperator::pure(v / nv));
      }
    }
  } else {
    p.coding = inst.coding.states();
  }
  if (L.decoding_free) {
    const auto block = all.subspan(off, L.decoding_params());
    if (L.projective) {
      const ComplexMatrix u = polar_isometry(matrix_from(block, L.d_out, L.d_out));
      for (int j = 0; j < L.d_out; ++j) p.effects.emplace_back(u.col(j) * u.col(j).adjoint());
    } else {
      p.effects = povm_from_params(block, L.d_out, L.outcomes);
    }
  } else {
    p.effects = inst.decoding.effects();
  }
  return p;
}

// Parameters reproducing (lambda, coding, effects) as closely as the layout allows.
RealVector pack(const CqcLayout& L, const std::vector<double>& lambda, const std::vector<DensityOperator>& coding,
                const std::vector<ComplexMatrix>& effects) {
  RealVector x = logits_for(lambda);
  if (L.coding_free) {
    for (const auto& s : coding) {
      if (L.mixed) {
        append(x, matrix_sqrt_psd(s.matrix()));
      } else {
        append(x, ComplexMatrix(canonical_schatten(s).vectors.front()));
      }
    }
  }
  if (L.decoding_free) {
    if (L.projective) {
      ComplexMatrix basis = ComplexMatrix::Identity(L.d_out, L.d_out);
      if (static_cast<int>(effects.size()) == L.d_out) {
        ComplexMatrix candidate(L.d_out, L.d_out);
        for (int j = 0; j < L.d_out; ++j) candidate.col(j) = eigh_descending(effects[j]).vectors.col(0);
        if ((candidate.adjoint() * candidate - ComplexMatrix::Identity(L.d_out, L.d_out)).norm() < 1e-8)
          basis = candidate;
      }
      append(x, basis);
    } else {
      std::vector<ComplexMatrix> e(L.outcomes, ComplexMatrix::Zero(L.d_out, L.d_out));
      for (std::size_t j = 0; j < effects.size(); ++j) e[std::min<std::size_t>(j, L.outcomes - 1)] += effects[j];
      append(x, povm_params_for(e));
    }
  }
  return x;
}

}  // namespace

CapacityReport cqc_capacity(const CqcInstance& inst, CqcMode mode, const SearchBudget& budget,
                            const CqcOptions& options, const CapacityReport* seed) {
  inst.validate();
  CqcLayout L;
  L.n = inst.coding.alphabet_size();
  L.d = inst.coding.dim();
  L.d_out = inst.channel.out_dim();
  L.coding_free = mode != CqcMode::Fixed;
  L.decoding_free = mode == CqcMode::CodingDecodingFree;
  L.mixed = options.mixed_coding;
  L.projective = options.projective_only;
  L.outcomes = options.outcomes > 0 ? options.outcomes : inst.decoding.outcomes();

  const Objective objective = [&](const RealVector& x) {
    const CqcPoint p = unpack(x, L, inst);
    std::vector<std::vector<double>> rows;
    for (const auto& s : p.coding) {
      std::vector<double> row(p.effects.size());
      const ComplexMatrix out = inst.channel.apply_matrix(s.matrix());
      for (std::size_t j = 0; j < p.effects.size(); ++j)
        row[j] = std::max(0.0, (p.effects[j] * out).trace().real());
      rows.push_back(std::move(row));
    }
    return transmitted(p.lambda, rows);
  };

  std::vector<StartPoint> starts;
  if (seed != nullptr && !seed->weights.empty()) {
    starts.push_back({pack(L, seed->weights, seed->states, seed->effects), 0.1});
  }
  starts.push_back({pack(L, std::vector<double>(L.n, 1.0 / L.n), inst.coding.states(), inst.decoding.effects()), 0.5});
  starts.push_back({pack(L, inst.lambda.probs(), inst.coding.states(), inst.decoding.effects()), 0.5});
  const SearchResult sr = maximize(objective, L.total(), budget, starts, 1.0);

  const CqcPoint p = unpack(sr.x, L, inst);
  const CqcInstance best{ProbabilityVector(p.lambda), CodingScheme(p.coding), inst.channel, Povm(p.effects)};
  CapacityReport rep;
  rep.mode = to_string(mode);
  rep.value = cqc_mutual_entropy(best);
  rep.converged = sr.converged;
  rep.evals = sr.evals;
  rep.bound = std::log(static_cast<double>(L.n));
  rep.weights = p.lambda;
  rep.states = p.coding;
  rep.effects = p.effects;
  rep.params = sr.x;
  return rep;
}

std::vector<CapacityReport> cqc_capacity_chain(const CqcInstance& inst, const SearchBudget& budget,
                                               const CqcOptions& options) {
  std::vector<CapacityReport> out;
  out.push_back(cqc_capacity(inst, CqcMode::Fixed, budget, options));
  out.push_back(cqc_capacity(inst, CqcMode::CodingFree, budget, options, &out.back()));
  out.push_back(cqc_capacity(inst, CqcMode::CodingDecodingFree, budget, options, &out.back()));
  return out;
}

}  // namespace qmi
