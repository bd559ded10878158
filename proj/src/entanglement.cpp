#include "qmi/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qmi {

ComplexMatrix EntanglingOperator::amplitude(int n) const {
  ComplexMatrix a(k_dim, f_dim);
  for (int f = 0; f < f_dim; ++f)
    for (int k = 0; k < k_dim; ++k) a(k, f) = kappa[n](f * k_dim + k);
  return a;
}

ComplexMatrix EntanglingOperator::block(int n, int m) const { return amplitude(n) * amplitude(m).adjoint(); }

ComplexMatrix EntanglingOperator::gram() const {
  ComplexMatrix g(g_dim, g_dim);
  for (int n = 0; n < g_dim; ++n)
    for (int m = 0; m < g_dim; ++m) g(n, m) = kappa[m].dot(kappa[n]);
  return g;
}

double EntanglingOperator::normalization() const {
  double s = 0.0;
  for (const auto& v : kappa) s += v.squaredNorm();
  return s;
}

namespace {

// Block matrix sum_{n,m} |n><m| (x) B_nm from amplitudes A_n (k x f).
ComplexMatrix assemble(const std::vector<ComplexMatrix>& amps, bool diagonal_only = false) {
  const int g = static_cast<int>(amps.size());
  const int k = static_cast<int>(amps.front().rows());
  ComplexMatrix t = ComplexMatrix::Zero(g * k, g * k);
  for (int n = 0; n < g; ++n)
    for (int m = 0; m < g; ++m) {
      if (diagonal_only && n != m) continue;
      t.block(n * k, m * k, k, k) = amps[n] * amps[m].adjoint();
    }
  return t;
}

ComplexMatrix local_change(const ComplexMatrix& v, int k) {
  return tensor_product(v, ComplexMatrix::Identity(k, k));
}

void require_unitary(const ComplexMatrix& v, int d) {
  if (v.rows() != d || v.cols() != d) throw DimensionError("basis must be a square matrix on G");
  if ((v.adjoint() * v - ComplexMatrix::Identity(d, d)).norm() > 1e-9)
    throw InvalidArgument("basis columns are not orthonormal");
}

double op_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

ComplexMatrix EntanglingOperator::compound() const {
  std::vector<ComplexMatrix> amps;
  for (int n = 0; n < g_dim; ++n) amps.push_back(amplitude(n));
  const ComplexMatrix u = local_change(basis, k_dim);
  return u * assemble(amps) * u.adjoint();
}

std::string to_string(EntanglementClass c) {
  switch (c) {
    case EntanglementClass::q: return "q";
    case EntanglementClass::d: return "d";
    case EntanglementClass::c: return "c";
  }
  return "q";
}

EntanglementClass entanglement_class_from(const std::string& s) {
  if (s == "q") return EntanglementClass::q;
  if (s == "d") return EntanglementClass::d;
  if (s == "c") return EntanglementClass::c;
  throw InvalidArgument("unknown entanglement class '" + s + "' (expected q, d or c)");
}

EntanglingOperator entangling_in_basis(const DensityOperator& theta, int d_g, int d_k, const ComplexMatrix& basis) {
  if (theta.dim() != d_g * d_k) throw DimensionError("entangling operator: theta is not (d_G * d_K)-square");
  require_unitary(basis, d_g);
  const Purification pur = purify(theta);
  const int r = pur.ancilla_dim;
  EntanglingOperator op;
  op.g_dim = d_g;
  op.k_dim = d_k;
  op.f_dim = r;
  op.basis = basis;
  op.kappa.assign(d_g, ComplexVector::Zero(static_cast<Eigen::Index>(r) * d_k));
  // psi index (i * d_k + k) * r + f; rotate the G index into the chosen basis.
  for (int n = 0; n < d_g; ++n)
    for (int i = 0; i < d_g; ++i) {
      const Complex c = std::conj(basis(i, n));
      if (c == Complex(0.0)) continue;
      for (int k = 0; k < d_k; ++k)
        for (int f = 0; f < r; ++f) op.kappa[n](f * d_k + k) += c * pur.psi((i * d_k + k) * r + f);
    }
  return op;
}

EntanglingOperator entangling_from_state(const DensityOperator& theta, int d_g, int d_k) {
  if (theta.dim() != d_g * d_k) throw DimensionError("entangling operator: theta is not (d_G * d_K)-square");
  ComplexMatrix rho = hermitian_part(partial_trace(theta.matrix(), d_g, d_k, Keep::First));
  rho /= rho.trace().real();
  return entangling_in_basis(theta, d_g, d_k, canonical_schatten(DensityOperator(rho)).basis());
}

double weak_orthogonality_defect(const EntanglingOperator& kappa, const std::vector<double>& p) {
  if (static_cast<int>(p.size()) != kappa.g_dim) throw DimensionError("weak orthogonality: weight count differs");
  ComplexMatrix g = kappa.gram();
  for (int n = 0; n < kappa.g_dim; ++n) g(n, n) -= p[n];
  return g.cwiseAbs().maxCoeff();
}

double strong_orthogonality_defect(const EntanglingOperator& kappa) {
  double worst = 0.0;
  for (int n = 0; n < kappa.g_dim; ++n)
    for (int m = 0; m < kappa.g_dim; ++m)
      if (n != m) worst = std::max(worst, kappa.block(n, m).norm());
  return worst;
}

ComplexMatrix phi(const EntanglingOperator& kappa, const ComplexMatrix& a) {
  if (a.rows() != kappa.k_dim || a.cols() != kappa.k_dim) throw DimensionError("phi: A must act on K");
  ComplexMatrix x(kappa.g_dim, kappa.g_dim);
  std::vector<ComplexMatrix> amps;
  for (int n = 0; n < kappa.g_dim; ++n) amps.push_back(kappa.amplitude(n));
  for (int m = 0; m < kappa.g_dim; ++m)
    for (int n = 0; n < kappa.g_dim; ++n) x(m, n) = (amps[m].adjoint() * a * amps[n]).trace();
  return kappa.basis * x * kappa.basis.adjoint();
}

ComplexMatrix phi_star(const EntanglingOperator& kappa, const ComplexMatrix& b) {
  if (b.rows() != kappa.g_dim || b.cols() != kappa.g_dim) throw DimensionError("phi_star: B must act on G");
  const ComplexMatrix bv = kappa.basis.adjoint() * b * kappa.basis;
  ComplexMatrix out = ComplexMatrix::Zero(kappa.k_dim, kappa.k_dim);
  for (int n = 0; n < kappa.g_dim; ++n)
    for (int m = 0; m < kappa.g_dim; ++m)
      if (bv(n, m) != Complex(0.0)) out += bv(n, m) * kappa.block(n, m);
  return out;
}

ClassificationReport classify_compound(const DensityOperator& theta, int d_g, int d_k) {
  if (theta.dim() != d_g * d_k) throw DimensionError("classify_compound: theta is not (d_G * d_K)-square");
  ComplexMatrix rho = hermitian_part(partial_trace(theta.matrix(), d_g, d_k, Keep::First));
  rho /= rho.trace().real();
  const ComplexMatrix u = local_change(canonical_schatten(DensityOperator(rho)).basis(), d_k);
  const ComplexMatrix tv = u.adjoint() * theta.matrix() * u;

  ClassificationReport rep;
  for (int n = 0; n < d_g; ++n)
    for (int m = 0; m < d_g; ++m)
      if (n != m) rep.off_diag_norm = std::max(rep.off_diag_norm, tv.block(n * d_k, m * d_k, d_k, d_k).norm());

  bool commuting = true;
  for (int n = 0; n < d_g; ++n) {
    const ComplexMatrix a = tv.block(n * d_k, n * d_k, d_k, d_k);
    const double ta = a.trace().real();
    if (ta <= tol::kZero) continue;
    for (int m = n + 1; m < d_g; ++m) {
      const ComplexMatrix b = tv.block(m * d_k, m * d_k, d_k, d_k);
      const double tb = b.trace().real();
      if (tb <= tol::kZero) continue;
      const ComplexMatrix comm = a * b - b * a;
      if (comm.norm() > tol::kCommutator * a.norm() * b.norm()) commuting = false;
      rep.max_commutator = std::max(rep.max_commutator, op_norm(comm) / (ta * tb));
    }
  }
  if (rep.off_diag_norm > tol::kOffDiagonal) {
    rep.cls = EntanglementClass::q;
  } else {
    rep.cls = commuting ? EntanglementClass::c : EntanglementClass::d;
  }
  return rep;
}

EntangledCompound make_entangled_compound(const DensityOperator& theta, int d_g, int d_k) {
  const auto rep = classify_compound(theta, d_g, d_k);
  return {CompoundState(theta, d_g, d_k), rep.cls, entangling_from_state(theta, d_g, d_k)};
}

EntangledCompound standard_entanglement(const DensityOperator& sigma) {
  const int k = sigma.dim();
  const auto dec = canonical_schatten(sigma);
  EntanglingOperator op;
  op.g_dim = k;
  op.k_dim = k;
  op.f_dim = 1;
  op.basis = dec.basis();
  for (int n = 0; n < k; ++n) op.kappa.push_back(std::sqrt(std::max(0.0, dec.weights[n])) * dec.vectors[n]);
  ComplexMatrix theta = hermitian_part(op.compound());
  theta /= theta.trace().real();
  const DensityOperator t(std::move(theta));
  return {CompoundState(t, k, k), classify_compound(t, k, k).cls, std::move(op)};
}

EntangledCompound d_compound(const ProbabilityVector& p, const std::vector<DensityOperator>& omegas) {
  if (p.size() != omegas.size()) throw DimensionError("d_compound: weight and state counts differ");
  const int g = static_cast<int>(p.size());
  const int k = omegas.front().dim();
  EntanglingOperator op;
  op.g_dim = g;
  op.k_dim = k;
  op.f_dim = g * k;
  op.basis = ComplexMatrix::Identity(g, g);
  bool commuting = true;
  for (int n = 0; n < g; ++n) {
    if (omegas[n].dim() != k) throw DimensionError("d_compound: output states differ in dimension");
    // kappa_n = |n> (x) psi_n with psi_n a purification of p_n omega_n on K (x) K.
    ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(op.f_dim) * k);
    const EigenPairs e = eigh_descending(omegas[n].matrix());
    for (int j = 0; j < k; ++j) {
      const double w = p[n] * std::max(0.0, e.values(j));
      if (w <= 0.0) continue;
      for (int kk = 0; kk < k; ++kk) v((n * k + j) * k + kk) = std::sqrt(w) * e.vectors(kk, j);
    }
    op.kappa.push_back(std::move(v));
    if (p[n] <= 0.0) continue;
    for (int m = 0; m < n; ++m) {
      if (p[m] <= 0.0) continue;
      const ComplexMatrix& a = omegas[n].matrix();
      const ComplexMatrix& b = omegas[m].matrix();
      if ((a * b - b * a).norm() > tol::kCommutator * a.norm() * b.norm()) commuting = false;
    }
  }
  ComplexMatrix theta = ComplexMatrix::Zero(g * k, g * k);
  for (int n = 0; n < g; ++n) theta.block(n * k, n * k, k, k) = p[n] * omegas[n].matrix();
  const DensityOperator t(hermitian_part(theta));
  return {CompoundState(t, g, k), commuting ? EntanglementClass::c : EntanglementClass::d, std::move(op)};
}

EntropyValue entangled_mutual_entropy(const CompoundState& theta) {
  const EntropyValue s = relative_entropy_psd(
      theta.theta().matrix(), tensor_product(theta.input_marginal().matrix(), theta.output_marginal().matrix()));
  if (!s.is_finite()) {
    throw ConsistencyError("entangled_mutual_entropy: compound state escapes the support of the product of marginals");
  }
  return s;
}

EntropyValue q_entropy_closed_form(const std::vector<QBlock>& blocks) {
  double mass = 0.0;
  for (const auto& b : blocks) {
    if (b.mu < 0.0) throw InvalidArgument("q_entropy_closed_form: negative block weight");
    mass += b.mu;
  }
  if (std::abs(mass - 1.0) > 1e-9) throw InvalidArgument("q_entropy_closed_form: block weights do not sum to 1");
  double printed = 0.0;
  double split = 0.0;
  for (const auto& b : blocks) {
    if (b.mu <= 0.0) continue;
    const ComplexMatrix s = b.mu * b.sigma.matrix();
    double tr_s_ln_s = 0.0;
    for (double l : eigh_descending(s).values)
      if (l > tol::kZero) tr_s_ln_s += l * std::log(l);
    printed += b.mu * std::log(b.mu) - 2.0 * tr_s_ln_s;
    split += -b.mu * std::log(b.mu) + 2.0 * b.mu * von_neumann_entropy(b.sigma).nats();
  }
  if (std::abs(printed - split) > 1e-10) {
    throw ConsistencyError("q_entropy_closed_form: block formula and entropy split differ by " +
                           std::to_string(std::abs(printed - split)));
  }
  return EntropyValue(std::max(0.0, printed));
}

namespace {

// theta on G (x) K from Phi = (W (x) I_K) Phi_std, tracing out F; W is (g f) x r.
ComplexMatrix purified_compound(const ComplexMatrix& w, const ComplexMatrix& std_amp, int g, int f, int k) {
  // std_amp is r x k: row j holds sqrt(p_j) v_j^T.
  const ComplexMatrix phi = w * std_amp;  // (g f) x k, row index gi * f + fi
  ComplexMatrix theta = ComplexMatrix::Zero(g * k, g * k);
  for (int fi = 0; fi < f; ++fi) {
    ComplexVector col(g * k);
    for (int gi = 0; gi < g; ++gi)
      for (int kk = 0; kk < k; ++kk) col(gi * k + kk) = phi(gi * f + fi, kk);
    theta += col * col.adjoint();
  }
  return theta;
}

ComplexMatrix params_to_matrix(std::span<const double> x, int rows, int cols) {
  ComplexMatrix m(rows, cols);
  std::size_t i = 0;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c, i += 2) m(r, c) = Complex(x[i], x[i + 1]);
  return m;
}

void push_matrix(std::vector<double>& x, const ComplexMatrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      x.push_back(m(r, c).real());
      x.push_back(m(r, c).imag());
    }
}

RealVector to_real_vector(const std::vector<double>& x) {
  return RealVector::Map(x.data(), static_cast<Eigen::Index>(x.size()));
}

double relent_or_nan(const ComplexMatrix& a, const ComplexMatrix& b) {
  const EntropyValue s = relative_entropy_psd(a, b);
  return s.is_finite() ? s.nats() : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

QEntropySearch q_entropy_sup(const DensityOperator& sigma, const SearchBudget& budget, int f_dim) {
  if (f_dim < 1) throw InvalidArgument("q_entropy_sup: f_dim must be >= 1");
  const int k = sigma.dim();
  const int g = k;
  const auto dec = canonical_schatten(sigma);
  int r = 0;
  while (r < k && dec.weights[r] > tol::kZero) ++r;
  ComplexMatrix std_amp(r, k);
  for (int j = 0; j < r; ++j) std_amp.row(j) = std::sqrt(dec.weights[j]) * dec.vectors[j].transpose();

  const int rows = g * f_dim;
  const Objective objective = [&](const RealVector& x) {
    const ComplexMatrix w = polar_isometry(params_to_matrix(as_span(x), rows, r));
    if (!w.allFinite()) return std::numeric_limits<double>::quiet_NaN();
    ComplexMatrix theta = hermitian_part(purified_compound(w, std_amp, g, f_dim, k));
    theta /= theta.trace().real();
    const ComplexMatrix rho = hermitian_part(partial_trace(theta, g, k, Keep::First));
    return relent_or_nan(theta, tensor_product(rho, sigma.matrix()));
  };
  // Standard point: W|j> = |j>_G (x) |0>_F.
  ComplexMatrix w0 = ComplexMatrix::Zero(rows, r);
  for (int j = 0; j < r; ++j) w0(j * f_dim, j) = 1.0;
  std::vector<double> x0;
  push_matrix(x0, w0);
  const SearchResult sr = maximize(objective, 2 * rows * r, budget, {{to_real_vector(x0), 0.3}}, 1.0);

  QEntropySearch res;
  res.closed_form = q_entropy_closed_form({{1.0, sigma}});
  res.value = EntropyValue(std::max(0.0, sr.value));
  res.converged = sr.converged;
  res.evals = sr.evals;
  ComplexMatrix theta = hermitian_part(
      purified_compound(polar_isometry(params_to_matrix(as_span(sr.x), rows, r)), std_amp, g, f_dim, k));
  theta /= theta.trace().real();
  res.maximizer = DensityOperator(std::move(theta));
  return res;
}

Disentanglement conditional_and_degree(const CompoundState& theta) {
  const DensityOperator& sigma = theta.output_marginal();
  Disentanglement out;
  out.h_sigma = q_entropy_closed_form({{1.0, sigma}}).nats();
  out.mutual = entangled_mutual_entropy(theta).nats();
  out.conditional = out.h_sigma - out.mutual;
  out.degree = von_neumann_entropy(sigma).nats() - out.mutual;
  return out;
}

namespace {

// Everything the class-constrained searches share for one (rho, channel) pair.
struct ClassProblem {
  const DensityOperator& rho;
  const KrausChannel& ch;
  int g;
  int k;
  std::size_t total;
  int active;
  ComplexMatrix sigma;

  ClassProblem(const DensityOperator& r, const KrausChannel& c)
      : rho(r),
        ch(c),
        g(r.dim()),
        k(c.out_dim()),
        total(schatten_param_count(r)),
        active(static_cast<int>(schatten_active_param_count(r))),
        sigma(c.apply(r).matrix()) {}

  SchattenDecomposition decomposition(const double* xs) const {
    std::vector<double> full(total, 0.0);
    std::copy(xs, xs + active, full.begin());
    return schatten_family(rho, full);
  }

  ComplexMatrix output_of(const ComplexVector& v) const { return ch.apply_matrix(v * v.adjoint()); }

  // Largest ||[w_n, w_m]||_F among outputs of the basis vectors with positive weight.
  double commutator_violation(const SchattenDecomposition& dec) const {
    std::vector<ComplexMatrix> w;
    for (std::size_t n = 0; n < dec.vectors.size(); ++n)
      if (dec.weights[n] > tol::kZero) w.push_back(output_of(dec.vectors[n]));
    double worst = 0.0;
    for (std::size_t a = 0; a < w.size(); ++a)
      for (std::size_t b = a + 1; b < w.size(); ++b) worst = std::max(worst, (w[a] * w[b] - w[b] * w[a]).norm());
    return worst;
  }

  ComplexMatrix product_in_basis(const std::vector<double>& p) const {
    return tensor_product(RealVector::Map(p.data(), g).cast<Complex>().asDiagonal().toDenseMatrix(), sigma);
  }

  DensityOperator to_computational(const ComplexMatrix& theta_v, const ComplexMatrix& basis) const {
    const ComplexMatrix u = tensor_product(basis, ComplexMatrix::Identity(k, k));
    ComplexMatrix t = hermitian_part(u * theta_v * u.adjoint());
    t /= t.trace().real();
    return DensityOperator(std::move(t));
  }
};

std::vector<ComplexMatrix> strict_amplitudes(const ClassProblem& P, const SchattenDecomposition& dec,
                                             const std::vector<ComplexMatrix>& isometries) {
  std::vector<ComplexMatrix> amps;
  for (int n = 0; n < P.g; ++n) {
    const ComplexMatrix root = matrix_sqrt_psd(dec.weights[n] * P.output_of(dec.vectors[n]));
    amps.push_back(root * isometries[n].adjoint());
  }
  return amps;
}

double max_off_gram(const std::vector<ComplexMatrix>& amps) {
  double worst = 0.0;
  for (std::size_t n = 0; n < amps.size(); ++n)
    for (std::size_t m = n + 1; m < amps.size(); ++m)
      worst = std::max(worst, std::abs((amps[m].adjoint() * amps[n]).trace()));
  return worst;
}

double max_block_commutator(const std::vector<ComplexMatrix>& amps) {
  std::vector<ComplexMatrix> w;
  for (const auto& a : amps) {
    ComplexMatrix b = a * a.adjoint();
    const double t = b.trace().real();
    if (t > tol::kZero) w.push_back(b / t);
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < w.size(); ++a)
    for (std::size_t b = a + 1; b < w.size(); ++b) worst = std::max(worst, (w[a] * w[b] - w[b] * w[a]).norm());
  return worst;
}

ClassMutualResult search_c_or_d(const ClassProblem& P, EntanglementClass cls, const SearchBudget& budget,
                                const ClassMutualOptions& options, const ClassMutualResult* seed) {
  std::vector<StartPoint> starts{{RealVector::Zero(P.active), 0.5}};
  if (seed != nullptr && seed->params.size() >= P.active && P.active > 0) {
    starts.insert(starts.begin(), StartPoint{seed->params.head(P.active), 0.1});
  }
  auto value_at = [&](const SchattenDecomposition& dec) { return ensemble_mutual_entropy(P.sigma, P.ch, dec); };
  SearchResult sr;
  if (cls == EntanglementClass::d) {
    const Objective f = [&](const RealVector& x) { return value_at(P.decomposition(x.data())); };
    sr = P.active == 0 ? SearchResult{RealVector(), f(RealVector()), true, 1} : maximize(f, P.active, budget, starts, 1.0);
  } else {
    const ConstrainedObjective f = [&](const RealVector& x) {
      const auto dec = P.decomposition(x.data());
      return ConstrainedValue{value_at(dec), P.commutator_violation(dec)};
    };
    if (P.active == 0) {
      const ConstrainedValue cv = f(RealVector());
      sr = SearchResult{RealVector(), cv.value, true, 1, 0, cv.violation <= options.schedule.feasibility_tol,
                        cv.violation};
    } else {
      sr = maximize_constrained(f, P.active, budget, starts, 1.0, options.schedule);
    }
  }
  ClassMutualResult res;
  res.cls = cls;
  res.converged = sr.converged;
  res.evals = sr.evals;
  res.feasible = sr.feasible;
  res.violation = sr.violation;
  res.params = sr.x;
  if (!sr.feasible) {
    // The constraint set is empty as far as the search can tell: the supremum over it is taken as 0.
    res.value = EntropyValue(0.0);
    return res;
  }
  const auto dec = P.decomposition(sr.x.data());
  const CompoundState cs = compound_state(P.rho, P.ch, dec);
  res.value = EntropyValue(std::max(0.0, mutual_entropy_fixed(P.rho, P.ch, dec).ensemble_form.nats()));
  res.compound = cs.theta();
  return res;
}

ClassMutualResult search_q(const ClassProblem& P, const SearchBudget& budget, const ClassMutualOptions& options,
                           const ClassMutualResult* seed) {
  const int f = options.f_dim > 0 ? options.f_dim : P.g * P.k;
  if (f < P.k) throw InvalidArgument("class q search: f_dim must be at least the output dimension");
  const int per = 2 * f * P.k;
  const int dim = P.active + P.g * per;

  auto isometries_at = [&](const RealVector& x) {
    std::vector<ComplexMatrix> v;
    for (int n = 0; n < P.g; ++n) {
      const ComplexMatrix z = params_to_matrix(std::span<const double>(x.data() + P.active + n * per, per), f, P.k);
      v.push_back(polar_isometry(z));
    }
    return v;
  };
  const ConstrainedObjective objective = [&](const RealVector& x) {
    const auto dec = P.decomposition(x.data());
    const auto iso = isometries_at(x);
    for (const auto& v : iso)
      if (!v.allFinite()) return ConstrainedValue{std::numeric_limits<double>::quiet_NaN(), 0.0};
    const auto amps = strict_amplitudes(P, dec, iso);
    return ConstrainedValue{relent_or_nan(assemble(amps), P.product_in_basis(dec.weights)), max_off_gram(amps)};
  };

  // Seeds share the Schatten coordinates of the seed (or the canonical ones).
  std::vector<double> xs(P.active, 0.0);
  if (seed != nullptr && seed->params.size() >= P.active)
    for (int i = 0; i < P.active; ++i) xs[i] = seed->params(i);
  // Orthogonal seed: V_n embeds K into its own slot of F, giving the d compound.
  // Coherent seed: V_n sends the j-th eigenvector of w_n to the j-th basis vector of F for every n,
  // which is the standard entanglement for the identity channel.
  auto seed_point = [&](bool coherent) {
    std::vector<double> x = xs;
    const auto dec = P.decomposition(xs.data());
    for (int n = 0; n < P.g; ++n) {
      ComplexMatrix v = ComplexMatrix::Zero(f, P.k);
      if (coherent) {
        v.topRows(P.k) = eigh_descending(P.output_of(dec.vectors[n])).vectors.adjoint();
      } else if ((n + 1) * P.k <= f) {
        v.middleRows(n * P.k, P.k).setIdentity();
      } else {
        v.topRows(P.k).setIdentity();
      }
      push_matrix(x, v);
    }
    return to_real_vector(x);
  };
  const std::vector<StartPoint> starts{{seed_point(false), 0.2}, {seed_point(true), 0.2}};
  const SearchResult sr = maximize_constrained(objective, dim, budget, starts, 1.0, options.schedule);

  ClassMutualResult res;
  res.cls = EntanglementClass::q;
  res.converged = sr.converged;
  res.evals = sr.evals;
  res.feasible = sr.feasible;
  res.violation = sr.violation;
  res.params = sr.x;
  const auto dec = P.decomposition(sr.x.data());
  const auto amps = strict_amplitudes(P, dec, isometries_at(sr.x));
  res.compound = P.to_computational(assemble(amps), dec.basis());
  res.value = EntropyValue(sr.feasible ? std::max(0.0, sr.value) : 0.0);
  return res;
}

// Marginals-only reading: amplitudes are free apart from the Gram normalization.
ClassMutualResult search_relaxed(const ClassProblem& P, EntanglementClass cls, const SearchBudget& budget,
                                 const ClassMutualOptions& options, const ClassMutualResult& strict) {
  const int f = options.f_dim > 0 ? options.f_dim : P.g * P.k;
  const auto dec = canonical_schatten(P.rho);
  std::vector<int> live;
  for (int n = 0; n < P.g; ++n)
    if (dec.weights[n] > tol::kZero) live.push_back(n);
  const int nl = static_cast<int>(live.size());
  if (f * P.k < nl) throw InvalidArgument("relaxed class search: f_dim too small");
  const int per = 2 * f * P.k;
  const bool diagonal = cls != EntanglementClass::q;

  auto amplitudes_at = [&](const RealVector& x) {
    ComplexMatrix stacked(f * P.k, nl);
    for (int i = 0; i < nl; ++i) {
      const ComplexMatrix a = params_to_matrix(std::span<const double>(x.data() + i * per, per), P.k, f);
      stacked.col(i) = Eigen::Map<const ComplexVector>(a.data(), a.size());
    }
    const ComplexMatrix q = polar_isometry(stacked);
    std::vector<ComplexMatrix> amps(P.g, ComplexMatrix::Zero(P.k, f));
    for (int i = 0; i < nl; ++i) {
      const ComplexVector col = q.col(i) * std::sqrt(dec.weights[live[i]]);
      amps[live[i]] = Eigen::Map<const ComplexMatrix>(col.data(), P.k, f);
    }
    return amps;
  };
  const ConstrainedObjective objective = [&](const RealVector& x) {
    const auto amps = amplitudes_at(x);
    for (const auto& a : amps)
      if (!a.allFinite()) return ConstrainedValue{std::numeric_limits<double>::quiet_NaN(), 0.0};
    ComplexMatrix out = ComplexMatrix::Zero(P.k, P.k);
    for (const auto& a : amps) out += a * a.adjoint();
    double violation = (out - P.sigma).norm();
    if (cls == EntanglementClass::c) violation = std::max(violation, max_block_commutator(amps));
    return ConstrainedValue{relent_or_nan(assemble(amps, diagonal), P.product_in_basis(dec.weights)), violation};
  };

  // Seed at the strict maximizer when it lives in the canonical basis.
  std::vector<StartPoint> starts;
  if (strict.feasible && strict.compound) {
    const auto kappa = entangling_in_basis(*strict.compound, P.g, P.k, dec.basis());
    std::vector<double> x;
    for (int n : live) {
      ComplexMatrix a = ComplexMatrix::Zero(P.k, f);
      const ComplexMatrix src = kappa.amplitude(n);
      a.leftCols(std::min<int>(f, static_cast<int>(src.cols()))) = src.leftCols(std::min<int>(f, static_cast<int>(src.cols())));
      push_matrix(x, a);
    }
    starts.push_back({to_real_vector(x), 0.1});
  }
  const SearchResult sr = maximize_constrained(objective, nl * per, budget, starts, 1.0, options.schedule);
  ClassMutualResult res;
  res.cls = cls;
  res.converged = sr.converged;
  res.evals = sr.evals + strict.evals;
  res.feasible = sr.feasible || strict.feasible;
  res.violation = sr.violation;
  res.params = sr.x;
  const double relaxed_value = sr.feasible ? sr.value : -1.0;
  if (relaxed_value >= strict.value.nats() || !strict.feasible) {
    res.value = EntropyValue(sr.feasible ? std::max(0.0, sr.value) : 0.0);
    res.compound = P.to_computational(assemble(amplitudes_at(sr.x), diagonal), dec.basis());
  } else {
    res.value = strict.value;
    res.compound = strict.compound;
  }
  return res;
}

}  // namespace

ClassMutualResult class_mutual_entropy(const DensityOperator& rho, const KrausChannel& ch, EntanglementClass cls,
                                       const SearchBudget& budget, const ClassMutualOptions& options,
                                       const ClassMutualResult* seed) {
  if (rho.dim() != ch.in_dim()) throw DimensionError("class_mutual_entropy: state and channel dimensions differ");
  const ClassProblem P(rho, ch);
  ClassMutualResult strict;
  if (cls == EntanglementClass::q) {
    if (seed == nullptr) {
      const ClassMutualResult d = search_c_or_d(P, EntanglementClass::d, budget, options, nullptr);
      strict = search_q(P, budget, options, &d);
    } else {
      strict = search_q(P, budget, options, seed);
    }
  } else {
    strict = search_c_or_d(P, cls, budget, options, seed);
  }
  if (!options.relaxed) return strict;
  return search_relaxed(P, cls, budget, options, strict);
}

std::vector<ClassMutualResult> class_mutual_chain(const DensityOperator& rho, const KrausChannel& ch,
                                                  const SearchBudget& budget, const ClassMutualOptions& options) {
  std::vector<ClassMutualResult> out;
  out.push_back(class_mutual_entropy(rho, ch, EntanglementClass::c, budget, options));
  out.push_back(class_mutual_entropy(rho, ch, EntanglementClass::d, budget, options,
                                     out.back().feasible ? &out.back() : nullptr));
  out.push_back(class_mutual_entropy(rho, ch, EntanglementClass::q, budget, options, &out.back()));
  return out;
}

CapacityReport class_capacity(const KrausChannel& ch, EntanglementClass cls, const SearchBudget& budget,
                              const ClassCapacityOptions& options, const CapacityReport* seed) {
  const int d = ch.in_dim();
  const int n = static_cast<int>(state_param_count(d, options.family));
  SearchBudget inner = options.inner;
  inner.seed = budget.seed;
  const Objective objective = [&](const RealVector& x) {
    const auto r = class_mutual_entropy(state_from_params(as_span(x), d, options.family), ch, cls, inner,
                                        options.mutual);
    return r.feasible ? r.value.nats() : std::numeric_limits<double>::quiet_NaN();
  };
  std::vector<StartPoint> starts;
  if (seed != nullptr && seed->input_state) starts.push_back({state_params_for(*seed->input_state, options.family), 0.1});
  starts.push_back({state_params_center(d, options.family), 0.5});
  const SearchResult sr = maximize(objective, n, budget, starts, 1.0);

  CapacityReport rep;
  rep.mode = "class-" + to_string(cls) + "/" + to_string(options.family.kind);
  rep.converged = sr.converged;
  rep.evals = sr.evals;
  rep.params = sr.x;
  const double log_k = std::log(static_cast<double>(ch.out_dim()));
  rep.bound = (cls == EntanglementClass::q ? 2.0 : 1.0) * std::min(family_entropy_bound(d, options.family), log_k);
  if (!std::isfinite(sr.value)) {
    rep.feasible = false;
    rep.value = EntropyValue(0.0);
    return rep;
  }
  rep.value = EntropyValue(std::max(0.0, sr.value));
  const DensityOperator rho = state_from_params(as_span(sr.x), d, options.family);
  rep.input_state = rho;
  const auto r = class_mutual_entropy(rho, ch, cls, inner, options.mutual);
  if (r.compound) rep.states.push_back(*r.compound);
  return rep;
}

std::vector<CapacityReport> class_capacity_chain(const KrausChannel& ch, const SearchBudget& budget,
                                                 const ClassCapacityOptions& options) {
  std::vector<CapacityReport> out;
  out.push_back(class_capacity(ch, EntanglementClass::c, budget, options));
  out.push_back(class_capacity(ch, EntanglementClass::d, budget, options, out.back().feasible ? &out.back() : nullptr));
  out.push_back(class_capacity(ch, EntanglementClass::q, budget, options, &out.back()));
  return out;
}

}  // namespace qmi
