#include "qmi/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <stdexcept>

#include "qmi/capacity.hpp"
#include "qmi/channels.hpp"
#include "qmi/entanglement.hpp"
#include "qmi/entropy.hpp"
#include "qmi/mutual_entropy.hpp"
#include "qmi/random.hpp"

namespace qmi::verify {

namespace {

constexpr double kLn2 = std::numbers::ln2;

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::uint64_t stream_of(const std::string& id) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : id) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

double frob(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).norm(); }

double min_eigenvalue(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(h), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double trace_norm(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(h), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

class Tally {
 public:
  /// Records err against tol; NaN counts as a failure.
  void within(double err, double tol, const std::string& what) {
    ++checked_;
    if (std::isnan(err)) err = std::numeric_limits<double>::infinity();
    max_error_ = std::max(max_error_, err);
    if (!(err <= tol)) note(what + ": error " + sci(err) + " > " + sci(tol));
  }

  void expect(bool ok, const std::string& what) {
    ++checked_;
    if (!ok) note(what);
  }

  /// lo <= hi + slack, error measured as the excess.
  void ordered(double lo, double hi, double slack, const std::string& what) {
    within(std::max(0.0, lo - hi), slack, what);
  }

  void fail(const std::string& what) {
    ++checked_;
    note(what);
  }

  CheckResult result(std::string id, std::string name, const std::string& detail) const {
    CheckResult r;
    r.id = std::move(id);
    r.name = std::move(name);
    r.checked = checked_;
    r.failed = failed_;
    r.passed = failed_ == 0 && checked_ > 0;
    r.max_error = max_error_;
    r.detail = first_.empty() ? detail : detail + "; first failure: " + first_;
    return r;
  }

 private:
  void note(const std::string& what) {
    if (failed_++ == 0) first_ = what;
  }

  long checked_ = 0;
  long failed_ = 0;
  double max_error_ = 0.0;
  std::string first_;
};

using Body = std::function<void(Tally&, Rng&, std::uint64_t)>;

CheckResult run_check(const std::string& id, const std::string& name, const std::string& detail,
                      std::uint64_t seed, const Body& body) {
  Tally t;
  Rng rng = derived_rng(seed, stream_of(id));
  try {
    body(t, rng, seed);
  } catch (const std::exception& e) {
    t.fail(std::string("exception: ") + e.what());
  }
  return t.result(id, name, detail);
}

std::string dims(int a, int b) { return std::to_string(a) + "x" + std::to_string(b); }

SearchBudget budget_for(std::uint64_t seed, int restarts, int evals, double tol) {
  return SearchBudget{restarts, evals, seed, tol};
}

DensityOperator basis_state(int d, int k) {
  std::vector<double> p(d, 0.0);
  p[k] = 1.0;
  return DensityOperator::diagonal(p);
}

ComplexMatrix hadamard() {
  ComplexMatrix h(2, 2);
  h << 1, 1, 1, -1;
  return h / std::sqrt(2.0);
}

std::vector<std::vector<double>> random_stochastic(int n, int m, Rng& rng) {
  std::vector<std::vector<double>> t(n);
  for (auto& row : t) row = random_probabilities(m, rng);
  return t;
}

SchattenDecomposition random_decomposition(const DensityOperator& rho, Rng& rng) {
  std::normal_distribution<double> n01;
  std::vector<double> p(schatten_param_count(rho));
  for (double& x : p) x = 2.0 * n01(rng);
  return schatten_family(rho, p);
}

std::vector<KrausChannel> qubit_zoo() {
  return {identity_channel(2),           depolarizing_channel(2, 0.3),
          amplitude_damping_channel(0.4), phase_damping_channel(2, 0.5),
          depolarizing_channel(2, 1.0),   constant_channel(2, DensityOperator::diagonal(std::vector<double>{0.8, 0.2}))};
}

std::vector<std::string> zoo_names() {
  return {"identity", "depolarizing(0.3)", "amplitude_damping(0.4)", "phase_damping(0.5)", "depolarizing(1)",
          "constant"};
}

std::vector<double> input_weights(const DensityOperator& theta, int g, int k) {
  ComplexMatrix rho = hermitian_part(partial_trace(theta.matrix(), g, k, Keep::First));
  return canonical_schatten(DensityOperator(rho / rho.trace().real())).weights;
}

DensityOperator random_commuting_state(const ComplexMatrix& u, Rng& rng) {
  const auto p = random_probabilities(static_cast<int>(u.rows()), rng);
  return DensityOperator(hermitian_part(u * DensityOperator::diagonal(p).matrix() * u.adjoint()));
}

// ---- operator-core -------------------------------------------------------------------------

void schatten_reconstruction(Tally& t, Rng& rng, std::uint64_t) {
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 300; ++trial) {
    const int d = 2 + trial % 5;
    const auto rho = trial % 2 ? random_degenerate_density(d, rng) : random_density(d, rng);
    std::vector<double> p(schatten_param_count(rho));
    for (double& x : p) x = 3.0 * n01(rng);
    const auto dec = schatten_family(rho, p);
    t.within(frob(dec.reconstruct(), rho.matrix()), 1e-8, "reconstruct d=" + std::to_string(d));
    const ComplexMatrix b = dec.basis();
    t.within(frob(b.adjoint() * b, ComplexMatrix::Identity(b.cols(), b.cols())), 1e-8, "orthonormal basis");
  }
}

void partial_trace_products(Tally& t, Rng& rng, std::uint64_t) {
  for (int trial = 0; trial < 200; ++trial) {
    const int a = 2 + trial % 3;
    const int b = 2 + (trial / 3) % 3;
    const auto rho = random_density(a, rng);
    const auto sigma = random_density(b, rng);
    const ComplexMatrix prod = tensor_product(rho.matrix(), sigma.matrix());
    t.within(frob(partial_trace(prod, a, b, Keep::First), rho.matrix()), 1e-10, "keep first " + dims(a, b));
    t.within(frob(partial_trace(prod, a, b, Keep::Second), sigma.matrix()), 1e-10, "keep second " + dims(a, b));
  }
}

void spectral_reconstruction(Tally& t, Rng& rng, std::uint64_t) {
  std::uniform_int_distribution<int> level(0, 2);
  for (int trial = 0; trial < 500; ++trial) {
    const int d = 2 + trial % 5;
    ComplexMatrix h;
    if (trial % 4 == 0) {
      // Repeated eigenvalues exercise the grouping.
      const ComplexMatrix u = random_unitary(d, rng);
      RealVector ev(d);
      for (int i = 0; i < d; ++i) ev(i) = level(rng) - 0.5;
      h = hermitian_part(u * ev.cast<Complex>().asDiagonal() * u.adjoint());
    } else {
      h = random_hermitian(d, rng);
    }
    t.within(frob(spectral(h).reconstruct(), h), 1e-10, "d=" + std::to_string(d));
  }
}

void purification_marginal(Tally& t, Rng& rng, std::uint64_t) {
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + trial % 5;
    const int rank = 1 + (trial / 5) % d;
    const auto theta = random_density_of_rank(d, rank, rng);
    const auto pur = purify(theta);
    const ComplexMatrix pure = pur.psi * pur.psi.adjoint();
    t.within(frob(partial_trace(pure, d, pur.ancilla_dim, Keep::First), theta.matrix()), 1e-9,
             "d=" + std::to_string(d) + " rank=" + std::to_string(rank));
    t.within(std::abs(pur.psi.norm() - 1.0), 1e-12, "unit norm");
  }
}

// ---- entropy ---------------------------------------------------------------------------------

void klein_inequality(Tally& t, Rng& rng, std::uint64_t) {
  for (int trial = 0; trial < 500; ++trial) {
    const int d = 2 + trial % 5;
    const auto rho = trial % 3 == 0 ? random_density_of_rank(d, 1 + trial % d, rng) : random_density(d, rng);
    const auto sigma = random_density(d, rng);
    const double s = umegaki_relative_entropy(rho, sigma).nats();
    const double dist = frob(rho.matrix(), sigma.matrix());
    t.within(std::max(0.0, -s), 0.0, "non-negativity");
    // Pinsker: S >= ||rho - sigma||_1^2 / 2, so S vanishes only when the states coincide.
    const double tn = trace_norm(rho.matrix() - sigma.matrix());
    t.within(std::max(0.0, 0.5 * tn * tn - s), 1e-10, "Pinsker lower bound");
    if (dist > 1e-7) t.expect(s > 0.0, "positive on distinct pair");
    t.within(umegaki_relative_entropy(rho, rho).nats(), 1e-12, "S(rho, rho)");
  }
}

void entropy_bound(Tally& t, Rng& rng, std::uint64_t) {
  std::uniform_real_distribution<double> u01;
  for (int d = 2; d <= 6; ++d) {
    t.within(std::abs(von_neumann_entropy(DensityOperator::maximally_mixed(d)).nats() - std::log(d)), 1e-9,
             "maximally mixed");
  }
  for (int trial = 0; trial < 300; ++trial) {
    const int d = 2 + trial % 5;
    const ComplexMatrix mm = ComplexMatrix::Identity(d, d) / static_cast<double>(d);
    ComplexMatrix m = random_density(d, rng).matrix();
    if (trial % 3 == 0) m = mm + 0.01 * u01(rng) * (m - mm);
    const DensityOperator rho(m);
    const double s = von_neumann_entropy(rho).nats();
    t.within(std::max(0.0, s - std::log(d)), 1e-12, "S <= ln d");
    if (frob(m, mm) > 1e-4) t.expect(s < std::log(d) - 1e-9, "strict below ln d away from I/d");
  }
}

void diagonal_kl(Tally& t, Rng& rng, std::uint64_t) {
  std::uniform_int_distribution<int> pick(0, 5);
  for (int trial = 0; trial < 500; ++trial) {
    const int d = 2 + trial % 5;
    auto p = random_probabilities(d, rng);
    if (trial % 4 == 0) {
      p[pick(rng) % d] = 0.0;
      double z = 0.0;
      for (double x : p) z += x;
      for (double& x : p) x /= z;
    }
    const auto q = random_probabilities(d, rng);
    const double u = umegaki_relative_entropy(DensityOperator::diagonal(p), DensityOperator::diagonal(q)).nats();
    t.within(std::abs(u - kl_of(p, q)), 1e-10, "d=" + std::to_string(d));
  }
}

void monotonicity(Tally& t, Rng& rng, std::uint64_t) {
  for (int trial = 0; trial < 200; ++trial) {
    const int din = 2 + trial % 3;
    const int dout = 2 + (trial / 3) % 3;
    const auto ch = random_channel(din, dout, 1 + trial % 3, rng);
    const auto rho = random_density(din, rng);
    const auto sigma = random_density(din, rng);
    const double before = umegaki_relative_entropy(rho, sigma).nats();
    const double after = umegaki_relative_entropy(ch.apply(rho), ch.apply(sigma)).nats();
    t.ordered(after, before, 1e-8, "channel " + dims(din, dout));
  }
}

// ---- channels --------------------------------------------------------------------------------

void check_valid(Tally& t, const KrausChannel& ch, const std::string& what) {
  t.within(ch.trace_preservation_defect(), 1e-9, what + " trace preservation");
  const ComplexMatrix choi = choi_matrix(ch);
  t.within(max_hermitian_defect(choi), 1e-9, what + " Choi hermitian");
  t.within(std::max(0.0, -min_eigenvalue(choi)), 1e-9, what + " Choi PSD");
}

void channel_validity(Tally& t, Rng& rng, std::uint64_t) {
  std::uniform_real_distribution<double> u01;
  auto zoo = qubit_zoo();
  const auto names = zoo_names();
  for (std::size_t i = 0; i < zoo.size(); ++i) check_valid(t, zoo[i], names[i]);
  for (int d = 2; d <= 4; ++d) {
    const std::string sd = " d=" + std::to_string(d);
    check_valid(t, identity_channel(d), "identity" + sd);
    check_valid(t, depolarizing_channel(d, u01(rng)), "depolarizing" + sd);
    check_valid(t, phase_damping_channel(d, u01(rng)), "phase damping" + sd);
    check_valid(t, unitary_channel(random_unitary(d, rng)), "unitary" + sd);
    std::vector<DensityOperator> states;
    for (int k = 0; k < d; ++k) states.push_back(random_density(3, rng));
    check_valid(t, cq_channel(states), "cq" + sd);
    check_valid(t, measurement_channel(random_povm(d, 3, rng)), "measure" + sd);
    check_valid(t, classical_channel(random_stochastic(d, 3, rng)), "classical" + sd);
    check_valid(t, constant_channel(d, random_density(2, rng)), "constant" + sd);
    const StinespringIsometry st(polar_isometry(random_ginibre(2 * d, d, rng)), 2, d);
    check_valid(t, stinespring_to_kraus(st), "stinespring" + sd);
  }
  check_valid(t, amplitude_damping_channel(u01(rng)), "amplitude damping");
  for (int trial = 0; trial < 100; ++trial) {
    const int din = 2 + trial % 3;
    const int dout = 2 + (trial / 3) % 3;
    check_valid(t, random_channel(din, dout, 1 + trial % 4, rng), "random " + dims(din, dout));
  }
}

void composition(Tally& t, Rng& rng, std::uint64_t) {
  for (int trial = 0; trial < 200; ++trial) {
    const int a = 2 + trial % 3;
    const int b = 2 + (trial / 3) % 3;
    const int c = 2 + (trial / 9) % 3;
    const auto first = random_channel(a, b, 1 + trial % 3, rng);
    const auto second = random_channel(b, c, 1 + (trial / 2) % 3, rng);
    const auto rho = random_density(a, rng);
    const auto both = compose(second, first);
    t.within(frob(both.apply(rho).matrix(), second.apply(first.apply(rho)).matrix()), 1e-10,
             "compose " + std::to_string(a) + "->" + std::to_string(b) + "->" + std::to_string(c));
  }
}

void cq_measure_closure(Tally& t, Rng& rng, std::uint64_t) {
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + trial % 3;
    const int letters = 2 + (trial / 3) % 3;
    const Povm povm = random_povm(d, letters, rng);
    std::vector<DensityOperator> coded;
    for (int k = 0; k < letters; ++k) coded.push_back(random_density(d, rng));
    const auto meas = measurement_channel(povm);
    const auto prep = cq_channel(coded);
    const auto cq_after_measure = compose(prep, meas);
    const auto measure_after_cq = compose(meas, prep);
    check_valid(t, cq_after_measure, "cq after measure");
    check_valid(t, measure_after_cq, "measure after cq");
    const auto rho = random_density(d, rng);
    t.within(frob(cq_after_measure.apply(rho).matrix(), prep.apply(meas.apply(rho)).matrix()), 1e-10,
             "cq after measure action");
    const auto lam = DensityOperator::diagonal(random_probabilities(letters, rng));
    t.within(frob(measure_after_cq.apply(lam).matrix(), meas.apply(prep.apply(lam)).matrix()), 1e-10,
             "measure after cq action");
  }
}

// ---- mutual entropy --------------------------------------------------------------------------

void form_agreement(Tally& t, Rng& rng, int n) {
  for (int trial = 0; trial < n; ++trial) {
    const int d = 2 + trial % 3;
    const auto rho = trial % 3 == 0 ? random_degenerate_density(d, rng) : random_density(d, rng);
    const auto ch = random_channel(d, 1 + trial % 4, 1 + trial % 3, rng);
    const auto terms = mutual_entropy_fixed(rho, ch, random_decomposition(rho, rng));
    t.within(std::abs(terms.compound_form.nats() - terms.ensemble_form.nats()), 1e-7, "d=" + std::to_string(d));
  }
}

void fundamental_inequality(Tally& t, Rng& rng, std::uint64_t seed, int n) {
  for (int trial = 0; trial < n; ++trial) {
    const int d = 2 + trial % 3;
    const auto rho = trial % 10 == 0 ? random_degenerate_density(d, rng) : random_density(d, rng);
    const auto ch = random_channel(d, 2 + trial % 3, 1 + trial % 3, rng);
    const double i = ohya_mutual_entropy(rho, ch, budget_for(seed + trial, 2, 150, 1e-8)).value.nats();
    t.within(std::max(0.0, -i), 0.0, "I >= 0");
    t.ordered(i, von_neumann_entropy(rho).nats(), 1e-7, "I <= S(rho)");
  }
}

void data_processing(Tally& t, Rng& rng, int n) {
  for (int trial = 0; trial < n; ++trial) {
    const int d = 2 + trial % 2;
    const int mid = 2 + (trial / 2) % 3;
    const auto rho = random_density(d, rng);
    const auto first = random_channel(d, mid, 1 + trial % 3, rng);
    const auto second = random_channel(mid, 2 + trial % 2, 1 + (trial / 3) % 3, rng);
    const double one = ohya_mutual_entropy(rho, first).value.nats();
    const double two = ohya_mutual_entropy(rho, compose(second, first)).value.nats();
    t.ordered(two, one, 1e-6, "composed " + dims(d, mid));
  }
}

void holevo_domination(Tally& t, Rng& rng, int n) {
  for (int trial = 0; trial < n; ++trial) {
    const int letters = 2 + trial % 3;
    const int d = 2 + (trial / 3) % 2;
    const int dout = 2 + (trial / 6) % 2;
    std::vector<DensityOperator> coded;
    for (int k = 0; k < letters; ++k) {
      coded.push_back(trial % 2 ? random_density(d, rng) : DensityOperator::pure(random_unit_vector(d, rng)));
    }
    const CqcInstance inst{ProbabilityVector(random_probabilities(letters, rng)), CodingScheme(coded),
                           random_channel(d, dout, 1 + trial % 3, rng), random_povm(dout, 1 + trial % 4, rng)};
    t.ordered(cqc_mutual_entropy(inst).nats(), holevo_bound(inst.lambda, coded, inst.channel).nats(), 1e-7,
              "instance " + std::to_string(trial));
  }
}

void classical_reduction(Tally& t, Rng& rng, int n) {
  for (int trial = 0; trial < n; ++trial) {
    const int a = 2 + trial % 3;
    const int b = 2 + (trial / 3) % 3;
    const auto table = random_stochastic(a, b, rng);
    const auto ch = classical_channel(table);
    const auto lambda = random_probabilities(a, rng);
    // Shannon oracle: H(output) - sum_k lambda_k H(row_k).
    std::vector<double> out(b, 0.0);
    double conditional = 0.0;
    for (int k = 0; k < a; ++k) {
      for (int j = 0; j < b; ++j) {
        out[j] += lambda[k] * table[k][j];
        if (table[k][j] > 0) conditional -= lambda[k] * table[k][j] * std::log(table[k][j]);
      }
    }
    double shannon = -conditional;
    for (double o : out)
      if (o > 0) shannon -= o * std::log(o);
    const double ohya = ohya_mutual_entropy(DensityOperator::diagonal(lambda), ch).value.nats();
    t.within(std::abs(ohya - shannon), 1e-8, "ohya vs Shannon " + dims(a, b));
    t.within(std::abs(classical_mutual_entropy(ProbabilityVector(lambda), ch).nats() - shannon), 1e-8,
             "classical vs Shannon");
  }
}

// ---- cqc-capacity ----------------------------------------------------------------------------

void cqc_forms(Tally& t, Rng& rng, std::uint64_t) {
  for (int trial = 0; trial < 200; ++trial) {
    const int letters = 2 + trial % 3;
    const int d = 2 + (trial / 3) % 2;
    const int dout = 2 + (trial / 6) % 2;
    std::vector<DensityOperator> coded;
    for (int k = 0; k < letters; ++k) coded.push_back(random_density(d, rng));
    const auto lambda = random_probabilities(letters, rng);
    const auto ch = random_channel(d, dout, 1 + trial % 3, rng);
    const auto povm = random_povm(dout, 2 + trial % 3, rng);
    std::vector<std::vector<double>> rows;
    for (const auto& s : coded) rows.push_back(povm.probabilities(ch.apply(s).matrix()));
    std::vector<double> mix(rows.front().size(), 0.0);
    for (int k = 0; k < letters; ++k)
      for (std::size_t j = 0; j < mix.size(); ++j) mix[j] += lambda[k] * rows[k][j];
    double kl = 0.0;
    double diff = shannon_of(mix);
    for (int k = 0; k < letters; ++k) {
      kl += lambda[k] * kl_of(rows[k], mix);
      diff -= lambda[k] * shannon_of(rows[k]);
    }
    t.within(std::abs(kl - diff), 1e-8, "divergence vs entropy difference");
    const CqcInstance inst{ProbabilityVector(lambda), CodingScheme(coded), ch, povm};
    t.within(std::abs(cqc_mutual_entropy(inst).nats() - kl), 1e-8, "library value");
  }
}

void cqc_chain(Tally& t, Rng& rng, std::uint64_t seed, bool noiseless_check) {
  const SearchBudget budget = budget_for(seed, 3, 400, 1e-12);
  for (int n : {2, 3}) {
    for (int trial = 0; trial < 2; ++trial) {
      std::vector<DensityOperator> coded;
      for (int k = 0; k < n; ++k) coded.push_back(DensityOperator::pure(random_unit_vector(2, rng)));
      const CqcInstance inst{ProbabilityVector(random_probabilities(n, rng)), CodingScheme(coded),
                             random_channel(2, 2, 1 + trial, rng), random_povm(2, 2, rng)};
      const auto chain = cqc_capacity_chain(inst, budget);
      const std::string w = "alphabet " + std::to_string(n);
      t.within(std::max(0.0, -chain[0].value.nats()), 0.0, w + " C >= 0");
      t.ordered(chain[0].value.nats(), chain[1].value.nats(), 2 * budget.tol, w + " C <= C_c");
      t.ordered(chain[1].value.nats(), chain[2].value.nats(), 2 * budget.tol, w + " C_c <= C_cd");
      t.ordered(chain[2].value.nats(), std::log(n), 2 * budget.tol, w + " C_cd <= ln n");
    }
  }
  if (noiseless_check) {
    std::vector<DensityOperator> coded{basis_state(2, 0), basis_state(2, 1)};
    const CqcInstance inst{ProbabilityVector::uniform(2), CodingScheme(coded), identity_channel(2),
                           Povm::computational(2)};
    t.within(std::abs(cqc_capacity(inst, CqcMode::Fixed, budget).value.nats() - kLn2), 1e-5, "noiseless ln 2");
  }
}

void capacity_chain_zoo(Tally& t, std::uint64_t seed) {
  const SearchBudget budget = budget_for(seed, 3, 300, 1e-10);
  const auto zoo = qubit_zoo();
  const auto names = zoo_names();
  for (std::size_t i = 0; i < zoo.size(); ++i) {
    const auto c = quantum_capacity(zoo[i], budget);
    const auto cp = pseudo_capacity(zoo[i], 0, budget, {}, &c);
    t.within(std::max(0.0, -c.value.nats()), 0.0, names[i] + " C >= 0");
    t.ordered(c.value.nats(), cp.value.nats(), 2 * budget.tol, names[i] + " C <= C_p");
    t.ordered(cp.value.nats(), c.bound, 2 * budget.tol, names[i] + " C_p <= sup S");
  }
}

void identity_capacity(Tally& t, std::uint64_t seed, int max_dim) {
  const SearchBudget budget = budget_for(seed, 4, 400, 1e-10);
  for (int d = 2; d <= max_dim; ++d) {
    const double c = quantum_capacity(identity_channel(d), budget).value.nats();
    t.within(std::abs(c - std::log(d)), 1e-3, "C(id, C^" + std::to_string(d) + ")");
  }
}

void povm_partition(Tally& t, Rng& rng, std::uint64_t) {
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 300; ++trial) {
    const int d = 2 + trial % 3;
    const int outcomes = 2 + (trial / 3) % 4;
    const double scale = 0.1 + 3.0 * (trial % 7) / 6.0;
    std::vector<double> x(povm_param_count(d, outcomes));
    for (double& v : x) v = scale * n01(rng);
    const auto effects = povm_from_params(x, d, outcomes);
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    double worst = 0.0;
    for (const auto& e : effects) {
      sum += e;
      worst = std::max(worst, -min_eigenvalue(e));
    }
    t.within(frob(sum, ComplexMatrix::Identity(d, d)), 1e-9, "sum of effects");
    t.within(std::max(0.0, worst), 1e-9, "effects PSD");
  }
}

// ---- entanglement ----------------------------------------------------------------------------

void reassembly_and_weak(Tally& t, Rng& rng, bool reassembly, bool weak) {
  const std::pair<int, int> shapes[] = {{2, 2}, {2, 3}, {3, 3}};
  for (int trial = 0; trial < 500; ++trial) {
    const auto [g, k] = shapes[trial % 3];
    const int rank = 1 + trial % (g * k);
    const auto theta = random_density_of_rank(g * k, rank, rng);
    const auto op = entangling_from_state(theta, g, k);
    if (reassembly) t.within(frob(op.compound(), theta.matrix()), 1e-8, "reassembly " + dims(g, k));
    if (weak) t.within(weak_orthogonality_defect(op, input_weights(theta, g, k)), 1e-8, "weak orthogonality");
  }
}

void weak_negative_control(Tally& t) {
  const DensityOperator theta = DensityOperator::diagonal(std::vector<double>{0.7, 0.0, 0.0, 0.3});
  const auto op = entangling_in_basis(theta, 2, 2, hadamard());
  t.expect(weak_orthogonality_defect(op, {0.7, 0.3}) > 0.1, "rotated basis must violate weak orthogonality");
}

void strong_orthogonality(Tally& t, Rng& rng) {
  for (int trial = 0; trial < 500; ++trial) {
    const int g = 2 + trial % 2;
    const int k = 2 + (trial / 2) % 2;
    std::vector<DensityOperator> w;
    for (int n = 0; n < g; ++n) w.push_back(random_density_of_rank(k, 1 + n % k, rng));
    const auto ec = d_compound(ProbabilityVector(random_probabilities(g, rng)), w);
    if (!ec.kappa) {
      t.fail("d_compound returned no entangling operator");
      continue;
    }
    t.within(strong_orthogonality_defect(*ec.kappa), 1e-9, "strong orthogonality " + dims(g, k));
  }
}

void standard_closed_form(Tally& t, Rng& rng) {
  for (int trial = 0; trial < 60; ++trial) {
    const int d = 2 + trial % 3;
    const auto sigma = random_density(d, rng);
    const auto ec = standard_entanglement(sigma);
    const double closed = q_entropy_closed_form({{1.0, sigma}}).nats();
    t.within(std::abs(entangled_mutual_entropy(ec.compound).nats() - closed), 1e-7, "d=" + std::to_string(d));
  }
}

void classification(Tally& t, Rng& rng, bool triple) {
  if (triple) {
    const auto rho = random_density(2, rng);
    const auto sigma = random_density(3, rng);
    const DensityOperator product(tensor_product(rho.matrix(), sigma.matrix()));
    t.expect(classify_compound(product, 2, 3).cls == EntanglementClass::c, "product state is c");
    const DensityOperator zero = DensityOperator::pure(ComplexVector::Unit(2, 0));
    ComplexVector plus = ComplexVector::Ones(2) / std::sqrt(2.0);
    const auto noncommuting = d_compound(ProbabilityVector::uniform(2), {zero, DensityOperator::pure(plus)});
    t.expect(classify_compound(noncommuting.compound.theta(), 2, 2).cls == EntanglementClass::d,
             "|0>,|+> diagonal compound is d");
    const auto bell = standard_entanglement(DensityOperator::maximally_mixed(2));
    t.expect(classify_compound(bell.compound.theta(), 2, 2).cls == EntanglementClass::q, "Bell state is q");
  }
  for (int trial = 0; trial < 100; ++trial) {
    const int g = 2 + trial % 2;
    const int k = 2 + (trial / 2) % 2;
    const auto p = random_probabilities(g, rng);
    const ComplexMatrix u = random_unitary(k, rng);
    std::vector<DensityOperator> commuting;
    std::vector<DensityOperator> generic;
    for (int n = 0; n < g; ++n) {
      commuting.push_back(random_commuting_state(u, rng));
      generic.push_back(random_density(k, rng));
    }
    const auto c = d_compound(ProbabilityVector(p), commuting);
    const auto d = d_compound(ProbabilityVector(p), generic);
    const auto q = standard_entanglement(random_density(k, rng));
    t.expect(classify_compound(c.compound.theta(), g, k).cls == EntanglementClass::c, "commuting family is c");
    t.expect(classify_compound(d.compound.theta(), g, k).cls == EntanglementClass::d, "non-commuting family is d");
    t.expect(classify_compound(q.compound.theta(), k, k).cls == EntanglementClass::q, "standard family is q");
  }
}

void class_capacity_zoo(Tally& t, std::uint64_t seed) {
  const SearchBudget budget = budget_for(seed, 2, 120, 1e-8);
  ClassCapacityOptions opt;
  opt.inner = budget_for(seed + 1, 1, 200, 1e-9);
  const auto zoo = qubit_zoo();
  const auto names = zoo_names();
  for (std::size_t i = 0; i < zoo.size(); ++i) {
    const auto chain = class_capacity_chain(zoo[i], budget, opt);
    t.ordered(chain[1].value.nats(), chain[2].value.nats(), 2 * budget.tol, names[i] + " C_d <= C_q");
    t.ordered(chain[0].value.nats(), chain[1].value.nats(), 2 * budget.tol, names[i] + " C_c <= C_d");
    if (i == 0) {
      t.ordered(chain[1].value.nats(), kLn2, budget.tol, "C_d(id) <= ln dim K");
      t.ordered(chain[2].value.nats(), 2 * kLn2, budget.tol, "C_q(id) <= 2 ln dim K");
    }
  }
}

// ---- acceptance ------------------------------------------------------------------------------

void ac1(Tally& t, Rng& rng, std::uint64_t) {
  for (int d = 2; d <= 6; ++d) {
    t.within(std::abs(von_neumann_entropy(DensityOperator::maximally_mixed(d)).nats() - std::log(d)), 1e-10,
             "S(I/" + std::to_string(d) + ")");
  }
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + trial % 5;
    t.within(von_neumann_entropy(DensityOperator::pure(random_unit_vector(d, rng))).nats(), 1e-12, "S(pure)");
    const auto rho = trial % 2 ? random_density(d, rng) : random_density_of_rank(d, 1 + trial % d, rng);
    t.within(umegaki_relative_entropy(rho, rho).nats(), 1e-12, "S(rho, rho)");
    // rho has weight on the kernel of a rank-deficient sigma.
    const auto sigma = random_density_of_rank(d, 1 + trial % (d - 1), rng);
    t.expect(!umegaki_relative_entropy(random_density(d, rng), sigma).is_finite(), "support violation gives +inf");
  }
  t.expect(!umegaki_relative_entropy(basis_state(2, 0), basis_state(2, 1)).is_finite(), "|0> vs |1> gives +inf");
}

void ac3(Tally& t, Rng& rng, std::uint64_t seed) {
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + trial % 4;
    const auto rho = random_density(d, rng);
    const auto r = ohya_mutual_entropy(rho, identity_channel(d));
    t.within(std::abs(r.value.nats() - von_neumann_entropy(rho).nats()), 1e-9, "nondegenerate d=" + std::to_string(d));
  }
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 3;
    const auto rho = random_degenerate_density(d, rng);
    const auto r = ohya_mutual_entropy(rho, identity_channel(d), budget_for(seed + trial, 4, 300, 1e-10));
    t.within(std::abs(r.value.nats() - von_neumann_entropy(rho).nats()), 1e-5, "degenerate d=" + std::to_string(d));
  }
}

void ac4(Tally& t, Rng& rng, std::uint64_t) {
  classical_reduction(t, rng, 50);
  const double e = 0.1;
  const auto bsc = classical_channel({{1 - e, e}, {e, 1 - e}});
  const double oracle = kLn2 + e * std::log(e) + (1 - e) * std::log(1 - e);
  const double value = ohya_mutual_entropy(DensityOperator::maximally_mixed(2), bsc).value.nats();
  t.within(std::abs(value - oracle), 1e-8, "BSC(0.1) vs arithmetic oracle");
  t.within(std::abs(value - 0.368064), 1e-6, "BSC(0.1) = 0.368064");
}

void ac11(Tally& t, Rng& rng, std::uint64_t seed) {
  standard_closed_form(t, rng);
  const SearchBudget budget = budget_for(seed, 4, 600, 1e-10);
  std::vector<DensityOperator> sigmas{DensityOperator::maximally_mixed(2),
                                      DensityOperator::diagonal(std::vector<double>{0.7, 0.3}), random_density(2, rng),
                                      random_density(3, rng), DensityOperator::maximally_mixed(3)};
  for (const auto& s : sigmas) {
    const auto r = q_entropy_sup(s, budget);
    t.within(std::abs(r.value.nats() - r.closed_form.nats()), 1e-3, "q_entropy_sup d=" + std::to_string(s.dim()));
    t.within(std::abs(r.closed_form.nats() - 2 * von_neumann_entropy(s).nats()), 1e-9, "closed form = 2 S");
  }
  const auto bell = standard_entanglement(DensityOperator::maximally_mixed(2));
  t.within(std::abs(conditional_and_degree(bell.compound).degree + kLn2), 1e-7, "degree at I/2 = -ln 2");
}

void ac12(Tally& t, Rng& rng, std::uint64_t seed) {
  const SearchBudget budget = budget_for(seed, 4, 900, 1e-10);
  for (int trial = 0; trial < 4; ++trial) {
    const auto rho = trial == 0 ? DensityOperator::maximally_mixed(2) : random_density(2, rng);
    const double s = von_neumann_entropy(rho).nats();
    const auto chain = class_mutual_chain(rho, identity_channel(2), budget);
    t.within(std::abs(chain[0].value.nats() - s), 1e-4, "I_c(rho, id) = S");
    t.within(std::abs(chain[1].value.nats() - s), 1e-4, "I_d(rho, id) = S");
    t.within(std::abs(chain[2].value.nats() - 2 * s), 1e-3, "I_q(rho, id) = 2 S");
  }
  for (int trial = 0; trial < 6; ++trial) {
    const auto rho = random_density(2, rng);
    const auto ch = random_channel(2, 2, 1 + trial % 3, rng);
    const auto chain = class_mutual_chain(rho, ch, budget);
    t.ordered(chain[1].value.nats(), chain[2].value.nats(), 2 * budget.tol, "I_d <= I_q");
    t.ordered(chain[0].value.nats(), chain[1].value.nats(), 2 * budget.tol, "I_c <= I_d");
  }
}

struct Criterion {
  const char* name;
  const char* detail;
  Body body;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list{
      {"entropy closed forms", "S(I/d)=ln d 1e-10, S(pure)=0 and S(rho,rho)=0 1e-12, support violation +inf", ac1},
      {"compound and ensemble forms agree", "200 random triples, 1e-7",
       [](Tally& t, Rng& r, std::uint64_t) { form_agreement(t, r, 200); }},
      {"identity channel gives S(rho)", "nondegenerate 1e-9, degenerate via search 1e-5", ac3},
      {"Shannon reduction", "diagonal input, classical channel 1e-8; BSC(0.1) 1e-6", ac4},
      {"fundamental inequality", "0 <= I <= S(rho) + 1e-7, 500 instances",
       [](Tally& t, Rng& r, std::uint64_t s) { fundamental_inequality(t, r, s, 500); }},
      {"data processing", "I(rho; L2 L1) <= I(rho; L1) + 1e-6, 100 pairs",
       [](Tally& t, Rng& r, std::uint64_t) { data_processing(t, r, 100); }},
      {"capacity chain", "0 <= C <= C_p <= sup S + 2 tol on the qubit zoo; C(id, C^d) = ln d 1e-3, d=2,3",
       [](Tally& t, Rng&, std::uint64_t s) {
         capacity_chain_zoo(t, s);
         identity_capacity(t, s, 3);
       }},
      {"C-Q-C chain", "C <= C_c <= C_cd <= ln n + 2 tol, n=2,3; noiseless ln 2 1e-5",
       [](Tally& t, Rng& r, std::uint64_t s) { cqc_chain(t, r, s, true); }},
      {"Holevo domination", "200 instances, 1e-7",
       [](Tally& t, Rng& r, std::uint64_t) { holevo_domination(t, r, 200); }},
      {"entangling operator reconstruction", "reassembly 1e-8, weak 1e-8, strong 1e-9, 500 states each",
       [](Tally& t, Rng& r, std::uint64_t) {
         reassembly_and_weak(t, r, true, true);
         strong_orthogonality(t, r);
       }},
      {"q-entropy", "closed form 1e-7, search 1e-3, degree -ln 2 1e-7", ac11},
      {"class orderings", "identity channel 1e-3/1e-4; I_q >= I_d >= I_c - 2 tol", ac12},
      {"classification", "canonical triple and 100 members of each family",
       [](Tally& t, Rng& r, std::uint64_t) { classification(t, r, true); }},
  };
  return list;
}

struct Entry {
  const char* id;
  const char* name;
  const char* detail;
  Body body;
};

std::vector<Entry> module_suite(const std::string& name) {
  if (name == "operator-core") {
    return {
        {"OC1", "Schatten family reconstructs rho", "300 states, 1e-8", schatten_reconstruction},
        {"OC2", "partial trace of products", "200 pairs, both factors, 1e-10", partial_trace_products},
        {"OC3", "spectral reconstruction", "500 Hermitian matrices, dims 2-6, 1e-10", spectral_reconstruction},
        {"OC4", "purification marginal", "200 states, dims 2-6, 1e-9", purification_marginal},
    };
  }
  if (name == "entropy") {
    return {
        {"EN1", "Klein inequality", "500 pairs, S >= 0 and Pinsker", klein_inequality},
        {"EN2", "ln d bound", "equality only at I/d", entropy_bound},
        {"EN3", "diagonal pairs reduce to KL", "500 pairs, 1e-10", diagonal_kl},
        {"EN4", "monotonicity under channels", "200 random channels, 1e-8", monotonicity},
    };
  }
  if (name == "channels") {
    return {
        {"CH1", "trace preservation and Choi positivity", "zoo and 100 random channels, 1e-9", channel_validity},
        {"CH2", "composition", "200 pairs, 1e-10", composition},
        {"CH3", "cq and measure compose to channels", "50 instances", cq_measure_closure},
    };
  }
  if (name == "mutual-entropy") {
    return {
        {"ME1", "compound and ensemble forms agree", "200 triples, 1e-7",
         [](Tally& t, Rng& r, std::uint64_t) { form_agreement(t, r, 200); }},
        {"ME2", "fundamental inequality", "200 instances, 1e-7",
         [](Tally& t, Rng& r, std::uint64_t s) { fundamental_inequality(t, r, s, 200); }},
        {"ME3", "data processing", "100 pairs, 1e-6", [](Tally& t, Rng& r, std::uint64_t) { data_processing(t, r, 100); }},
        {"ME4", "C-Q-C value below the Holevo bound", "200 instances, 1e-7",
         [](Tally& t, Rng& r, std::uint64_t) { holevo_domination(t, r, 200); }},
        {"ME5", "classical reduction", "50 instances, 1e-8",
         [](Tally& t, Rng& r, std::uint64_t) { classical_reduction(t, r, 50); }},
    };
  }
  if (name == "cqc-capacity") {
    return {
        {"CQ1", "divergence and entropy-difference forms agree", "200 instances, 1e-8", cqc_forms},
        {"CQ2", "Holevo domination", "200 instances, 1e-7",
         [](Tally& t, Rng& r, std::uint64_t) { holevo_domination(t, r, 200); }},
        {"CQ3", "capacity chains are ordered", "C-Q-C modes and C <= C_p, 2 tol",
         [](Tally& t, Rng& r, std::uint64_t s) {
           cqc_chain(t, r, s, false);
           capacity_chain_zoo(t, s + 1);
         }},
        {"CQ4", "identity channel capacity", "ln d within 1e-3, d = 2, 3, 4",
         [](Tally& t, Rng&, std::uint64_t s) { identity_capacity(t, s, 4); }},
        {"CQ5", "POVM parameterization sums to I", "300 parameter draws, 1e-9", povm_partition},
    };
  }
  if (name == "entanglement") {
    return {
        {"EG1", "block reassembly", "500 states, 1e-8",
         [](Tally& t, Rng& r, std::uint64_t) { reassembly_and_weak(t, r, true, false); }},
        {"EG2", "weak orthogonality", "500 states 1e-8, rotated-basis negative control > 0.1",
         [](Tally& t, Rng& r, std::uint64_t) {
           reassembly_and_weak(t, r, false, true);
           weak_negative_control(t);
         }},
        {"EG3", "strong orthogonality of d-compounds", "500 members, 1e-9",
         [](Tally& t, Rng& r, std::uint64_t) { strong_orthogonality(t, r); }},
        {"EG4", "standard entanglement attains the closed form", "dims 2-4, 1e-7",
         [](Tally& t, Rng& r, std::uint64_t) { standard_closed_form(t, r); }},
        {"EG5", "class of constructed compounds", "c, d and q families",
         [](Tally& t, Rng& r, std::uint64_t) { classification(t, r, false); }},
        {"EG6", "class capacities ordered", "C_q >= C_d >= C_c - 2 tol on the qubit zoo",
         [](Tally& t, Rng&, std::uint64_t s) { class_capacity_zoo(t, s); }},
    };
  }
  throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace

long SuiteReport::checked() const {
  long n = 0;
  for (const auto& c : checks) n += c.checked;
  return n;
}

long SuiteReport::failed() const {
  long n = 0;
  for (const auto& c : checks) n += c.passed ? 0 : 1;
  return n;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"operator-core", "entropy",      "channels",  "mutual-entropy",
                                              "cqc-capacity",  "entanglement", "acceptance"};
  return names;
}

CheckResult acceptance_criterion(int number, std::uint64_t seed) {
  if (number < 1 || number > kAcceptanceCount) throw std::invalid_argument("no acceptance criterion " + std::to_string(number));
  const auto& c = criteria()[number - 1];
  return run_check("AC" + std::to_string(number), c.name, c.detail, seed, c.body);
}

SuiteReport run_suite(const std::string& name, std::uint64_t seed) {
  SuiteReport rep;
  rep.name = name;
  if (name == "acceptance") {
    for (int i = 1; i <= kAcceptanceCount; ++i) rep.checks.push_back(acceptance_criterion(i, seed));
    return rep;
  }
  for (const auto& e : module_suite(name)) rep.checks.push_back(run_check(e.id, e.name, e.detail, seed, e.body));
  return rep;
}

std::vector<SuiteReport> run_verify(const VerifyOptions& options) {
  const auto& names = options.suites.empty() ? suite_names() : options.suites;
  std::vector<SuiteReport> out;
  for (const auto& n : names) out.push_back(run_suite(n, options.seed));
  return out;
}

}  // namespace qmi::verify
