#include <numbers>

#include "qmi/capacity.hpp"
#include "support.hpp"

using namespace qmi;
using namespace qmi::testing;

namespace {

const double kLn2 = std::numbers::ln2;

DensityOperator basis_state(int d, int k) {
  std::vector<double> p(d, 0.0);
  p[k] = 1.0;
  return DensityOperator::diagonal(p);
}

CqcInstance noiseless(int n) {
  std::vector<DensityOperator> coded;
  for (int k = 0; k < n; ++k) coded.push_back(basis_state(n, k));
  return {ProbabilityVector::uniform(n), CodingScheme(coded), identity_channel(n), Povm::computational(n)};
}

std::vector<KrausChannel> qubit_zoo() {
  return {identity_channel(2),          depolarizing_channel(2, 0.3), amplitude_damping_channel(0.4),
          phase_damping_channel(2, 0.5), depolarizing_channel(2, 1.0), constant_channel(2, DensityOperator(diag({0.8, 0.2})))};
}

}  // namespace

TEST_CASE("cqc_mutual_entropy examples") {
  CHECK(cqc_mutual_entropy(noiseless(2)).nats() == doctest::Approx(kLn2).epsilon(1e-12));

  Rng rng = derived_rng(19, 0);
  const auto s = random_density(2, rng);
  const CqcInstance same{ProbabilityVector::uniform(2), CodingScheme({s, s}), identity_channel(2), Povm::computational(2)};
  CHECK(cqc_mutual_entropy(same).nats() == doctest::Approx(0.0));

  // |0>, |+> with z decoding: rows (1, 0) and (1/2, 1/2), mixture (3/4, 1/4).
  const auto zero = DensityOperator::pure(ket({1.0, 0.0}));
  const auto plus = DensityOperator::pure(ket({1.0, 1.0}) / std::sqrt(2.0));
  const CqcInstance zp{ProbabilityVector::uniform(2), CodingScheme({zero, plus}), identity_channel(2),
                       Povm::computational(2)};
  const double expect = h2(0.75) - 0.5 * kLn2;
  const double v = cqc_mutual_entropy(zp).nats();
  CHECK(v == doctest::Approx(expect).epsilon(1e-12));
  CHECK(v <= holevo_bound(zp.lambda, zp.coding.states(), zp.channel).nats());

  CqcInstance bad = zp;
  bad.decoding = Povm::computational(3);
  CHECK_THROWS_AS(cqc_mutual_entropy(bad), DimensionError);
}

TEST_CASE("Holevo domination on 200 random instances") {
  Rng rng = derived_rng(19, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 3;
    const int d = 2 + (trial / 3) % 2;
    const int d_out = 2 + (trial / 6) % 2;
    std::vector<DensityOperator> coded;
    for (int k = 0; k < n; ++k) coded.push_back(trial % 2 ? random_density(d, rng)
                                                           : DensityOperator::pure(random_unit_vector(d, rng)));
    const CqcInstance inst{ProbabilityVector(random_probabilities(n, rng)), CodingScheme(coded),
                           random_channel(d, d_out, 2, rng), random_povm(d_out, 1 + trial % 4, rng)};
    REQUIRE(cqc_mutual_entropy(inst).nats() <= holevo_bound(inst.lambda, coded, inst.channel).nats() + 1e-7);
  }
}

TEST_CASE("state parameterization") {
  Rng rng = derived_rng(19, 2);
  std::normal_distribution<double> n01;
  for (const auto family : {StateFamily::full(), StateFamily::of_rank(2), StateFamily::diagonal()}) {
    const int d = 3;
    const auto center = state_from_params(as_span(state_params_center(d, family)), d, family);
    CHECK(std::abs(von_neumann_entropy(center).nats() - family_entropy_bound(d, family)) < 1e-12);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> x(state_param_count(d, family));
      for (double& v : x) v = n01(rng);
      const auto rho = state_from_params(x, d, family);
      REQUIRE(von_neumann_entropy(rho).nats() <= family_entropy_bound(d, family) + 1e-12);
      if (family.kind == StateFamily::Kind::Rank) REQUIRE(numerical_rank(rho.matrix(), 1e-10) <= 2);
    }
  }
}

TEST_CASE("quantum_capacity") {
  const SearchBudget budget{4, 400, 5, 1e-10};
  SUBCASE("identity qubit") {
    const auto rep = quantum_capacity(identity_channel(2), budget);
    CHECK(std::abs(rep.value.nats() - kLn2) < 1e-4);
  }
  SUBCASE("identity qutrit") {
    const auto rep = quantum_capacity(identity_channel(3), budget);
    CHECK(std::abs(rep.value.nats() - std::log(3.0)) < 1e-3);
  }
  SUBCASE("completely depolarizing") {
    CHECK(quantum_capacity(depolarizing_channel(2, 1.0), budget).value.nats() < 1e-6);
  }
  SUBCASE("rank-limited family") {
    const auto rep = quantum_capacity(identity_channel(3), budget, {StateFamily::of_rank(2)});
    CHECK(rep.value.nats() <= kLn2 + 1e-6);
    CHECK(std::abs(rep.value.nats() - kLn2) < 1e-3);
  }
}

TEST_CASE("capacity chain 0 <= C <= C_p <= sup S on the qubit zoo") {
  const SearchBudget budget{3, 300, 5, 1e-10};
  for (const auto& ch : qubit_zoo()) {
    const auto c = quantum_capacity(ch, budget);
    const auto cp = pseudo_capacity(ch, 0, budget, {}, &c);
    CHECK(c.value.nats() >= 0.0);
    CHECK(c.value.nats() <= cp.value.nats() + 2 * budget.tol);
    CHECK(cp.value.nats() <= c.bound + 2 * budget.tol);
  }
  CHECK(pseudo_capacity(depolarizing_channel(2, 1.0), 0, budget).value.nats() < 1e-6);
}

TEST_CASE("cqc_capacity modes") {
  const SearchBudget budget{3, 400, 5, 1e-12};
  SUBCASE("noiseless binary reaches ln 2") {
    const auto rep = cqc_capacity(noiseless(2), CqcMode::Fixed, budget);
    CHECK(std::abs(rep.value.nats() - kLn2) < 1e-5);
    CHECK(rep.mode == "fixed");
  }
  SUBCASE("chains on binary and ternary alphabets") {
    Rng rng = derived_rng(19, 3);
    for (int n : {2, 3}) {
      for (int trial = 0; trial < 2; ++trial) {
        std::vector<DensityOperator> coded;
        for (int k = 0; k < n; ++k) coded.push_back(DensityOperator::pure(random_unit_vector(2, rng)));
        const CqcInstance inst{ProbabilityVector(random_probabilities(n, rng)), CodingScheme(coded),
                               random_channel(2, 2, 2, rng), random_povm(2, 2, rng)};
        const auto chain = cqc_capacity_chain(inst, budget);
        REQUIRE(chain.size() == 3);
        CHECK(chain[0].value.nats() >= 0.0);
        CHECK(chain[0].value.nats() <= chain[1].value.nats() + 2 * budget.tol);
        CHECK(chain[1].value.nats() <= chain[2].value.nats() + 2 * budget.tol);
        CHECK(chain[2].value.nats() <= std::log(n) + 2 * budget.tol);
      }
    }
  }
  SUBCASE("constant channel carries nothing") {
    CqcInstance inst = noiseless(2);
    inst.channel = constant_channel(2, DensityOperator(diag({0.6, 0.4})));
    for (auto mode : {CqcMode::Fixed, CqcMode::CodingFree, CqcMode::CodingDecodingFree}) {
      CHECK(cqc_capacity(inst, mode, budget).value.nats() < 1e-6);
    }
  }
  SUBCASE("options") {
    CqcOptions opt;
    opt.projective_only = true;
    const auto rep = cqc_capacity(noiseless(2), CqcMode::CodingDecodingFree, budget, opt);
    CHECK(std::abs(rep.value.nats() - kLn2) < 1e-5);
    opt = {};
    opt.mixed_coding = true;
    opt.outcomes = 3;
    const auto mixed = cqc_capacity(noiseless(2), CqcMode::CodingDecodingFree, budget, opt);
    CHECK(mixed.effects.size() == 3);
    CHECK(mixed.value.nats() <= kLn2 + 1e-9);
  }
}
