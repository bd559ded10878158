#include <unsupported/Eigen/KroneckerProduct>
#include <numbers>

#include "qmi/entanglement.hpp"
#include "support.hpp"

using namespace qmi;
using namespace qmi::testing;

namespace {

const double kLn2 = std::numbers::ln2;

std::vector<double> input_weights(const DensityOperator& theta, int g, int k) {
  ComplexMatrix rho = hermitian_part(partial_trace(theta.matrix(), g, k, Keep::First));
  return canonical_schatten(DensityOperator(rho / rho.trace().real())).weights;
}

ComplexMatrix ghadamard() { return ComplexMatrix(Eigen::Matrix2cd{{1, 1}, {1, -1}}) / std::sqrt(2.0); }

DensityOperator random_commuting_state(const ComplexMatrix& u, Rng& rng) {
  const auto p = random_probabilities(static_cast<int>(u.rows()), rng);
  return DensityOperator(hermitian_part(u * DensityOperator::diagonal(p).matrix() * u.adjoint()));
}

}  // namespace

TEST_CASE("entangling_from_state examples") {
  SUBCASE("product pure state") {
    const ComplexVector eta = ket({0.6, Complex(0, 0.8)});
    const ComplexVector xi = ket({1.0, 2.0, 2.0}) / 3.0;
    const ComplexVector psi = Eigen::kroneckerProduct(eta, xi).eval();
    const auto k = entangling_from_state(DensityOperator::pure(psi), 2, 3);
    CHECK(k.f_dim == 1);
    CHECK(std::abs(std::abs(k.kappa[0].dot(xi)) - 1.0) < 1e-12);
    CHECK(k.kappa[1].norm() < 1e-12);
  }
  SUBCASE("Bell state") {
    const auto k = entangling_from_state(DensityOperator(bell_phi_plus()), 2, 2);
    CHECK(k.f_dim == 1);
    for (int n = 0; n < 2; ++n) {
      ComplexVector e = ComplexVector::Zero(2);
      e(n) = 1.0 / std::sqrt(2.0);
      CHECK((k.kappa[n] - e).norm() < 1e-12);
    }
    CHECK(weak_orthogonality_defect(k, {0.5, 0.5}) < 1e-12);
  }
  SUBCASE("rank-2 mixed two-qubit state") {
    Rng rng = derived_rng(23, 0);
    const auto theta = random_density_of_rank(4, 2, rng);
    const auto k = entangling_from_state(theta, 2, 2);
    CHECK(k.f_dim == 2);
    CHECK(frob(k.compound(), theta.matrix()) < 1e-8);
    CHECK(std::abs(k.normalization() - 1.0) < 1e-9);
  }
}

TEST_CASE("block reassembly and weak orthogonality on random bipartite states") {
  Rng rng = derived_rng(23, 1);
  const std::pair<int, int> dims[] = {{2, 2}, {2, 3}, {3, 3}};
  for (int trial = 0; trial < 500; ++trial) {
    const auto [g, k] = dims[trial % 3];
    const int rank = 1 + trial % (g * k);
    const auto theta = random_density_of_rank(g * k, rank, rng);
    const auto op = entangling_from_state(theta, g, k);
    REQUIRE(frob(op.compound(), theta.matrix()) < 1e-8);
    REQUIRE(weak_orthogonality_defect(op, input_weights(theta, g, k)) < 1e-8);
    REQUIRE(std::abs(op.normalization() - 1.0) < 1e-9);
  }
}

TEST_CASE("weak orthogonality fails in a rotated basis (negative control)") {
  // Classically correlated 0.7|00><00| + 0.3|11><11| viewed in the Hadamard basis.
  const DensityOperator theta(diag({0.7, 0, 0, 0.3}));
  const auto op = entangling_in_basis(theta, 2, 2, ghadamard());
  CHECK(weak_orthogonality_defect(op, {0.7, 0.3}) > 0.1);
  CHECK(frob(op.compound(), theta.matrix()) < 1e-10);
}

TEST_CASE("phi and phi_star") {
  Rng rng = derived_rng(23, 2);
  const auto theta = random_density(6, rng);
  const auto op = entangling_from_state(theta, 2, 3);
  const ComplexMatrix rho = partial_trace(theta.matrix(), 2, 3, Keep::First);
  const ComplexMatrix sigma = partial_trace(theta.matrix(), 2, 3, Keep::Second);
  CHECK(frob(phi(op, ComplexMatrix::Identity(3, 3)), rho) < 1e-8);
  CHECK(frob(phi_star(op, ComplexMatrix::Identity(2, 2)), sigma) < 1e-8);

  const ComplexMatrix b1 = random_ginibre(2, 2, rng);
  const ComplexMatrix b2 = random_ginibre(2, 2, rng);
  const Complex c(0.3, -1.2);
  CHECK(frob(phi_star(op, b1 + c * b2), phi_star(op, b1) + c * phi_star(op, b2)) < 1e-10);

  for (int trial = 0; trial < 100; ++trial) {
    const ComplexMatrix a = random_ginibre(3, 3, rng);
    const ComplexMatrix b = random_ginibre(2, 2, rng);
    // tr_G B phi(A) = tr_K A phi_*(B), and both equal tr theta (B' (x) A) in the eigenbasis with B' = (V^+ B V)^T.
    const Complex lhs = (b * phi(op, a)).trace();
    const Complex rhs = (a * phi_star(op, b)).trace();
    REQUIRE(std::abs(lhs - rhs) < 1e-9);
    const ComplexMatrix bt = (op.basis.adjoint() * b * op.basis).transpose();
    const ComplexMatrix u = tensor_product(op.basis, ComplexMatrix::Identity(3, 3));
    const Complex direct = (u.adjoint() * theta.matrix() * u * tensor_product(bt, a)).trace();
    REQUIRE(std::abs(direct - lhs) < 1e-9);
  }
  CHECK_THROWS_AS(phi(op, ComplexMatrix::Identity(2, 2)), DimensionError);
  CHECK_THROWS_AS(phi_star(op, ComplexMatrix::Identity(3, 3)), DimensionError);

  // Bell kappa: phi_*(|n><n|) = p_n |n><n| with p_n = 1/2.
  const auto bell = entangling_from_state(DensityOperator(bell_phi_plus()), 2, 2);
  CHECK(frob(phi_star(bell, diag({1, 0})), diag({0.5, 0})) < 1e-12);
}

TEST_CASE("standard entanglement") {
  Rng rng = derived_rng(23, 3);
  SUBCASE("pure sigma") {
    const auto s = DensityOperator::pure(random_unit_vector(2, rng));
    const auto ec = standard_entanglement(s);
    CHECK(frob(ec.compound.theta().matrix(), tensor_product(s.matrix(), s.matrix())) < 1e-10);
    CHECK(entangled_mutual_entropy(ec.compound).nats() == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("I/2 is Bell-type") {
    const auto ec = standard_entanglement(DensityOperator::maximally_mixed(2));
    CHECK(frob(ec.compound.theta().matrix(), bell_phi_plus()) < 1e-12);
    CHECK(ec.cls == EntanglementClass::q);
    CHECK(std::abs(entangled_mutual_entropy(ec.compound).nats() - 2 * kLn2) < 1e-12);
    const auto dd = conditional_and_degree(ec.compound);
    CHECK(std::abs(dd.degree + kLn2) < 1e-7);
    CHECK(std::abs(dd.conditional) < 1e-9);
  }
  SUBCASE("phi is the sigma^{1/2} sandwich and the marginals are sigma") {
    for (int trial = 0; trial < 30; ++trial) {
      const int d = 2 + trial % 3;
      const auto s = random_density(d, rng);
      const auto ec = standard_entanglement(s);
      REQUIRE(ec.kappa);
      const ComplexMatrix root = matrix_sqrt_psd(s.matrix());
      const ComplexMatrix a = random_ginibre(d, d, rng);
      REQUIRE(frob(phi(*ec.kappa, a), root * a * root) < 1e-10);
      REQUIRE(frob(ec.compound.input_marginal().matrix(), s.matrix()) < 1e-8);
      REQUIRE(frob(ec.compound.output_marginal().matrix(), s.matrix()) < 1e-8);
      REQUIRE(ec.cls == EntanglementClass::q);
      const double closed = q_entropy_closed_form({{1.0, s}}).nats();
      REQUIRE(std::abs(entangled_mutual_entropy(ec.compound).nats() - closed) < 1e-7);
    }
  }
}

TEST_CASE("d_compound") {
  SUBCASE("diagonal outputs give c") {
    const auto ec = d_compound(ProbabilityVector({0.4, 0.6}), {DensityOperator(diag({0.3, 0.7})), DensityOperator(diag({1, 0}))});
    CHECK(ec.cls == EntanglementClass::c);
  }
  SUBCASE("|0>, |+> gives d") {
    const auto zero = DensityOperator::pure(ket({1.0, 0.0}));
    const auto plus = DensityOperator::pure(ket({1.0, 1.0}) / std::sqrt(2.0));
    const auto ec = d_compound(ProbabilityVector::uniform(2), {zero, plus});
    CHECK(ec.cls == EntanglementClass::d);
    const auto rep = classify_compound(ec.compound.theta(), 2, 2);
    CHECK(rep.cls == EntanglementClass::d);
    CHECK(rep.max_commutator == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rep.off_diag_norm < 1e-12);
  }
  SUBCASE("orthogonal pure outputs, uniform") {
    const auto ec = d_compound(ProbabilityVector::uniform(2), {DensityOperator(diag({1, 0})), DensityOperator(diag({0, 1}))});
    CHECK(entangled_mutual_entropy(ec.compound).nats() == doctest::Approx(kLn2).epsilon(1e-12));
    CHECK(conditional_and_degree(ec.compound).degree == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("marginals and strong orthogonality on random members") {
    Rng rng = derived_rng(23, 4);
    for (int trial = 0; trial < 500; ++trial) {
      const int g = 2 + trial % 2;
      const int k = 2 + (trial / 2) % 2;
      const auto p = random_probabilities(g, rng);
      std::vector<DensityOperator> w;
      for (int n = 0; n < g; ++n) w.push_back(random_density_of_rank(k, 1 + n % k, rng));
      const auto ec = d_compound(ProbabilityVector(p), w);
      REQUIRE(ec.kappa);
      REQUIRE(strong_orthogonality_defect(*ec.kappa) < 1e-9);
      REQUIRE(frob(ec.kappa->compound(), ec.compound.theta().matrix()) < 1e-10);
      ComplexMatrix mix = ComplexMatrix::Zero(k, k);
      for (int n = 0; n < g; ++n) {
        mix += p[n] * w[n].matrix();
        REQUIRE(frob(ec.kappa->block(n, n), p[n] * w[n].matrix()) < 1e-9);
      }
      REQUIRE(frob(ec.compound.input_marginal().matrix(), DensityOperator::diagonal(p).matrix()) < 1e-10);
      REQUIRE(frob(ec.compound.output_marginal().matrix(), mix) < 1e-10);
    }
  }
  CHECK_THROWS_AS(d_compound(ProbabilityVector::uniform(3), {DensityOperator::maximally_mixed(2)}), DimensionError);
}

TEST_CASE("classification") {
  Rng rng = derived_rng(23, 5);
  SUBCASE("canonical triple") {
    const auto rho = random_density(2, rng);
    const auto sigma = random_density(3, rng);
    CHECK(classify_compound(DensityOperator(tensor_product(rho.matrix(), sigma.matrix())), 2, 3).cls ==
          EntanglementClass::c);
    const auto bell = classify_compound(DensityOperator(bell_phi_plus()), 2, 2);
    CHECK(bell.cls == EntanglementClass::q);
    CHECK(bell.off_diag_norm == doctest::Approx(0.5));
  }
  SUBCASE("100 random members of each family") {
    for (int trial = 0; trial < 100; ++trial) {
      const int g = 2 + trial % 2;
      const int k = 2 + (trial / 2) % 2;
      const auto p = random_probabilities(g, rng);
      const ComplexMatrix u = random_unitary(k, rng);
      std::vector<DensityOperator> commuting, generic;
      for (int n = 0; n < g; ++n) {
        commuting.push_back(random_commuting_state(u, rng));
        generic.push_back(random_density(k, rng));
      }
      const auto c = d_compound(ProbabilityVector(p), commuting);
      const auto d = d_compound(ProbabilityVector(p), generic);
      const auto q = standard_entanglement(random_density(k, rng));
      REQUIRE(c.cls == EntanglementClass::c);
      REQUIRE(d.cls == EntanglementClass::d);
      REQUIRE(q.cls == EntanglementClass::q);
      REQUIRE(classify_compound(c.compound.theta(), g, k).cls == EntanglementClass::c);
      REQUIRE(classify_compound(d.compound.theta(), g, k).cls == EntanglementClass::d);
      REQUIRE(classify_compound(q.compound.theta(), k, k).cls == EntanglementClass::q);
    }
  }
}

TEST_CASE("entangled mutual entropy") {
  Rng rng = derived_rng(23, 6);
  const auto rho = random_density(2, rng);
  const auto sigma = random_density(2, rng);
  const CompoundState prod(DensityOperator(tensor_product(rho.matrix(), sigma.matrix())), 2, 2);
  CHECK(std::abs(entangled_mutual_entropy(prod).nats()) < 1e-10);
  const auto dd = conditional_and_degree(prod);
  CHECK(dd.conditional == doctest::Approx(dd.h_sigma));
  CHECK(dd.degree == doctest::Approx(von_neumann_entropy(sigma).nats()));

  for (int trial = 0; trial < 100; ++trial) {
    const CompoundState cs(random_density(4, rng), 2, 2);
    const auto r = conditional_and_degree(cs);
    REQUIRE(r.conditional >= -1e-7);
    REQUIRE(r.degree >= von_neumann_entropy(cs.output_marginal()).nats() - r.h_sigma - 1e-6);
  }
}

TEST_CASE("q-entropy closed form") {
  CHECK(q_entropy_closed_form({{1.0, DensityOperator::maximally_mixed(2)}}).nats() ==
        doctest::Approx(2 * kLn2).epsilon(1e-12));
  const DensityOperator one(diag({1}));
  CHECK(q_entropy_closed_form({{0.5, one}, {0.5, one}}).nats() == doctest::Approx(kLn2).epsilon(1e-12));
  CHECK(q_entropy_closed_form({{1.0, DensityOperator(diag({1, 0}))}}).nats() == doctest::Approx(0.0));
  CHECK_THROWS_AS(q_entropy_closed_form({{0.5, one}}), InvalidArgument);
}

TEST_CASE("q_entropy_sup") {
  const SearchBudget budget{4, 600, 7, 1e-10};
  const auto mm = q_entropy_sup(DensityOperator::maximally_mixed(2), budget);
  CHECK(std::abs(mm.value.nats() - 2 * kLn2) < 1e-3);
  CHECK(q_entropy_sup(DensityOperator(diag({1, 0})), budget).value.nats() < 1e-6);
  const auto r = q_entropy_sup(DensityOperator(diag({0.7, 0.3})), budget);
  CHECK(std::abs(r.value.nats() - 2 * h2(0.7)) < 1e-3);
  Rng rng = derived_rng(23, 7);
  const auto s3 = random_density(3, rng);
  const auto q3 = q_entropy_sup(s3, budget);
  CHECK(std::abs(q3.value.nats() - q3.closed_form.nats()) < 1e-3);
  REQUIRE(q3.maximizer);
  CHECK(frob(partial_trace(q3.maximizer->matrix(), 3, 3, Keep::Second), s3.matrix()) < 1e-8);
}

TEST_CASE("class-constrained mutual entropies") {
  const SearchBudget budget{4, 900, 11, 1e-10};
  Rng rng = derived_rng(23, 8);
  SUBCASE("identity channel") {
    for (int trial = 0; trial < 4; ++trial) {
      const auto rho = trial == 0 ? DensityOperator::maximally_mixed(2) : random_density(2, rng);
      const double s = von_neumann_entropy(rho).nats();
      const auto chain = class_mutual_chain(rho, identity_channel(2), budget);
      CHECK(std::abs(chain[0].value.nats() - s) < 1e-4);
      CHECK(std::abs(chain[1].value.nats() - s) < 1e-4);
      CHECK(std::abs(chain[2].value.nats() - 2 * s) < 1e-3);
      CHECK(chain[2].feasible);
    }
  }
  SUBCASE("ordering on random qubit channels") {
    for (int trial = 0; trial < 6; ++trial) {
      const auto rho = random_density(2, rng);
      const auto ch = random_channel(2, 2, 1 + trial % 3, rng);
      const auto chain = class_mutual_chain(rho, ch, budget);
      CHECK(chain[2].value.nats() >= chain[1].value.nats() - 2 * budget.tol);
      CHECK(chain[1].value.nats() >= chain[0].value.nats() - 2 * budget.tol);
      CHECK(chain[2].value.nats() <= 2 * std::log(2.0) + 1e-6);
    }
  }
  SUBCASE("relaxed reading dominates the strict one") {
    ClassMutualOptions opt;
    opt.relaxed = true;
    const auto rho = random_density(2, rng);
    const auto ch = amplitude_damping_channel(0.3);
    for (auto cls : {EntanglementClass::d, EntanglementClass::q}) {
      const auto strict = class_mutual_entropy(rho, ch, cls, budget);
      const auto relaxed = class_mutual_entropy(rho, ch, cls, budget, opt);
      CHECK(relaxed.value.nats() >= strict.value.nats() - 1e-9);
    }
  }
}

TEST_CASE("class capacities") {
  const SearchBudget budget{2, 120, 3, 1e-8};
  ClassCapacityOptions opt;
  opt.inner = SearchBudget{1, 200, 3, 1e-9};
  const auto chain = class_capacity_chain(identity_channel(2), budget, opt);
  CHECK(chain[0].value.nats() <= kLn2 + 1e-6);
  CHECK(chain[1].value.nats() <= kLn2 + 1e-6);
  CHECK(chain[2].value.nats() <= 2 * kLn2 + 1e-6);
  CHECK(chain[2].value.nats() >= chain[1].value.nats() - 2 * budget.tol);
  CHECK(chain[1].value.nats() >= chain[0].value.nats() - 2 * budget.tol);
  CHECK(std::abs(chain[2].value.nats() - 2 * kLn2) < 1e-2);
}
