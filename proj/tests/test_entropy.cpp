#include "qmi/channels.hpp"
#include "qmi/entropy.hpp"
#include "support.hpp"

using namespace qmi;
using namespace qmi::testing;

TEST_CASE("von Neumann entropy closed forms") {
  CHECK(von_neumann_entropy(DensityOperator(diag({1, 0}))).nats() == doctest::Approx(0.0));
  CHECK(von_neumann_entropy(DensityOperator::maximally_mixed(2)).nats() == doctest::Approx(std::log(2.0)));
  // Calculator oracle: -0.9 ln 0.9 - 0.1 ln 0.1.
  CHECK(von_neumann_entropy(DensityOperator(diag({0.9, 0.1}))).nats() == doctest::Approx(0.325083).epsilon(1e-6));
  for (int d = 2; d <= 6; ++d) {
    CHECK(std::abs(von_neumann_entropy(DensityOperator::maximally_mixed(d)).nats() - std::log(d)) < 1e-10);
  }
  CHECK(von_neumann_entropy(DensityOperator::maximally_mixed(2)).bits() == doctest::Approx(1.0));
}

TEST_CASE("entropy is bounded by ln d and maximal only at I/d") {
  Rng rng = derived_rng(11, 0);
  for (int trial = 0; trial < 300; ++trial) {
    const int d = 2 + trial % 5;
    const auto rho = random_density(d, rng);
    const double s = von_neumann_entropy(rho).nats();
    REQUIRE(s >= -1e-9);
    REQUIRE(s < std::log(d) - 1e-9);
    const auto pure = DensityOperator::pure(random_unit_vector(d, rng));
    REQUIRE(std::abs(von_neumann_entropy(pure).nats()) < 1e-12);
  }
}

TEST_CASE("Umegaki relative entropy examples") {
  const auto mixed = DensityOperator::maximally_mixed(2);
  const DensityOperator zero(diag({1, 0}));
  CHECK(umegaki_relative_entropy(zero, mixed).nats() == doctest::Approx(std::log(2.0)));
  CHECK_FALSE(umegaki_relative_entropy(mixed, zero).is_finite());
  CHECK(umegaki_relative_entropy(mixed, mixed).nats() == 0.0);
  CHECK_THROWS_AS(umegaki_relative_entropy(mixed, DensityOperator::maximally_mixed(3)), DimensionError);

  Rng rng = derived_rng(11, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto rho = random_density(2 + trial % 5, rng);
    CHECK(std::abs(umegaki_relative_entropy(rho, rho).nats()) < 1e-12);
  }
  // Pure states with a shared support are fine; orthogonal ones are not.
  const auto psi = DensityOperator::pure(ket({0.6, 0.8}));
  CHECK(umegaki_relative_entropy(psi, psi).nats() == doctest::Approx(0.0));
  CHECK_FALSE(umegaki_relative_entropy(psi, DensityOperator::pure(ket({0.8, -0.6}))).is_finite());
}

TEST_CASE("Klein inequality on 500 random pairs") {
  Rng rng = derived_rng(11, 2);
  for (int trial = 0; trial < 500; ++trial) {
    const int d = 2 + trial % 5;
    const auto rho = random_density(d, rng);
    const auto sigma = random_density(d, rng);
    const double s = umegaki_relative_entropy(rho, sigma).nats();
    REQUIRE(s > 0.0);
    // Pinsker oracle: S >= ||rho - sigma||_1^2 / 2.
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.matrix() - sigma.matrix(), Eigen::EigenvaluesOnly);
    const double trace_norm = es.eigenvalues().cwiseAbs().sum();
    REQUIRE(s >= 0.5 * trace_norm * trace_norm - 1e-12);
  }
}

TEST_CASE("diagonal pairs reduce to KL divergence") {
  Rng rng = derived_rng(11, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + trial % 5;
    const auto p = random_probabilities(d, rng);
    const auto q = random_probabilities(d, rng);
    const double quantum = umegaki_relative_entropy(DensityOperator::diagonal(p), DensityOperator::diagonal(q)).nats();
    double oracle = 0.0;
    for (int i = 0; i < d; ++i) oracle += p[i] * std::log(p[i] / q[i]);
    REQUIRE(std::abs(quantum - oracle) < 1e-10);
    REQUIRE(std::abs(kl_divergence(ProbabilityVector(p), ProbabilityVector(q)).nats() - oracle) < 1e-12);
  }
}

TEST_CASE("Shannon entropy and KL examples") {
  CHECK(shannon_entropy(ProbabilityVector({1.0, 0.0})).nats() == 0.0);
  CHECK(shannon_entropy(ProbabilityVector({0.5, 0.5})).nats() == doctest::Approx(std::log(2.0)));
  CHECK(shannon_entropy(ProbabilityVector({0.9, 0.1})).nats() == doctest::Approx(0.325083).epsilon(1e-6));
  const ProbabilityVector half({0.5, 0.5});
  const ProbabilityVector point({1.0, 0.0});
  CHECK(kl_divergence(half, half).nats() == 0.0);
  CHECK(kl_divergence(point, half).nats() == doctest::Approx(std::log(2.0)));
  CHECK_FALSE(kl_divergence(half, point).is_finite());
  CHECK_THROWS_AS(kl_divergence(half, ProbabilityVector({0.2, 0.3, 0.5})), DimensionError);
}

TEST_CASE("monotonicity of relative entropy under channels") {
  Rng rng = derived_rng(11, 4);
  for (int trial = 0; trial < 200; ++trial) {
    const int din = 2 + trial % 3;
    const int dout = 2 + (trial / 3) % 3;
    const auto ch = random_channel(din, dout, 1 + trial % 4, rng);
    const auto rho = random_density(din, rng);
    const auto sigma = random_density(din, rng);
    const double before = umegaki_relative_entropy(rho, sigma).nats();
    const auto after = umegaki_relative_entropy(ch.apply(rho), ch.apply(sigma));
    REQUIRE(after.is_finite());
    REQUIRE(after.nats() <= before + 1e-8);
  }
}
