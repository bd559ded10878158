#include "qmi/channels.hpp"
#include "support.hpp"

using namespace qmi;
using namespace qmi::testing;

namespace {

bool choi_psd(const KrausChannel& ch) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(choi_matrix(ch)), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0) >= -1e-9;
}

}  // namespace

TEST_CASE("apply examples") {
  Rng rng = derived_rng(13, 0);
  const auto rho = random_density(2, rng);
  CHECK(frob(identity_channel(2).apply(rho).matrix(), rho.matrix()) < 1e-15);
  CHECK(frob(depolarizing_channel(2, 1.0).apply(rho).matrix(), ComplexMatrix::Identity(2, 2) / 2.0) < 1e-12);
  CHECK(frob(amplitude_damping_channel(1.0).apply(rho).matrix(), diag({1, 0})) < 1e-12);
  CHECK_THROWS_AS(identity_channel(3).apply(rho), DimensionError);

  // Depolarizing closed form (1-p) rho + p I/d.
  for (double p : {0.0, 0.25, 0.5, 0.9}) {
    const auto r3 = random_density(3, rng);
    const ComplexMatrix expect = (1 - p) * r3.matrix() + p * ComplexMatrix::Identity(3, 3) / 3.0;
    CHECK(frob(depolarizing_channel(3, p).apply(r3).matrix(), expect) < 1e-12);
  }
  // Amplitude damping by hand: rho00 + g rho11, sqrt(1-g) coherences, (1-g) rho11.
  const double g = 0.3;
  const ComplexMatrix r = rho.matrix();
  ComplexMatrix expect(2, 2);
  expect << r(0, 0) + g * r(1, 1), std::sqrt(1 - g) * r(0, 1), std::sqrt(1 - g) * r(1, 0), (1 - g) * r(1, 1);
  CHECK(frob(amplitude_damping_channel(g).apply(rho).matrix(), expect) < 1e-12);
  // Phase damping keeps the diagonal and scales coherences by 1 - lambda.
  ComplexMatrix pd = r;
  pd(0, 1) *= 0.4;
  pd(1, 0) *= 0.4;
  CHECK(frob(phase_damping_channel(2, 0.6).apply(rho).matrix(), pd) < 1e-12);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(depolarizing_channel(2, 1.5), InvalidArgument);
  CHECK_THROWS_AS(amplitude_damping_channel(-0.1), InvalidArgument);
  CHECK_THROWS_AS(phase_damping_channel(2, 2.0), InvalidArgument);
  CHECK_THROWS_AS(unitary_channel(diag({1, 2})), InvalidArgument);
  CHECK_THROWS_AS(KrausChannel(2, 2, {diag({1, 1}), diag({1, 0})}), InvalidArgument);
}

TEST_CASE("Stinespring form") {
  Rng rng = derived_rng(13, 1);
  SUBCASE("unitary with trivial noise") {
    const ComplexMatrix u = random_unitary(3, rng);
    const StinespringIsometry st(u, 1, 3);
    const auto rho = random_density(3, rng);
    CHECK(frob(stinespring_apply(st, rho).matrix(), u * rho.matrix() * u.adjoint()) < 1e-12);
    const auto k = stinespring_to_kraus(st);
    REQUIRE(k.ops().size() == 1);
    CHECK(frob(k.ops()[0], u) == 0.0);
  }
  SUBCASE("amplitude damping agrees with its Kraus form") {
    const auto ad = amplitude_damping_channel(0.5);
    const auto st = kraus_to_stinespring(ad);
    for (int trial = 0; trial < 100; ++trial) {
      const auto rho = random_density(2, rng);
      REQUIRE(frob(stinespring_apply(st, rho).matrix(), ad.apply(rho).matrix()) < 1e-10);
    }
    // Recovered Kraus operators match the textbook pair up to phase.
    const auto back = stinespring_to_kraus(st);
    ComplexMatrix k1 = ComplexMatrix::Zero(2, 2);
    k1(0, 1) = std::sqrt(0.5);
    bool found = false;
    for (const auto& k : back.ops()) found = found || std::abs(std::abs(k(0, 1)) - std::sqrt(0.5)) < 1e-12;
    CHECK(found);
  }
  SUBCASE("maximally mixing noise") {
    // Heisenberg-Weyl operators scaled by 1/d stacked into one isometry.
    const int d = 3;
    const auto full = depolarizing_channel(d, 1.0);
    const auto st = kraus_to_stinespring(full);
    for (int trial = 0; trial < 10; ++trial) {
      CHECK(frob(stinespring_apply(st, random_density(d, rng)).matrix(), ComplexMatrix::Identity(d, d) / d) < 1e-12);
    }
  }
  SUBCASE("random isometry d_in=2, d_out=2, d_noise=3") {
    const ComplexMatrix v = polar_isometry(random_ginibre(6, 2, rng));
    const StinespringIsometry st(v, 3, 2);
    const auto k = stinespring_to_kraus(st);
    CHECK(k.ops().size() == 3);
    CHECK(k.trace_preservation_defect() < 1e-9);
    const auto rho = random_density(2, rng);
    CHECK(frob(k.apply(rho).matrix(), stinespring_apply(st, rho).matrix()) < 1e-10);
  }
  SUBCASE("non-isometry rejected") {
    CHECK_THROWS_AS(StinespringIsometry(random_ginibre(4, 2, rng), 2, 2), InvalidArgument);
  }
}

TEST_CASE("Choi matrix") {
  CHECK(frob(choi_matrix(identity_channel(2)), 2.0 * bell_phi_plus()) < 1e-12);
  CHECK(frob(choi_matrix(depolarizing_channel(2, 1.0)), ComplexMatrix::Identity(4, 4) / 2.0) < 1e-12);
  Rng rng = derived_rng(13, 2);
  for (int trial = 0; trial < 50; ++trial) {
    const int din = 1 + trial % 4;
    const auto ch = random_channel(din, 1 + (trial / 4) % 4, 1 + trial % 3, rng);
    CHECK(std::abs(choi_matrix(ch).trace() - Complex(din)) < 1e-10);
    CHECK(choi_psd(ch));
  }
}

TEST_CASE("channel zoo") {
  Rng rng = derived_rng(13, 3);
  const auto rho = random_density(2, rng);
  CHECK(frob(depolarizing_channel(2, 0.0).apply(rho).matrix(), rho.matrix()) < 1e-12);

  const std::vector<DensityOperator> coded{DensityOperator::pure(ket({1.0, 0.0})),
                                           DensityOperator::pure(ket({0.0, 1.0}))};
  const auto cq = cq_channel(coded);
  for (int k = 0; k < 2; ++k) {
    std::vector<double> delta(2, 0.0);
    delta[k] = 1.0;
    CHECK(frob(cq.apply(DensityOperator::diagonal(delta)).matrix(), coded[k].matrix()) == 0.0);
  }

  const auto measure = measurement_channel(Povm::projective(ComplexMatrix::Identity(2, 2)));
  const auto probs = diagonal_distribution(measure.apply(DensityOperator(diag({0.7, 0.3}))));
  CHECK(probs[0] == doctest::Approx(0.7));
  CHECK(probs[1] == doctest::Approx(0.3));

  const ComplexMatrix u = random_unitary(2, rng);
  std::vector<KrausChannel> zoo{identity_channel(2),
                                depolarizing_channel(2, 0.3),
                                amplitude_damping_channel(0.4),
                                phase_damping_channel(2, 0.5),
                                unitary_channel(u),
                                cq_channel(coded),
                                measurement_channel(random_povm(2, 3, rng)),
                                classical_channel({{0.9, 0.1}, {0.2, 0.8}}),
                                constant_channel(2, random_density(3, rng)),
                                compose(cq_channel(coded), measure),
                                compose(measure, cq_channel(coded))};
  for (const auto& ch : zoo) {
    CHECK(ch.trace_preservation_defect() < 1e-9);
    CHECK(choi_psd(ch));
  }
}

TEST_CASE("compose agrees with sequential application") {
  Rng rng = derived_rng(13, 4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto first = random_channel(2, 3, 2, rng);
    const auto second = random_channel(3, 2, 3, rng);
    const auto rho = random_density(2, rng);
    REQUIRE(frob(compose(second, first).apply(rho).matrix(), second.apply(first.apply(rho)).matrix()) < 1e-10);
  }
}

TEST_CASE("POVM") {
  Rng rng = derived_rng(13, 5);
  const auto povm = random_povm(3, 4, rng);
  CHECK(povm.outcomes() == 4);
  const auto p = povm.probabilities(random_density(3, rng).matrix());
  double sum = 0.0;
  for (double x : p) {
    CHECK(x >= 0.0);
    sum += x;
  }
  CHECK(sum == doctest::Approx(1.0));
  CHECK_THROWS_AS(Povm({diag({1, 0})}), InvalidArgument);
}

TEST_CASE("classical embedding") {
  CHECK(is_classical(classical_channel({{0.9, 0.1}, {0.1, 0.9}})));
  CHECK(is_classical(identity_channel(3)));
  CHECK_FALSE(is_classical(unitary_channel(ComplexMatrix(Eigen::Matrix2cd{{1, 1}, {1, -1}}) / std::sqrt(2.0))));
  const ProbabilityVector p({0.2, 0.8});
  const auto back = diagonal_distribution(to_diagonal_state(p));
  CHECK(back[0] == doctest::Approx(0.2));
}
