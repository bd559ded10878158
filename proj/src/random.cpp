#include "qmi/random.hpp"

#include <algorithm>
#include <numeric>

namespace qmi {

Rng derived_rng(std::uint64_t master_seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x51u};
  return Rng(seq);
}

ComplexMatrix random_ginibre(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  ComplexMatrix z(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) z(i, j) = Complex(n01(rng), n01(rng));
  return z;
}

ComplexVector random_unit_vector(int dim, Rng& rng) {
  ComplexVector v = random_ginibre(dim, 1, rng).col(0);
  return v / v.norm();
}

ComplexMatrix random_hermitian(int dim, Rng& rng) {
  const ComplexMatrix z = random_ginibre(dim, dim, rng);
  return 0.5 * (z + z.adjoint());
}

ComplexMatrix random_unitary(int dim, Rng& rng) { return polar_isometry(random_ginibre(dim, dim, rng)); }

DensityOperator random_density(int dim, Rng& rng) { return random_density_of_rank(dim, dim, rng); }

DensityOperator random_density_of_rank(int dim, int rank, Rng& rng) {
  const ComplexMatrix a = random_ginibre(dim, rank, rng);
  ComplexMatrix m = a * a.adjoint();
  m /= m.trace().real();
  return DensityOperator(hermitian_part(m));
}

DensityOperator random_degenerate_density(int dim, Rng& rng) {
  std::uniform_int_distribution<int> pick(2, dim);
  const int block = pick(rng);
  std::vector<double> values;
  std::uniform_real_distribution<double> u(0.05, 1.0);
  const double shared = u(rng);
  for (int i = 0; i < block; ++i) values.push_back(shared);
  for (int i = block; i < dim; ++i) values.push_back(u(rng));
  const double total = std::accumulate(values.begin(), values.end(), 0.0);
  const ComplexMatrix q = random_unitary(dim, rng);
  ComplexMatrix diag = ComplexMatrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) diag(i, i) = values[i] / total;
  return DensityOperator(hermitian_part(q * diag * q.adjoint()));
}

std::vector<double> random_probabilities(int n, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(n);
  for (double& x : p) x = e(rng);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& x : p) x /= total;
  // Absorb rounding so the sum passes the 1e-12 check exactly.
  p.back() = std::max(0.0, 1.0 - std::accumulate(p.begin(), p.end() - 1, 0.0));
  return p;
}

}  // namespace qmi
