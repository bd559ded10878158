#pragma once

// Seeded generators for random states, channels and measurements.

#include <cstdint>
#include <random>

#include "qmi/operator_core.hpp"

namespace qmi {

using Rng = std::mt19937_64;

/// Independent stream `index` of a master seed.
Rng derived_rng(std::uint64_t master_seed, std::uint64_t index);

ComplexMatrix random_ginibre(int rows, int cols, Rng& rng);
ComplexVector random_unit_vector(int dim, Rng& rng);
ComplexMatrix random_hermitian(int dim, Rng& rng);
ComplexMatrix random_unitary(int dim, Rng& rng);
/// Full-rank mixed state A A^dagger / tr.
DensityOperator random_density(int dim, Rng& rng);
DensityOperator random_density_of_rank(int dim, int rank, Rng& rng);
/// Random state whose spectrum repeats: multiplicities are drawn to give at least one block of size >= 2.
DensityOperator random_degenerate_density(int dim, Rng& rng);
std::vector<double> random_probabilities(int n, Rng& rng);

}  // namespace qmi
