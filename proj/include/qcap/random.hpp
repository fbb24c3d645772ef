#pragma once

#include <cstdint>
#include <random>

#include "qcap/ensembles.hpp"

namespace qcap::random {

using Rng = std::mt19937_64;

/// Haar-distributed unit vector.
Vector haar_vector(int dim, Rng& rng);
Matrix haar_unitary(int dim, Rng& rng);
/// Ginibre-distributed state of the given rank (full rank when rank ≤ 0).
DensityMatrix random_state(int dim, Rng& rng, int rank = 0);
/// Channel from a Haar isometry A → B ⊗ C(n_kraus).
KrausChannel random_channel(int dim_in, int dim_out, int n_kraus, Rng& rng);
Ensemble random_ensemble(int dim, int members, Rng& rng, bool pure = false);
/// Random positive semidefinite Hamiltonian with spectrum in [0, 1].
Hamiltonian random_hamiltonian(int dim, Rng& rng);

}  // namespace qcap::random
