#pragma once

#include <span>
#include <vector>

#include "aas/model.hpp"

namespace aas {

// Eigenpairs of a real symmetric tridiagonal matrix.  Energies ascend; states
// are orthonormal columns under the sign gauge: the largest-magnitude entry
// of every vector is positive, lowest index winning ties.
struct Spectrum {
    long dim = 0;                  // matrix dimension L
    std::vector<double> energies;  // ascending, count() entries
    std::vector<double> states;    // column-major, states[k*dim + i]

    long count() const { return static_cast<long>(energies.size()); }
    std::span<const double> state(long k) const {
        return {states.data() + k * dim, static_cast<std::size_t>(dim)};
    }
    std::span<double> state(long k) {
        return {states.data() + k * dim, static_cast<std::size_t>(dim)};
    }
};

// Full decomposition via implicit-shift QL with accumulated rotations.
// Deterministic; throws NumericalError after 50 sweeps on one eigenvalue.
Spectrum eigh_tridiagonal(const TridiagonalMatrix& T);

// The k lowest eigenpairs via Sturm-sequence bisection plus inverse
// iteration, reorthogonalizing within clusters closer than 1e-8 * ||T||.
// k == L delegates to eigh_tridiagonal.
Spectrum lowest_k(const TridiagonalMatrix& T, long k);

// Independent verification path from a different algorithm family: cyclic
// Jacobi rotations on the dense matrix.  Guarded to L <= 64.
Spectrum dense_oracle(const TridiagonalMatrix& T);

}  // namespace aas
