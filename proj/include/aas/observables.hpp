#pragma once

#include <span>
#include <vector>

#include "aas/eigensolver.hpp"

namespace aas {

// p_i = psi_i^2; the input must be normalized within 1e-10.
std::vector<double> probability_density(std::span<const double> state);

// rms spread sqrt(sum_i (i - i_c)^2 p_i) around the localization center
// i_c = sum_i i p_i, with 1-based site indices.
double localization_length(std::span<const double> p);

// Inverse participation ratio sum_i p_i^2.
double ipr(std::span<const double> p);

// E_1 - E_0; requires at least two eigenpairs.
double energy_gap(const Spectrum& spec);

// |<a|b>| for normalized vectors of equal length, clamped into [0, 1].
double fidelity(std::span<const double> a, std::span<const double> b);

// Ground-state QFI for the Stark field from first-order perturbation theory:
// 4 * sum_{n>0} |<psi_n| X |psi_0>|^2 / (E_n - E_0)^2 with X = diag(1..L).
// Requires the full spectrum and a non-degenerate ground state.
double qfi_perturbative(const Spectrum& full);

// Finite-difference QFI from ground states at h -+ eps.  The inputs are
// sign-aligned internally; the reference state is the normalized midpoint.
double qfi_finite_difference(std::span<const double> psi_minus,
                             std::span<const double> psi_plus, double eps);

}  // namespace aas
