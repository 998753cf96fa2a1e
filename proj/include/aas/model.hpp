#pragma once

#include <cstdint>
#include <vector>

namespace aas {

// (sqrt(5) - 1) / 2, the limit of F_n / F_{n+1} as n grows.
inline constexpr double kGoldenRatio = 0.6180339887498948482;

// Fibonacci numbers with the F_0 = F_1 = 1 convention, so the admissible
// chain sizes are F_2 = 2, F_3 = 3, 5, 8, 13, ...
// Throws std::overflow_error once F_n leaves the 64-bit range.
std::uint64_t fibonacci(int n);

bool is_fibonacci_size(long L);

// omega = F_n / F_{n+1} for a chain of L = F_{n+1} sites; the exact integer
// ratio is converted to double only at the end.  Throws for non-Fibonacci L,
// naming the nearest admissible sizes.
double rational_frequency(long L);

struct ModelParams {
    long L = 2;          // number of lattice sites
    double J = 1.0;      // hopping amplitude
    double delta = 0.0;  // AA detuning; the modulation amplitude is 2J + delta
    double h = 0.0;      // Stark field strength
    double omega = 0.5;  // modulation frequency
    double phi = 0.0;    // modulation phase, in [0, 1)

    // Throws std::invalid_argument when a field is out of range.
    void validate() const;

    // Params with omega tied to L: the rational approximant F_n / F_{n+1} by
    // default, or the golden ratio for exploratory runs.
    static ModelParams make(long L, double delta, double h, double phi,
                            double J = 1.0, bool golden_omega = false);
};

struct TridiagonalMatrix {
    std::vector<double> diag;     // on-site energies, one per site
    std::vector<double> offdiag;  // hopping elements, size() == diag.size() - 1

    long size() const { return static_cast<long>(diag.size()); }
};

// On-site energies h*i + (2J + delta)*cos(2*pi*(i*omega + phi)) for sites
// i = 1..L, hopping -J on every bond, open boundaries.  phi enters only
// through the cosine, so it is reduced mod 1 up front.
TridiagonalMatrix build_hamiltonian(const ModelParams& params);

}  // namespace aas
