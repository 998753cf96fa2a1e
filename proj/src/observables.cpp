#include "aas/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "aas/errors.hpp"

namespace aas {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

std::vector<double> probability_density(std::span<const double> state) {
    if (state.empty()) throw std::invalid_argument("probability_density: empty state");
    const double norm = std::sqrt(dot(state, state));
    if (std::abs(norm - 1.0) > 1e-10)
        throw std::invalid_argument("probability_density: state not normalized, |psi| = " +
                                    std::to_string(norm));
    std::vector<double> p(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) p[i] = state[i] * state[i];
    return p;
}

double localization_length(std::span<const double> p) {
    if (p.empty()) throw std::invalid_argument("localization_length: empty density");
    double total = 0.0;
    for (double x : p) total += x;
    if (std::abs(total - 1.0) > 1e-10)
        throw std::invalid_argument("localization_length: density does not sum to 1");
    double center = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        center += static_cast<double>(i + 1) * p[i];
    double var = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = static_cast<double>(i + 1) - center;
        var += d * d * p[i];
    }
    return std::sqrt(var);
}

double ipr(std::span<const double> p) {
    if (p.empty()) throw std::invalid_argument("ipr: empty density");
    double total = 0.0;
    for (double x : p) total += x;
    if (std::abs(total - 1.0) > 1e-10)
        throw std::invalid_argument("ipr: density does not sum to 1");
    double s = 0.0;
    for (double x : p) s += x * x;
    return s;
}

double energy_gap(const Spectrum& spec) {
    if (spec.count() < 2)
        throw std::invalid_argument("energy_gap: need at least two eigenvalues");
    return spec.energies[1] - spec.energies[0];
}

double fidelity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("fidelity: vector length mismatch");
    return std::min(std::abs(dot(a, b)), 1.0);
}

double qfi_perturbative(const Spectrum& full) {
    const long L = full.dim;
    if (full.count() != L)
        throw std::invalid_argument("qfi_perturbative: full spectrum required");
    if (L < 2) throw std::invalid_argument("qfi_perturbative: need L >= 2");
    const double scale =
        std::max({std::abs(full.energies.front()), std::abs(full.energies.back()), 1e-300});
    if (full.energies[1] - full.energies[0] <= 1e-13 * scale)
        throw NumericalError("qfi_perturbative: ground state degenerate within tolerance");

    auto psi0 = full.state(0);
    std::vector<double> x_psi0(static_cast<std::size_t>(L));
    for (long i = 0; i < L; ++i)
        x_psi0[i] = static_cast<double>(i + 1) * psi0[i];

    double sum = 0.0;
    for (long m = 1; m < L; ++m) {
        const double amp = dot(full.state(m), x_psi0);
        const double de = full.energies[m] - full.energies[0];
        sum += (amp * amp) / (de * de);
    }
    return 4.0 * sum;
}

double qfi_finite_difference(std::span<const double> psi_minus,
                             std::span<const double> psi_plus, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("qfi_finite_difference: eps must be positive");
    if (psi_minus.size() != psi_plus.size())
        throw std::invalid_argument("qfi_finite_difference: vector length mismatch");
    const std::size_t n = psi_minus.size();

    const double sign = dot(psi_minus, psi_plus) < 0.0 ? -1.0 : 1.0;
    std::vector<double> deriv(n), mid(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double plus = sign * psi_plus[i];
        deriv[i] = (plus - psi_minus[i]) / (2.0 * eps);
        mid[i] = plus + psi_minus[i];
    }
    double mid_norm = std::sqrt(dot(mid, mid));
    if (mid_norm == 0.0)
        throw NumericalError("qfi_finite_difference: degenerate midpoint state");
    for (double& v : mid) v /= mid_norm;

    const double dd = dot(deriv, deriv);
    const double dp = dot(deriv, mid);
    return std::max(4.0 * (dd - dp * dp), 0.0);
}

}  // namespace aas
