#include "aas/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace aas {

std::uint64_t fibonacci(int n) {
    if (n < 0) throw std::invalid_argument("fibonacci: n must be non-negative");
    std::uint64_t a = 1;  // F_0
    std::uint64_t b = 1;  // F_1
    if (n == 0) return a;
    for (int i = 2; i <= n; ++i) {
        std::uint64_t next;
        if (__builtin_add_overflow(a, b, &next))
            throw std::overflow_error("fibonacci: F_" + std::to_string(n) +
                                      " exceeds the 64-bit integer range");
        a = b;
        b = next;
    }
    return b;
}

bool is_fibonacci_size(long L) {
    if (L < 2) return false;
    std::uint64_t a = 1, b = 2;  // F_1, F_2
    while (b < static_cast<std::uint64_t>(L)) {
        std::uint64_t next = a + b;
        a = b;
        b = next;
    }
    return b == static_cast<std::uint64_t>(L);
}

double rational_frequency(long L) {
    if (L >= 2) {
        std::uint64_t a = 1, b = 2;  // (F_1, F_2)
        while (b < static_cast<std::uint64_t>(L)) {
            std::uint64_t next = a + b;
            a = b;
            b = next;
        }
        if (b == static_cast<std::uint64_t>(L))
            return static_cast<double>(a) / static_cast<double>(b);
        std::ostringstream msg;
        msg << "rational_frequency: L=" << L << " is not a Fibonacci system size; "
            << "nearest admissible sizes are " << a << " and " << b;
        throw std::invalid_argument(msg.str());
    }
    throw std::invalid_argument("rational_frequency: L=" + std::to_string(L) +
                                " is not a Fibonacci system size; nearest admissible size is 2");
}

void ModelParams::validate() const {
    if (L < 2) throw std::invalid_argument("ModelParams: L must be at least 2");
    if (!(J > 0.0)) throw std::invalid_argument("ModelParams: J must be positive");
    if (!(2.0 * J + delta >= 0.0))
        throw std::invalid_argument("ModelParams: modulation amplitude 2J + delta must be non-negative");
    if (!(h >= 0.0)) throw std::invalid_argument("ModelParams: h must be non-negative");
    if (!(phi >= 0.0 && phi < 1.0)) throw std::invalid_argument("ModelParams: phi must lie in [0, 1)");
    if (!std::isfinite(omega)) throw std::invalid_argument("ModelParams: omega must be finite");
}

ModelParams ModelParams::make(long L, double delta, double h, double phi,
                              double J, bool golden_omega) {
    ModelParams p;
    p.L = L;
    p.J = J;
    p.delta = delta;
    p.h = h;
    p.phi = phi;
    p.omega = golden_omega ? kGoldenRatio : rational_frequency(L);
    p.validate();
    return p;
}

TridiagonalMatrix build_hamiltonian(const ModelParams& params) {
    if (params.L < 2) throw std::invalid_argument("build_hamiltonian: L must be at least 2");
    const long n = params.L;
    const double amplitude = 2.0 * params.J + params.delta;
    const double phi = params.phi - std::floor(params.phi);

    TridiagonalMatrix t;
    t.diag.resize(static_cast<std::size_t>(n));
    t.offdiag.assign(static_cast<std::size_t>(n - 1), -params.J);
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (long i = 1; i <= n; ++i) {
        double x = static_cast<double>(i) * params.omega + phi;
        x -= std::floor(x);  // keep the cosine argument small for accuracy
        t.diag[static_cast<std::size_t>(i - 1)] =
            params.h * static_cast<double>(i) + amplitude * std::cos(two_pi * x);
    }
    return t;
}

}  // namespace aas
