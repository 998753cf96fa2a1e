#include "aas/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>

#include "aas/errors.hpp"

namespace aas {

namespace {

constexpr int kMaxQlSweeps = 50;
constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_shape(const TridiagonalMatrix& T) {
    if (T.diag.empty())
        throw std::invalid_argument("eigensolver: empty matrix");
    if (T.offdiag.size() + 1 != T.diag.size())
        throw std::invalid_argument("eigensolver: offdiag length must be diag length - 1");
}

// Largest-magnitude entry positive; on equal magnitudes the lowest index wins.
void apply_sign_gauge(Spectrum& s) {
    for (long k = 0; k < s.count(); ++k) {
        auto v = s.state(k);
        std::size_t best = 0;
        for (std::size_t i = 1; i < v.size(); ++i)
            if (std::abs(v[i]) > std::abs(v[best])) best = i;
        if (v[best] < 0.0)
            for (double& x : v) x = -x;
    }
}

// Stable ascending reorder of eigenpairs.
void sort_ascending(Spectrum& s) {
    const long n = s.count();
    std::vector<long> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0L);
    std::stable_sort(order.begin(), order.end(),
                     [&](long a, long b) { return s.energies[a] < s.energies[b]; });
    Spectrum out;
    out.dim = s.dim;
    out.energies.resize(s.energies.size());
    out.states.resize(s.states.size());
    for (long k = 0; k < n; ++k) {
        out.energies[k] = s.energies[order[k]];
        auto src = s.state(order[k]);
        std::copy(src.begin(), src.end(), out.state(k).begin());
    }
    s = std::move(out);
}

double matrix_scale(const TridiagonalMatrix& T) {
    // Gershgorin bound on the spectral radius.
    const long n = T.size();
    double scale = 0.0;
    for (long i = 0; i < n; ++i) {
        double r = std::abs(T.diag[i]);
        if (i > 0) r += std::abs(T.offdiag[i - 1]);
        if (i + 1 < n) r += std::abs(T.offdiag[i]);
        scale = std::max(scale, r);
    }
    return std::max(scale, std::numeric_limits<double>::min());
}

// Number of eigenvalues below lambda via the Sturm sequence; zero pivots are
// forced negative before the sign test (the dstebz convention).
long sturm_count(const std::vector<double>& d, const std::vector<double>& e2,
                 double lambda, double pivmin) {
    const long n = static_cast<long>(d.size());
    long count = 0;
    double q = d[0] - lambda;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q <= 0.0) ++count;
    for (long i = 1; i < n; ++i) {
        q = d[i] - lambda - e2[i - 1] / q;
        if (std::abs(q) < pivmin) q = -pivmin;
        if (q <= 0.0) ++count;
    }
    return count;
}

// The index-th smallest eigenvalue (0-based) by bisection.
double bisect_eigenvalue(const std::vector<double>& d, const std::vector<double>& e2,
                         long index, double lo, double hi, double pivmin) {
    // invariant: count(lo) <= index < count(hi)
    for (int it = 0; it < 128; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (sturm_count(d, e2, mid, pivmin) > index)
            hi = mid;
        else
            lo = mid;
        if (hi - lo <= 2.0 * kEps * std::max(std::abs(lo), std::abs(hi)) + 2.0 * pivmin) break;
    }
    return 0.5 * (lo + hi);
}

// LU factorization of (T - lambda*I) with partial pivoting, bandwidth 2
// above the diagonal after pivoting (dgttrf layout).
struct ShiftedLu {
    std::vector<double> dl;   // multipliers
    std::vector<double> dd;   // pivots
    std::vector<double> du;   // first superdiagonal
    std::vector<double> du2;  // second superdiagonal
    std::vector<char> swapped;
};

ShiftedLu factor_shifted(const TridiagonalMatrix& T, double lambda, double pivmin) {
    const long n = T.size();
    ShiftedLu lu;
    lu.dd.resize(n);
    lu.dl.assign(std::max<long>(n - 1, 0), 0.0);
    lu.du.assign(std::max<long>(n - 1, 0), 0.0);
    lu.du2.assign(std::max<long>(n - 2, 0), 0.0);
    lu.swapped.assign(std::max<long>(n - 1, 0), 0);
    for (long i = 0; i < n; ++i) lu.dd[i] = T.diag[i] - lambda;
    std::vector<double> sub(T.offdiag);
    for (long i = 0; i + 1 < n; ++i) lu.du[i] = T.offdiag[i];

    for (long i = 0; i + 1 < n; ++i) {
        if (std::abs(lu.dd[i]) >= std::abs(sub[i])) {
            double piv = lu.dd[i];
            if (std::abs(piv) < pivmin) piv = std::copysign(pivmin, piv == 0.0 ? 1.0 : piv);
            const double fact = sub[i] / piv;
            lu.dd[i] = piv;
            lu.dl[i] = fact;
            lu.dd[i + 1] -= fact * lu.du[i];
        } else {
            const double fact = lu.dd[i] / sub[i];
            lu.dd[i] = sub[i];
            lu.dl[i] = fact;
            const double tmp = lu.du[i];
            lu.du[i] = lu.dd[i + 1];
            lu.dd[i + 1] = tmp - fact * lu.dd[i + 1];
            if (i + 2 < n) {
                lu.du2[i] = lu.du[i + 1];
                lu.du[i + 1] = -fact * lu.du[i + 1];
            }
            lu.swapped[i] = 1;
        }
    }
    return lu;
}

// Solves the factored system in place.  The solve is linear in b, so when an
// entry threatens to overflow the whole vector is rescaled; returns true when
// that happened (growth is then enormous by construction).
bool solve_shifted(const ShiftedLu& lu, std::vector<double>& b, double pivmin) {
    constexpr double kBig = 1e130;
    const long n = static_cast<long>(b.size());
    bool rescaled = false;
    auto guard = [&](double entry) {
        if (std::abs(entry) <= kBig) return;
        double amax = 0.0;
        for (long r = 0; r < n; ++r) amax = std::max(amax, std::abs(b[r]));
        const double s = 1.0 / amax;
        for (long r = 0; r < n; ++r) b[r] *= s;
        rescaled = true;
    };
    for (long i = 0; i + 1 < n; ++i) {
        if (!lu.swapped[i]) {
            b[i + 1] -= lu.dl[i] * b[i];
        } else {
            const double tmp = b[i];
            b[i] = b[i + 1];
            b[i + 1] = tmp - lu.dl[i] * b[i];
        }
        guard(b[i + 1]);
    }
    auto pivot = [&](long i) {
        double piv = lu.dd[i];
        if (std::abs(piv) < pivmin) piv = std::copysign(pivmin, piv == 0.0 ? 1.0 : piv);
        return piv;
    };
    b[n - 1] /= pivot(n - 1);
    guard(b[n - 1]);
    if (n >= 2) {
        b[n - 2] = (b[n - 2] - lu.du[n - 2] * b[n - 1]) / pivot(n - 2);
        guard(b[n - 2]);
    }
    for (long i = n - 3; i >= 0; --i) {
        b[i] = (b[i] - lu.du[i] * b[i + 1] - lu.du2[i] * b[i + 2]) / pivot(i);
        guard(b[i]);
    }
    return rescaled;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Deterministic pseudo-random start vector for inverse iteration.
void fill_start_vector(std::vector<double>& v, long eigenindex) {
    std::uint64_t s = splitmix64(0x5EEDULL + static_cast<std::uint64_t>(eigenindex));
    for (double& x : v) {
        s = splitmix64(s);
        x = (static_cast<double>(s >> 11) * 0x1.0p-53) - 0.5;
    }
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

Spectrum eigh_tridiagonal(const TridiagonalMatrix& T) {
    check_shape(T);
    const long n = T.size();

    std::vector<double> d(T.diag);
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    for (long i = 0; i + 1 < n; ++i) e[i] = T.offdiag[i];

    Spectrum s;
    s.dim = n;
    s.states.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (long k = 0; k < n; ++k) s.states[k * n + k] = 1.0;

    // Implicit-shift QL with eigenvector accumulation (EISPACK imtql2 scheme).
    for (long l = 0; l < n; ++l) {
        int iter = 0;
        long m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= kEps * dd) break;
            }
            if (m != l) {
                if (iter++ == kMaxQlSweeps)
                    throw NumericalError("eigh_tridiagonal: no convergence after " +
                                         std::to_string(kMaxQlSweeps) +
                                         " sweeps at index " + std::to_string(l));
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double sn = 1.0, cs = 1.0, p = 0.0;
                bool underflow = false;
                for (long i = m - 1; i >= l; --i) {
                    double f = sn * e[i];
                    const double b = cs * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    sn = f / r;
                    cs = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * sn + 2.0 * cs * b;
                    p = sn * r;
                    d[i + 1] = g + p;
                    g = cs * r - b;
                    double* zi = s.states.data() + i * n;
                    double* zj = s.states.data() + (i + 1) * n;
                    for (long k = 0; k < n; ++k) {
                        f = zj[k];
                        zj[k] = sn * zi[k] + cs * f;
                        zi[k] = cs * zi[k] - sn * f;
                    }
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }

    s.energies = std::move(d);
    sort_ascending(s);
    apply_sign_gauge(s);
    return s;
}

Spectrum lowest_k(const TridiagonalMatrix& T, long k) {
    check_shape(T);
    const long n = T.size();
    if (k < 1 || k > n)
        throw std::invalid_argument("lowest_k: k must satisfy 1 <= k <= L");
    if (k == n) return eigh_tridiagonal(T);

    const double scale = matrix_scale(T);
    std::vector<double> e2(std::max<long>(n - 1, 0));
    double max_e2 = 0.0;
    for (long i = 0; i + 1 < n; ++i) {
        e2[i] = T.offdiag[i] * T.offdiag[i];
        max_e2 = std::max(max_e2, e2[i]);
    }
    const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, max_e2);

    // Gershgorin interval, slightly widened.
    double lo = T.diag[0], hi = T.diag[0];
    for (long i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(T.offdiag[i - 1]);
        if (i + 1 < n) r += std::abs(T.offdiag[i]);
        lo = std::min(lo, T.diag[i] - r);
        hi = std::max(hi, T.diag[i] + r);
    }
    const double pad = 2.0 * kEps * std::max(std::abs(lo), std::abs(hi)) + pivmin;
    lo -= pad;
    hi += pad;

    std::vector<double> eigenvalues(static_cast<std::size_t>(k));
    for (long j = 0; j < k; ++j)
        eigenvalues[j] = bisect_eigenvalue(T.diag, e2, j, lo, hi, pivmin);

    Spectrum s;
    s.dim = n;
    s.energies = eigenvalues;
    s.states.assign(static_cast<std::size_t>(k) * n, 0.0);

    const double cluster_tol = 1e-8 * scale;
    const double sep = std::max(16.0 * kEps * scale, 2.0 * pivmin);
    // Pivot floor for the shifted solves: large enough that the inverse
    // iterate cannot overflow, small enough to leave the growth signal
    // (~1/(eps*scale)) intact.
    const double solve_floor = 1e-100 * scale;

    long cluster_start = 0;
    double prev_shift = 0.0;
    std::vector<double> x(static_cast<std::size_t>(n));
    for (long j = 0; j < k; ++j) {
        if (j > 0 && eigenvalues[j] - eigenvalues[j - 1] > cluster_tol) cluster_start = j;

        // Within a cluster, keep the shifts at least a few ulps apart.
        double shift = eigenvalues[j];
        if (j > cluster_start) shift = std::max(shift, prev_shift + sep);
        prev_shift = shift;

        const ShiftedLu lu = factor_shifted(T, shift, solve_floor);
        fill_start_vector(x, j);
        double nrm = norm2(x);
        for (double& v : x) v /= nrm;

        bool converged = false;
        for (int it = 0; it < 12 && !converged; ++it) {
            const bool rescaled = solve_shifted(lu, x, solve_floor);
            // Growth of the solve is the convergence signal: once the
            // iterate blows up by ~1/(eps*scale), the residual of the
            // normalized vector is at machine level.
            const double growth = rescaled ? 1e300 : norm2(x);
            for (long i = cluster_start; i < j; ++i) {
                auto prev = s.state(i);
                double proj = 0.0;
                for (long r = 0; r < n; ++r) proj += prev[r] * x[r];
                for (long r = 0; r < n; ++r) x[r] -= proj * prev[r];
            }
            nrm = norm2(x);
            if (nrm == 0.0) {
                // Orthogonalization annihilated the iterate; restart.
                fill_start_vector(x, j + 7919);
                nrm = norm2(x);
                for (double& v : x) v /= nrm;
                continue;
            }
            for (double& v : x) v /= nrm;
            if (growth > 0.1 / (kEps * static_cast<double>(n) * scale) && it >= 1)
                converged = true;
        }

        // Residual check against the unshifted eigenvalue.
        const double lambda = eigenvalues[j];
        double res = 0.0;
        for (long i = 0; i < n; ++i) {
            double t = (T.diag[i] - lambda) * x[i];
            if (i > 0) t += T.offdiag[i - 1] * x[i - 1];
            if (i + 1 < n) t += T.offdiag[i] * x[i + 1];
            res += t * t;
        }
        res = std::sqrt(res);
        if (res > 1e-10 * std::max(1.0, std::abs(lambda)))
            throw NumericalError("lowest_k: inverse iteration residual " + std::to_string(res) +
                                 " too large at index " + std::to_string(j));
        std::copy(x.begin(), x.end(), s.state(j).begin());
    }

    apply_sign_gauge(s);
    return s;
}

Spectrum dense_oracle(const TridiagonalMatrix& T) {
    check_shape(T);
    const long n = T.size();
    if (n > 64)
        throw std::invalid_argument("dense_oracle: guarded to L <= 64, got L = " + std::to_string(n));

    std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
    for (long i = 0; i < n; ++i) a[i * n + i] = T.diag[i];
    for (long i = 0; i + 1 < n; ++i) {
        a[i * n + i + 1] = T.offdiag[i];
        a[(i + 1) * n + i] = T.offdiag[i];
    }
    std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
    for (long i = 0; i < n; ++i) v[i * n + i] = 1.0;

    double fro = 0.0;
    for (double x : a) fro += x * x;
    fro = std::sqrt(fro);
    const double stop = 1e-14 * std::max(fro, std::numeric_limits<double>::min());

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (long p = 0; p < n; ++p)
            for (long q = p + 1; q < n; ++q) off += 2.0 * a[p * n + q] * a[p * n + q];
        if (std::sqrt(off) <= stop) break;
        if (sweep == 63)
            throw NumericalError("dense_oracle: Jacobi sweeps did not converge");

        for (long p = 0; p < n; ++p) {
            for (long q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (apq == 0.0) continue;
                const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sjac = t * c;
                for (long r = 0; r < n; ++r) {
                    const double arp = a[r * n + p];
                    const double arq = a[r * n + q];
                    a[r * n + p] = c * arp - sjac * arq;
                    a[r * n + q] = sjac * arp + c * arq;
                }
                for (long r = 0; r < n; ++r) {
                    const double apr = a[p * n + r];
                    const double aqr = a[q * n + r];
                    a[p * n + r] = c * apr - sjac * aqr;
                    a[q * n + r] = sjac * apr + c * aqr;
                }
                for (long r = 0; r < n; ++r) {
                    const double vrp = v[r * n + p];
                    const double vrq = v[r * n + q];
                    v[r * n + p] = c * vrp - sjac * vrq;
                    v[r * n + q] = sjac * vrp + c * vrq;
                }
            }
        }
    }

    Spectrum s;
    s.dim = n;
    s.energies.resize(static_cast<std::size_t>(n));
    s.states.resize(static_cast<std::size_t>(n) * n);
    for (long k = 0; k < n; ++k) {
        s.energies[k] = a[k * n + k];
        auto col = s.state(k);
        for (long i = 0; i < n; ++i) col[i] = v[i * n + k];
    }
    sort_ascending(s);
    apply_sign_gauge(s);
    return s;
}

}  // namespace aas
