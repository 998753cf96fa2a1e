#include "aas/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "aas/errors.hpp"
#include "aas/parallel.hpp"

namespace aas {

FitResult fit_power_law(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size())
        throw std::invalid_argument("fit_power_law: length mismatch");
    const std::size_t n = xs.size();
    if (n < 3) throw std::invalid_argument("fit_power_law: need at least 3 points");
    for (std::size_t i = 0; i < n; ++i)
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw std::invalid_argument("fit_power_law: data must be strictly positive");

    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_power_law: x values are all equal");

    FitResult fit;
    fit.exponent = sxy / sxx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (ly[i] - my) - fit.exponent * (lx[i] - mx);
        ssr += r * r;
    }
    fit.std_error = std::sqrt(std::max(ssr, 0.0) / (static_cast<double>(n - 2) * sxx));
    fit.r_squared = syy > 0.0 ? std::max(0.0, 1.0 - ssr / syy) : 1.0;
    fit.window_lo = *std::min_element(xs.begin(), xs.end());
    fit.window_hi = *std::max_element(xs.begin(), xs.end());
    fit.n_points = static_cast<long>(n);
    return fit;
}

double cost_function(std::span<const double> values, std::span<const double> order_key) {
    if (values.size() != order_key.size())
        throw std::invalid_argument("cost_function: length mismatch");
    const std::size_t n = values.size();
    if (n < 2) throw std::invalid_argument("cost_function: need at least 2 points");

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (order_key[a] != order_key[b]) return order_key[a] < order_key[b];
        return values[a] < values[b];
    });

    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double range = *hi_it - *lo_it;
    if (range == 0.0)
        throw NumericalError("cost_function: constant data, zero denominator");

    double variation = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        variation += std::abs(values[idx[i + 1]] - values[idx[i]]);
    return variation / range - 1.0;
}

void ScalingAnsatz::validate() const {
    switch (kind) {
        case AnsatzKind::Zeta:
        case AnsatzKind::Zeta2:
            break;
        case AnsatzKind::Ipr:
        case AnsatzKind::Ipr2:
        case AnsatzKind::Gap:
        case AnsatzKind::Gap2:
            if (!fixed_nu || !(*fixed_nu > 0.0))
                throw ConfigError("ScalingAnsatz: this ansatz requires a positive fixed nu");
            break;
        case AnsatzKind::Kappa:
            if (!fixed_nu_c || !(*fixed_nu_c > 0.0) || !fixed_nu_delta ||
                !(*fixed_nu_delta > 0.0))
                throw ConfigError(
                    "ScalingAnsatz: kappa collapse requires positive fixed nu_c and nu_delta");
            break;
    }
}

std::vector<double> ExponentGrid::values() const {
    if (!(step > 0.0)) throw ConfigError("exponent grid: step must be positive");
    if (!(hi > lo)) throw ConfigError("exponent grid: hi must exceed lo");
    const long count = std::lround((hi - lo) / step) + 1;
    std::vector<double> out(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) out[i] = lo + static_cast<double>(i) * step;
    return out;
}

namespace {

// Scaled (value, order key) of one data point at a trial exponent.
std::pair<double, double> transform_point(const CurvePoint& pt, const ScalingAnsatz& a,
                                          double trial) {
    switch (a.kind) {
        case AnsatzKind::Zeta:
        case AnsatzKind::Zeta2:
            return {pt.value / pt.L, pt.h * std::pow(pt.L, 1.0 / trial)};
        case AnsatzKind::Ipr:
        case AnsatzKind::Ipr2:
            return {pt.value * std::pow(pt.L, trial / *a.fixed_nu),
                    pt.h * std::pow(pt.L, 1.0 / *a.fixed_nu)};
        case AnsatzKind::Gap:
        case AnsatzKind::Gap2:
            return {pt.value * std::pow(pt.L, trial),
                    pt.h * std::pow(pt.L, 1.0 / *a.fixed_nu)};
        case AnsatzKind::Kappa: {
            const double second = std::abs(pt.delta) * std::pow(pt.L, 1.0 / *a.fixed_nu_delta);
            return {pt.value / pt.L,
                    pt.h * std::pow(pt.L, 1.0 / *a.fixed_nu_c) * std::pow(second, trial)};
        }
    }
    throw std::logic_error("transform_point: unknown ansatz");
}

bool searches_nu(AnsatzKind kind) {
    return kind == AnsatzKind::Zeta || kind == AnsatzKind::Zeta2;
}

}  // namespace

std::vector<double> collapse_costs(std::span<const CurvePoint> data,
                                   const ScalingAnsatz& ansatz, const ExponentGrid& grid,
                                   int threads) {
    ansatz.validate();
    if (grid.hi - grid.lo < 0.1 - 1e-12)
        throw ConfigError("collapse_search: exponent grid must span at least 0.1");
    if (searches_nu(ansatz.kind) && !(grid.lo > 0.0))
        throw ConfigError("collapse_search: nu grid must be strictly positive");

    std::set<double> sizes, deltas;
    for (const auto& pt : data) {
        sizes.insert(pt.L);
        deltas.insert(pt.delta);
    }
    if (ansatz.kind == AnsatzKind::Kappa) {
        if (sizes.size() != 1)
            throw ConfigError("kappa collapse: data must be at a single system size");
        if (deltas.size() < 4)
            throw ConfigError("kappa collapse: need at least 4 delta values");
    } else {
        if (sizes.size() < 3)
            throw ConfigError("collapse_search: need at least 3 system sizes");
    }
    // Reject degenerate curves: every (L, delta) curve needs >= 3 points.
    std::map<std::pair<double, double>, long> counts;
    for (const auto& pt : data) counts[{pt.L, pt.delta}]++;
    for (const auto& [key, cnt] : counts)
        if (cnt < 3) {
            std::ostringstream os;
            os << "collapse_search: curve at L=" << key.first << ", delta=" << key.second
               << " has only " << cnt << " points in the pooled window";
            throw ConfigError(os.str());
        }

    const std::vector<double> exponents = grid.values();
    std::vector<double> costs(exponents.size());
    parallel_for(static_cast<long>(exponents.size()), threads, [&](long gi) {
        std::vector<double> q(data.size()), key(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) {
            const auto [qv, kv] = transform_point(data[i], ansatz, exponents[gi]);
            if (!std::isfinite(qv) || !std::isfinite(kv))
                throw NumericalError("collapse_search: non-finite scaled data at exponent " +
                                     std::to_string(exponents[gi]));
            q[i] = qv;
            key[i] = kv;
        }
        costs[gi] = cost_function(q, key);
    });
    return costs;
}

CollapseResult collapse_search(std::span<const CurvePoint> data,
                               const ScalingAnsatz& ansatz, const ExponentGrid& grid,
                               double flat_tol, int threads) {
    if (!(flat_tol >= 0.0)) throw ConfigError("collapse_search: flat_tol must be >= 0");
    const std::vector<double> exponents = grid.values();
    const std::vector<double> costs = collapse_costs(data, ansatz, grid, threads);

    CollapseResult res;
    res.curve.reserve(exponents.size());
    for (std::size_t i = 0; i < exponents.size(); ++i)
        res.curve.emplace_back(exponents[i], costs[i]);

    const std::size_t best =
        std::min_element(costs.begin(), costs.end()) - costs.begin();
    res.best_exponent = exponents[best];
    res.min_cost = costs[best];

    const double cutoff = (1.0 + flat_tol) * res.min_cost;
    std::size_t lo = best, hi = best;
    while (lo > 0 && costs[lo - 1] <= cutoff) --lo;
    while (hi + 1 < costs.size() && costs[hi + 1] <= cutoff) ++hi;
    if (lo == 0 || hi == costs.size() - 1)
        throw NumericalError(
            "collapse_search: flat window touches the grid edge; widen the exponent grid "
            "beyond [" + std::to_string(grid.lo) + ", " + std::to_string(grid.hi) + "]");

    res.window_lo = exponents[lo];
    res.window_hi = exponents[hi];
    res.reported = 0.5 * (res.window_lo + res.window_hi);
    res.uncertainty = 0.5 * (res.window_hi - res.window_lo);
    return res;
}

CollapseResult two_param_collapse(std::span<const CurvePoint> data,
                                  const ScalingAnsatz& ansatz, const ExponentGrid& grid,
                                  double flat_tol, int threads) {
    switch (ansatz.kind) {
        case AnsatzKind::Zeta2:
        case AnsatzKind::Ipr2:
        case AnsatzKind::Gap2:
            break;
        default:
            throw ConfigError("two_param_collapse: requires a 2-parameter ansatz kind");
    }
    return collapse_search(data, ansatz, grid, flat_tol, threads);
}

CollapseResult kappa_collapse(std::span<const CurvePoint> data, double nu_c,
                              double nu_delta, const ExponentGrid& kappa_grid,
                              double flat_tol, int threads) {
    for (const auto& pt : data)
        if (!(pt.delta < 0.0))
            throw ConfigError("kappa_collapse: all delta values must be negative");
    ScalingAnsatz ansatz;
    ansatz.kind = AnsatzKind::Kappa;
    ansatz.fixed_nu_c = nu_c;
    ansatz.fixed_nu_delta = nu_delta;
    return collapse_search(data, ansatz, kappa_grid, flat_tol, threads);
}

QfiScalingResult qfi_scaling(std::span<const double> sizes,
                             std::span<const double> qfi_means,
                             std::optional<double> nu) {
    QfiScalingResult out;
    out.beta = fit_power_law(sizes, qfi_means);
    if (nu) {
        if (!(*nu > 0.0)) throw ConfigError("qfi_scaling: nu must be positive");
        out.predicted_beta = 2.0 / *nu;
    }
    return out;
}

std::pair<double, double> size_independent_window(
    const std::map<long, std::vector<TailPoint>>& curves) {
    if (curves.size() < 2)
        throw ConfigError("size_independent_window: need curves for at least two sizes");
    auto it = curves.rbegin();
    const auto& big = it->second;
    ++it;
    const auto& next = it->second;
    if (big.size() != next.size())
        throw ConfigError("size_independent_window: curves must share the same h grid");

    const std::size_t n = big.size();
    if (n == 0) throw ConfigError("size_independent_window: empty curves");
    // Agreement within error bars, point by point.
    std::vector<char> agree(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (big[j].h != next[j].h)
            throw ConfigError("size_independent_window: curves must share the same h grid");
        const double tol =
            2.0 * std::hypot(big[j].std_error, next[j].std_error) +
            1e-12 * (std::abs(big[j].mean) + std::abs(next[j].mean));
        agree[j] = std::abs(big[j].mean - next[j].mean) <= tol;
    }
    // Trailing run of agreement; a lone 2-sigma blip between agreeing
    // neighbours does not end the tail.
    std::size_t start = n;
    for (std::size_t j = n; j-- > 0;) {
        bool ok = agree[j];
        if (!ok) {
            const bool prev_ok = j > 0 && agree[j - 1];
            const bool next_ok = j + 1 < n ? agree[j + 1] : prev_ok;
            ok = prev_ok && next_ok;
        }
        if (ok)
            start = j;
        else
            break;
    }
    if (start >= n)
        throw NumericalError(
            "size_independent_window: the two largest sizes never agree; no tail found");
    if (n - start < 3)
        throw NumericalError("size_independent_window: fewer than 3 points in the tail");
    return {big[start].h, big[n - 1].h};
}

}  // namespace aas
