#include "aas/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "aas/eigensolver.hpp"
#include "aas/errors.hpp"
#include "aas/observables.hpp"
#include "aas/parallel.hpp"

namespace aas {

std::vector<CurvePoint> to_curve_points(const std::vector<ObservableRecord>& records,
                                        ObservableColumn column,
                                        std::optional<double> h_min,
                                        std::optional<double> h_max) {
    std::vector<CurvePoint> pts;
    pts.reserve(records.size());
    for (const auto& r : records) {
        if (h_min && r.point.h < *h_min) continue;
        if (h_max && r.point.h > *h_max) continue;
        double value = 0.0;
        switch (column) {
            case ObservableColumn::Zeta: value = r.zeta.mean; break;
            case ObservableColumn::Ipr: value = r.ipr.mean; break;
            case ObservableColumn::Gap: value = r.gap.mean; break;
            case ObservableColumn::Qfi:
                if (!r.qfi) throw ConfigError("records carry no QFI column");
                value = r.qfi->mean;
                break;
        }
        pts.push_back({static_cast<double>(r.point.L), r.point.delta, r.point.h, value});
    }
    return pts;
}

namespace {

// Coarse bracketing ranges per ansatz kind.
ExponentGrid coarse_grid(AnsatzKind kind) {
    switch (kind) {
        case AnsatzKind::Zeta:
        case AnsatzKind::Zeta2: return {0.15, 1.05, 0.01};
        case AnsatzKind::Ipr:
        case AnsatzKind::Ipr2: return {0.02, 0.62, 0.005};
        case AnsatzKind::Gap:
        case AnsatzKind::Gap2: return {1.2, 3.4, 0.02};
        case AnsatzKind::Kappa: return {-1.0, 0.2, 0.01};
    }
    throw std::logic_error("coarse_grid: unknown ansatz");
}

double min_exponent_floor(AnsatzKind kind) {
    switch (kind) {
        case AnsatzKind::Zeta:
        case AnsatzKind::Zeta2: return 0.02;
        case AnsatzKind::Ipr:
        case AnsatzKind::Ipr2: return 0.005;
        case AnsatzKind::Gap:
        case AnsatzKind::Gap2: return 0.2;
        case AnsatzKind::Kappa: return -10.0;
    }
    return 0.0;
}

}  // namespace

CollapseResult run_collapse(std::span<const CurvePoint> data, const CollapseSpec& spec,
                            int threads) {
    if (spec.grid) return collapse_search(data, spec.ansatz, *spec.grid, spec.flat_tol, threads);

    const ExponentGrid coarse = coarse_grid(spec.ansatz.kind);
    const std::vector<double> costs = collapse_costs(data, spec.ansatz, coarse, threads);
    const std::size_t best =
        std::min_element(costs.begin(), costs.end()) - costs.begin();
    if (best == 0 || best == costs.size() - 1)
        throw NumericalError("collapse: coarse minimum sits at the grid edge [" +
                             std::to_string(coarse.lo) + ", " + std::to_string(coarse.hi) +
                             "]; supply a wider explicit grid");
    const double center = coarse.lo + static_cast<double>(best) * coarse.step;

    ExponentGrid fine;
    fine.lo = std::max(center - 0.1, min_exponent_floor(spec.ansatz.kind));
    fine.hi = center + 0.1;
    fine.step = 0.001;
    return collapse_search(data, spec.ansatz, fine, spec.flat_tol, threads);
}

FitResult fit_records(const std::vector<ObservableRecord>& records, const FitSpec& spec) {
    if (records.empty()) throw ConfigError("fit: no records");

    std::vector<ObservableRecord> rows;
    std::set<double> deltas;
    for (const auto& r : records) {
        if (spec.delta && r.point.delta != *spec.delta) continue;
        rows.push_back(r);
        deltas.insert(r.point.delta);
    }
    if (rows.empty()) throw ConfigError("fit: no records at the requested delta");
    if (deltas.size() > 1)
        throw ConfigError("fit: records span several deltas; pass an explicit delta");

    auto pick = [&](const ObservableRecord& r) -> const EnsembleStat& {
        switch (spec.column) {
            case ObservableColumn::Zeta: return r.zeta;
            case ObservableColumn::Ipr: return r.ipr;
            case ObservableColumn::Gap: return r.gap;
            case ObservableColumn::Qfi:
                if (!r.qfi) throw ConfigError("fit: records carry no QFI column");
                return *r.qfi;
        }
        throw std::logic_error("fit: unknown column");
    };

    std::map<long, std::vector<TailPoint>> curves;
    for (const auto& r : rows) {
        const auto& stat = pick(r);
        curves[r.point.L].push_back({r.point.h, stat.mean, stat.std_error});
    }
    for (auto& [L, curve] : curves)
        std::sort(curve.begin(), curve.end(),
                  [](const TailPoint& a, const TailPoint& b) { return a.h < b.h; });

    double h_lo, h_hi;
    if (spec.h_min || spec.h_max) {
        h_lo = spec.h_min.value_or(0.0);
        h_hi = spec.h_max.value_or(std::numeric_limits<double>::infinity());
    } else {
        std::tie(h_lo, h_hi) = size_independent_window(curves);
    }

    const long fit_L = spec.L ? *spec.L : curves.rbegin()->first;
    const auto it = curves.find(fit_L);
    if (it == curves.end())
        throw ConfigError("fit: no records at L=" + std::to_string(fit_L));

    std::vector<double> xs, ys;
    for (const auto& p : it->second) {
        if (p.h < h_lo || p.h > h_hi) continue;
        xs.push_back(p.h);
        ys.push_back(p.mean);
    }
    return fit_power_law(xs, ys);
}

std::vector<ObservableRecord> run_fidelity_map(const FidelityMapSpec& spec, int threads) {
    if (spec.deltas.empty()) throw ConfigError("fidelity map: no delta values");
    if (spec.n_samples < 1) throw ConfigError("fidelity map: n_samples must be >= 1");
    if (!is_fibonacci_size(spec.L))
        throw ConfigError("fidelity map: L=" + std::to_string(spec.L) +
                          " is not a Fibonacci system size");
    if (!(2.0 * spec.J + spec.delta_ref >= 0.0))
        throw ConfigError("fidelity map: delta_ref below the pure-Stark limit -2J");

    std::vector<double> deltas = spec.deltas;
    std::sort(deltas.begin(), deltas.end());
    deltas.erase(std::unique(deltas.begin(), deltas.end()), deltas.end());
    const std::vector<double> hs = spec.h_grid.values();

    struct Point {
        double delta, h;
    };
    std::vector<Point> points;
    for (double d : deltas)
        for (double h : hs) points.push_back({d, h});

    // With the AA amplitude zero the reference state ignores phi, so one
    // solve per h covers every sample.
    const bool ref_static = 2.0 * spec.J + spec.delta_ref == 0.0;
    std::map<double, std::vector<double>> ref_cache;
    if (ref_static) {
        for (double h : hs) {
            const ModelParams ref = ModelParams::make(spec.L, spec.delta_ref, h, 0.0, spec.J);
            ref_cache[h] = ground_state_amplitude(ref);
        }
    }

    const long n_points = static_cast<long>(points.size());
    const long n_samples = spec.n_samples;

    struct Sample {
        SampleObservables obs;
        double fidelity = 0.0;
    };
    std::vector<Sample> slots(static_cast<std::size_t>(n_points * n_samples));
    parallel_for(n_points * n_samples, threads, [&](long item) {
        const long pi = item / n_samples;
        const long k = item % n_samples;
        const Point& pt = points[static_cast<std::size_t>(pi)];
        const double phi = sample_phase(spec.master_seed, static_cast<std::uint64_t>(pi),
                                        static_cast<std::uint64_t>(k));
        const ModelParams params = ModelParams::make(spec.L, pt.delta, pt.h, phi, spec.J);
        const TridiagonalMatrix T = build_hamiltonian(params);
        const Spectrum low = lowest_k(T, 2);
        Sample& s = slots[static_cast<std::size_t>(item)];
        const auto p = probability_density(low.state(0));
        s.obs.zeta = localization_length(p);
        s.obs.ipr = ipr(p);
        s.obs.gap = energy_gap(low);
        if (ref_static) {
            s.fidelity = fidelity(low.state(0), ref_cache.at(pt.h));
        } else {
            const ModelParams ref =
                ModelParams::make(spec.L, spec.delta_ref, pt.h, phi, spec.J);
            s.fidelity = fidelity(low.state(0), ground_state_amplitude(ref));
        }
    });

    std::vector<ObservableRecord> records;
    records.reserve(static_cast<std::size_t>(n_points));
    std::vector<double> zeta_buf(n_samples), ipr_buf(n_samples), gap_buf(n_samples),
        fid_buf(n_samples);
    for (long pi = 0; pi < n_points; ++pi) {
        for (long k = 0; k < n_samples; ++k) {
            const Sample& s = slots[static_cast<std::size_t>(pi * n_samples + k)];
            zeta_buf[k] = s.obs.zeta;
            ipr_buf[k] = s.obs.ipr;
            gap_buf[k] = s.obs.gap;
            fid_buf[k] = s.fidelity;
        }
        ObservableRecord rec;
        rec.point = {spec.L, points[static_cast<std::size_t>(pi)].delta,
                     points[static_cast<std::size_t>(pi)].h};
        rec.n_samples = n_samples;
        rec.zeta = reduce_stat(zeta_buf);
        rec.ipr = reduce_stat(ipr_buf);
        rec.gap = reduce_stat(gap_buf);
        rec.fidelity = reduce_stat(fid_buf);
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<ObservableRecord> run_qfi_sizes(const QfiRunSpec& spec, int threads) {
    if (spec.sizes.empty()) throw ConfigError("qfi: no system sizes");
    if (!(spec.h > 0.0)) throw ConfigError("qfi: h must be positive");

    SweepGrid grid;
    grid.sizes = spec.sizes;
    grid.deltas = {spec.delta};
    grid.h_values = std::vector<double>{spec.h};
    grid.n_samples = spec.n_samples;
    grid.master_seed = spec.master_seed;
    grid.with_qfi = true;
    grid.J = spec.J;
    grid.golden_omega = spec.golden_omega;

    SweepResult result = run_sweep(grid, threads);
    if (!result.failures.empty())
        throw NumericalError("qfi: " + result.failures.front().message);
    return std::move(result.records);
}

std::vector<double> ground_state_amplitude(const ModelParams& params) {
    const TridiagonalMatrix T = build_hamiltonian(params);
    const Spectrum low = lowest_k(T, 1);
    auto v = low.state(0);
    return {v.begin(), v.end()};
}

}  // namespace aas
