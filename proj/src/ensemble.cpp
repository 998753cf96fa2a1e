#include "aas/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "aas/eigensolver.hpp"
#include "aas/errors.hpp"
#include "aas/observables.hpp"
#include "aas/parallel.hpp"

namespace aas {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::string describe(const SweepPoint& p) {
    std::ostringstream os;
    os << "(L=" << p.L << ", delta=" << p.delta << ", h=" << p.h << ")";
    return os.str();
}

}  // namespace

double sample_phase(std::uint64_t master_seed, std::uint64_t point_id,
                    std::uint64_t sample_index) {
    std::uint64_t z = splitmix64(splitmix64(splitmix64(master_seed) ^ point_id) ^ sample_index);
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

std::vector<double> HGrid::values() const {
    if (!(log10_max >= log10_min))
        throw ConfigError("h_grid: log10_max must be >= log10_min");
    if (points_per_decade < 1)
        throw ConfigError("h_grid: points_per_decade must be >= 1");
    // never overshoot log10_max; the epsilon absorbs float fuzz on exact spans
    const long count = static_cast<long>(
        std::floor((log10_max - log10_min) * points_per_decade + 1e-9)) + 1;
    std::vector<double> hs(static_cast<std::size_t>(count));
    for (long j = 0; j < count; ++j)
        hs[j] = std::pow(10.0, log10_min + static_cast<double>(j) / points_per_decade);
    return hs;
}

std::vector<double> SweepGrid::h_list() const {
    if (h_values) {
        std::vector<double> hs = *h_values;
        std::sort(hs.begin(), hs.end());
        hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
        return hs;
    }
    return h_grid.values();
}

void SweepGrid::validate() const {
    if (sizes.empty()) throw ConfigError("sweep: at least one system size required");
    for (long L : sizes)
        if (!is_fibonacci_size(L))
            throw ConfigError("sweep: L=" + std::to_string(L) +
                              " is not a Fibonacci system size");
    if (!delta_rule && deltas.empty())
        throw ConfigError("sweep: either deltas or delta_rule must be given");
    if (delta_rule && !deltas.empty())
        throw ConfigError("sweep: deltas and delta_rule are mutually exclusive");
    if (delta_rule && !(delta_rule->nu_delta > 0.0))
        throw ConfigError("sweep: delta_rule.nu_delta must be positive");
    if (n_samples < 1) throw ConfigError("sweep: n_samples must be >= 1");
    if (!(J > 0.0)) throw ConfigError("sweep: J must be positive");
    const auto hs = h_list();
    if (hs.empty()) throw ConfigError("sweep: empty h grid");
    for (double h : hs)
        if (!(h > 0.0)) throw ConfigError("sweep: h values must be positive");
}

SampleObservables measure_sample(const ModelParams& params, bool with_qfi) {
    const TridiagonalMatrix T = build_hamiltonian(params);
    SampleObservables out;
    if (with_qfi) {
        const Spectrum full = eigh_tridiagonal(T);
        const auto p = probability_density(full.state(0));
        out.zeta = localization_length(p);
        out.ipr = ipr(p);
        out.gap = energy_gap(full);
        out.qfi = qfi_perturbative(full);
    } else {
        const Spectrum low = lowest_k(T, 2);
        const auto p = probability_density(low.state(0));
        out.zeta = localization_length(p);
        out.ipr = ipr(p);
        out.gap = energy_gap(low);
    }
    return out;
}

EnsembleStat reduce_stat(const std::vector<double>& values) {
    EnsembleStat stat;
    stat.n = static_cast<long>(values.size());
    if (stat.n == 0) return stat;
    // identical samples (e.g. no AA term, so phi is inert) have zero spread
    bool all_same = true;
    for (double v : values)
        if (v != values.front()) {
            all_same = false;
            break;
        }
    if (all_same) {
        stat.mean = values.front();
        stat.std_error = 0.0;
        return stat;
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    stat.mean = sum / static_cast<double>(stat.n);
    if (stat.n > 1) {
        double ss = 0.0;
        for (double v : values) {
            const double d = v - stat.mean;
            ss += d * d;
        }
        stat.std_error = std::sqrt(ss / (static_cast<double>(stat.n) *
                                         static_cast<double>(stat.n - 1)));
    }
    return stat;
}

ObservableRecord average_point(const SweepPoint& point, long n_samples,
                               std::uint64_t master_seed, std::uint64_t point_id,
                               bool with_qfi, double J, bool golden_omega,
                               int threads) {
    if (n_samples < 1) throw ConfigError("average_point: n_samples must be >= 1");
    std::vector<SampleObservables> samples(static_cast<std::size_t>(n_samples));
    parallel_for(n_samples, threads, [&](long k) {
        const double phi = sample_phase(master_seed, point_id, static_cast<std::uint64_t>(k));
        const ModelParams params =
            ModelParams::make(point.L, point.delta, point.h, phi, J, golden_omega);
        samples[static_cast<std::size_t>(k)] = measure_sample(params, with_qfi);
    });

    ObservableRecord rec;
    rec.point = point;
    rec.n_samples = n_samples;
    std::vector<double> buf(static_cast<std::size_t>(n_samples));
    auto collect = [&](auto getter) {
        for (long k = 0; k < n_samples; ++k) buf[k] = getter(samples[k]);
        return reduce_stat(buf);
    };
    rec.zeta = collect([](const SampleObservables& s) { return s.zeta; });
    rec.ipr = collect([](const SampleObservables& s) { return s.ipr; });
    rec.gap = collect([](const SampleObservables& s) { return s.gap; });
    if (with_qfi)
        rec.qfi = collect([](const SampleObservables& s) { return *s.qfi; });
    return rec;
}

SweepResult run_sweep(const SweepGrid& grid, int threads) {
    grid.validate();

    std::vector<long> sizes = grid.sizes;
    std::sort(sizes.begin(), sizes.end());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

    const std::vector<double> hs = grid.h_list();

    // Points in lexicographic (L, delta, h) order; the flat index is the
    // point_id that keys the phase stream.
    std::vector<SweepPoint> points;
    for (long L : sizes) {
        std::vector<double> deltas;
        if (grid.delta_rule) {
            deltas.push_back(grid.delta_rule->c *
                             std::pow(static_cast<double>(L), -1.0 / grid.delta_rule->nu_delta));
        } else {
            deltas = grid.deltas;
            std::sort(deltas.begin(), deltas.end());
            deltas.erase(std::unique(deltas.begin(), deltas.end()), deltas.end());
        }
        for (double d : deltas)
            for (double h : hs) points.push_back({L, d, h});
    }

    const long n_points = static_cast<long>(points.size());
    const long n_samples = grid.n_samples;
    const long n_items = n_points * n_samples;

    struct Slot {
        SampleObservables obs;
        bool failed = false;
        std::string message;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(n_items));

    parallel_for(n_items, threads, [&](long item) {
        const long pi = item / n_samples;
        const long k = item % n_samples;
        Slot& slot = slots[static_cast<std::size_t>(item)];
        try {
            const SweepPoint& pt = points[static_cast<std::size_t>(pi)];
            const double phi =
                sample_phase(grid.master_seed, static_cast<std::uint64_t>(pi),
                             static_cast<std::uint64_t>(k));
            const ModelParams params = ModelParams::make(pt.L, pt.delta, pt.h, phi,
                                                         grid.J, grid.golden_omega);
            slot.obs = measure_sample(params, grid.with_qfi);
        } catch (const std::exception& e) {
            slot.failed = true;
            slot.message = e.what();
        }
    });

    SweepResult result;
    result.records.reserve(static_cast<std::size_t>(n_points));
    std::vector<double> zeta_buf, ipr_buf, gap_buf, qfi_buf;
    for (long pi = 0; pi < n_points; ++pi) {
        const SweepPoint& pt = points[static_cast<std::size_t>(pi)];
        zeta_buf.clear();
        ipr_buf.clear();
        gap_buf.clear();
        qfi_buf.clear();
        bool point_failed = false;
        for (long k = 0; k < n_samples; ++k) {
            const Slot& slot = slots[static_cast<std::size_t>(pi * n_samples + k)];
            if (slot.failed) {
                result.failures.push_back(
                    {pt, k, "point " + describe(pt) + " sample " + std::to_string(k) +
                                ": " + slot.message});
                point_failed = true;
                continue;
            }
            zeta_buf.push_back(slot.obs.zeta);
            ipr_buf.push_back(slot.obs.ipr);
            gap_buf.push_back(slot.obs.gap);
            if (grid.with_qfi) qfi_buf.push_back(*slot.obs.qfi);
        }
        if (point_failed) continue;  // flagged above, never silently averaged
        ObservableRecord rec;
        rec.point = pt;
        rec.n_samples = n_samples;
        rec.zeta = reduce_stat(zeta_buf);
        rec.ipr = reduce_stat(ipr_buf);
        rec.gap = reduce_stat(gap_buf);
        if (grid.with_qfi) rec.qfi = reduce_stat(qfi_buf);
        result.records.push_back(std::move(rec));
    }
    return result;
}

}  // namespace aas
