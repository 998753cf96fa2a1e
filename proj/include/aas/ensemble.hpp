#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aas/model.hpp"

namespace aas {

// Counter-based uniform phase in [0, 1).  The same (master_seed, point_id,
// sample_index) always yields the same phi, independent of execution order
// or thread count.
double sample_phase(std::uint64_t master_seed, std::uint64_t point_id,
                    std::uint64_t sample_index);

struct EnsembleStat {
    double mean = 0.0;
    double std_error = 0.0;  // standard error of the mean
    long n = 0;
};

struct SweepPoint {
    long L = 0;
    double delta = 0.0;
    double h = 0.0;
};

struct ObservableRecord {
    SweepPoint point;
    long n_samples = 0;
    EnsembleStat zeta;
    EnsembleStat ipr;
    EnsembleStat gap;
    std::optional<EnsembleStat> qfi;
    std::optional<EnsembleStat> fidelity;  // vs the Stark reference state
};

// Log-spaced grid: 10^(log10_min + j / points_per_decade) up to 10^log10_max.
struct HGrid {
    double log10_min = -6.0;
    double log10_max = 0.0;
    int points_per_decade = 20;

    std::vector<double> values() const;
};

// delta = c * L^(-1/nu_delta), the fixed-scaling-variable rule.
struct DeltaRule {
    double c = 1.0;
    double nu_delta = 1.0;
};

struct SweepGrid {
    std::vector<long> sizes;
    std::vector<double> deltas;            // explicit list ...
    std::optional<DeltaRule> delta_rule;   // ... or one delta per L from the rule
    HGrid h_grid;
    std::optional<std::vector<double>> h_values;  // explicit h override
    long n_samples = 500;
    std::uint64_t master_seed = 0;
    bool with_qfi = false;
    double J = 1.0;
    bool golden_omega = false;

    std::vector<double> h_list() const;  // sorted ascending, all positive

    void validate() const;  // throws ConfigError
};

struct SweepFailure {
    SweepPoint point;
    long sample = -1;
    std::string message;
};

struct SweepResult {
    std::vector<ObservableRecord> records;  // lexicographic by (L, delta, h)
    std::vector<SweepFailure> failures;
};

// Observables of a single phase realization; qfi only when requested.
struct SampleObservables {
    double zeta = 0.0;
    double ipr = 0.0;
    double gap = 0.0;
    std::optional<double> qfi;
};

SampleObservables measure_sample(const ModelParams& params, bool with_qfi);

// Phase average at one (L, delta, h) point; samples are reduced in index
// order so the result is bit-stable across thread counts.
ObservableRecord average_point(const SweepPoint& point, long n_samples,
                               std::uint64_t master_seed, std::uint64_t point_id,
                               bool with_qfi, double J = 1.0,
                               bool golden_omega = false, int threads = 1);

SweepResult run_sweep(const SweepGrid& grid, int threads);

// Mean / standard error reduction in index order.
EnsembleStat reduce_stat(const std::vector<double>& values);

}  // namespace aas
