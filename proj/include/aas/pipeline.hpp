#pragma once

#include <optional>
#include <vector>

#include "aas/ensemble.hpp"
#include "aas/scaling.hpp"

namespace aas {

enum class ObservableColumn { Zeta, Ipr, Gap, Qfi };

// Records -> pooled collapse/fit input for one observable column, optionally
// restricted to an h window.
std::vector<CurvePoint> to_curve_points(const std::vector<ObservableRecord>& records,
                                        ObservableColumn column,
                                        std::optional<double> h_min = std::nullopt,
                                        std::optional<double> h_max = std::nullopt);

struct CollapseSpec {
    ScalingAnsatz ansatz;
    std::optional<ExponentGrid> grid;  // explicit grid; otherwise coarse pass
                                       // then +-0.1 at step 0.001 around it
    double flat_tol = 0.01;
};

CollapseResult run_collapse(std::span<const CurvePoint> data, const CollapseSpec& spec,
                            int threads);

struct FitSpec {
    ObservableColumn column = ObservableColumn::Zeta;
    std::optional<long> L;         // default: largest size present
    std::optional<double> delta;   // required when several deltas are present
    std::optional<double> h_min;   // window override; default: the trailing
    std::optional<double> h_max;   // range where the two largest sizes agree
                                   // within 2 combined standard errors
};

FitResult fit_records(const std::vector<ObservableRecord>& records, const FitSpec& spec);

struct FidelityMapSpec {
    long L = 610;
    std::vector<double> deltas;
    HGrid h_grid;
    long n_samples = 100;
    std::uint64_t master_seed = 0;
    double delta_ref = -2.0;  // AA amplitude zero: the pure-Stark reference
    double J = 1.0;
};

// Ground-state fidelity against the Stark reference over a (delta, h) grid;
// also carries zeta/ipr/gap stats for the swept state.
std::vector<ObservableRecord> run_fidelity_map(const FidelityMapSpec& spec, int threads);

struct QfiRunSpec {
    std::vector<long> sizes;
    double delta = 0.0;
    double h = 1e-9;
    long n_samples = 500;
    std::uint64_t master_seed = 0;
    double J = 1.0;
    bool golden_omega = false;
};

// Phase-averaged QFI per system size at fixed (delta, h).
std::vector<ObservableRecord> run_qfi_sizes(const QfiRunSpec& spec, int threads);

// Ground-state amplitudes of a single realization.
std::vector<double> ground_state_amplitude(const ModelParams& params);

}  // namespace aas
