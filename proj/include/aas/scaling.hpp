#pragma once

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace aas {

struct FitResult {
    double exponent = 0.0;   // log-log slope
    double std_error = 0.0;  // fit standard error of the slope
    double r_squared = 0.0;
    double window_lo = 0.0;  // x-range of the data actually used
    double window_hi = 0.0;
    long n_points = 0;
};

// Ordinary least squares of log y on log x.  Requires >= 3 strictly
// positive points.
FitResult fit_power_law(std::span<const double> xs, std::span<const double> ys);

// C_Q = sum |Q_{i+1} - Q_i| / (max Q - min Q) - 1 after sorting the values by
// ascending order key (ties broken by value, so the result is independent of
// input order).  Zero iff the sorted sequence is monotone.
double cost_function(std::span<const double> values, std::span<const double> order_key);

enum class AnsatzKind {
    Zeta,    // zeta/L = f(h L^{1/nu}), search nu
    Ipr,     // IPR * L^{s/nu} = f(h L^{1/nu}), search s, nu fixed
    Gap,     // dE * L^z = f(h L^{1/nu}), search z, nu fixed
    Zeta2,   // two-parameter variant at fixed delta L^{1/nu_delta}
    Ipr2,
    Gap2,
    Kappa,   // zeta/L = f(h L^{1/nu_c} (|delta| L^{1/nu_delta})^kappa), search kappa
};

struct ScalingAnsatz {
    AnsatzKind kind = AnsatzKind::Zeta;
    std::optional<double> fixed_nu;        // Ipr/Gap kinds
    std::optional<double> fixed_nu_c;      // Kappa
    std::optional<double> fixed_nu_delta;  // Kappa

    void validate() const;  // throws ConfigError when a required value is missing
};

// One observable value at one grid point of one curve.
struct CurvePoint {
    double L = 0.0;
    double delta = 0.0;
    double h = 0.0;
    double value = 0.0;
};

struct ExponentGrid {
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.001;

    std::vector<double> values() const;
};

struct CollapseResult {
    double best_exponent = 0.0;
    double min_cost = 0.0;
    double window_lo = 0.0;  // flat window: C_Q <= (1 + flat_tol) * min
    double window_hi = 0.0;
    double reported = 0.0;     // midpoint of the flat window
    double uncertainty = 0.0;  // half width of the flat window
    std::vector<std::pair<double, double>> curve;  // (exponent, C_Q)
};

// Pooled C_Q at every grid exponent; shares all validation with
// collapse_search.
std::vector<double> collapse_costs(std::span<const CurvePoint> data,
                                   const ScalingAnsatz& ansatz, const ExponentGrid& grid,
                                   int threads = 1);

// Grid search for the exponent minimizing the pooled cost function.  Needs
// >= 3 distinct sizes (Kappa: a single size and >= 4 distinct deltas) and a
// grid spanning at least 0.1.  Errors when the flat window touches the grid
// edge.
CollapseResult collapse_search(std::span<const CurvePoint> data,
                               const ScalingAnsatz& ansatz, const ExponentGrid& grid,
                               double flat_tol = 0.01, int threads = 1);

// Collapse at a frozen second scaling variable delta L^{1/nu_delta} = c; the
// mechanics on the h-axis are identical to collapse_search.
CollapseResult two_param_collapse(std::span<const CurvePoint> data,
                                  const ScalingAnsatz& ansatz, const ExponentGrid& grid,
                                  double flat_tol = 0.01, int threads = 1);

// Hybrid-exponent collapse at a single size over several delta < 0 curves.
CollapseResult kappa_collapse(std::span<const CurvePoint> data, double nu_c,
                              double nu_delta, const ExponentGrid& kappa_grid,
                              double flat_tol = 0.01, int threads = 1);

struct QfiScalingResult {
    FitResult beta;
    std::optional<double> predicted_beta;  // 2 / nu when nu is supplied
};

// Power-law fit of QFI against system size at fixed h, with the 2/nu
// prediction alongside when nu is supplied.
QfiScalingResult qfi_scaling(std::span<const double> sizes,
                             std::span<const double> qfi_means,
                             std::optional<double> nu = std::nullopt);

// Size-independent tail: the trailing h-range over which the curves of the
// two largest sizes agree within twice their combined standard error.
// `curves` maps L to (h, mean, std_error) triples sorted by h.
struct TailPoint {
    double h = 0.0;
    double mean = 0.0;
    double std_error = 0.0;
};
std::pair<double, double> size_independent_window(
    const std::map<long, std::vector<TailPoint>>& curves);

}  // namespace aas
