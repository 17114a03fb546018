#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fvslv/calibration.hpp"
#include "fvslv/diagnostics.hpp"
#include "fvslv/grid.hpp"
#include "fvslv/lv_surface.hpp"
#include "fvslv/models.hpp"
#include "fvslv/time_stepping.hpp"

namespace fvslv {

// ---- Parameter sets -------------------------------------------------------

enum class SetKind { Cir, Heston, Calibration };

struct ParameterSet {
    std::string name;
    SetKind kind;
    SlvParams params;  // CIR sets use kappa, eta, xi, v0 and horizon only
    double s0 = 1.0;   // spot for option quotes (calibration sets)
};

const std::vector<ParameterSet>& builtin_sets();
/// Throws ConfigError for an unknown name.
const ParameterSet& find_set(std::string_view name);

// ---- Grids ----------------------------------------------------------------

/// [0, factor * s0], concentrated around and pinned at s0.
NonUniformGrid make_price_grid(double s0, double factor, double density, std::size_t m);
/// [0, v_max], pinned at v0, concentrated at v = 0.
NonUniformGrid make_variance_grid(double v0, double v_max, double density, std::size_t m);
/// [x0 - half_width, x0 + half_width], concentrated around and pinned at x0.
NonUniformGrid make_log_grid(double x0, double half_width, double density, std::size_t m);

// ---- Mass bookkeeping -----------------------------------------------------

struct MassLog {
    std::vector<std::size_t> level;
    std::vector<double> tau;
    std::vector<double> mass;

    void record(const StepInfo& info);
    StepObserver observer();
    /// max |mass - 1|
    double max_drift() const;
    void write_csv(const std::filesystem::path& path) const;
};

// ---- Experiments ----------------------------------------------------------

struct Bs1dConfig {
    BsParams1D params{0.03, 0.01, 0.2, 100.0};
    double horizon = 1.0;
    std::size_t m = 200;
    std::size_t steps = 2000;
    std::size_t rannacher_steps = 2;
    double domain_factor = 30.0;
    double density = 0.2;  // stretch parameter relative to s0
};

struct CirConfig {
    CirParams params;
    double horizon = 0.25;
    std::size_t m = 200;
    std::size_t steps = 2000;
    std::size_t rannacher_steps = 2;
    double v_max = 15.0;
    double density = 0.1;     // stretch parameter relative to v0
    std::size_t coarse_m = 50;  // grid size defining v_low
};

struct Run1D {
    NonUniformGrid grid;
    std::vector<double> numeric;
    std::vector<double> exact;  // zero where the analytic density is undefined
    MixedErrorReport error;
    MassLog mass;
};

Run1D run_bs1d(const Bs1dConfig& cfg);
Run1D run_cir(const CirConfig& cfg);

struct Bs2dConfig {
    Bs2dParams params{0.03, 0.2, 0.25, -0.7, 100.0, 100.0};
    double horizon = 1.0;
    std::size_t m = 100;  // m1 = m2
    std::size_t steps = 200;
    HvConfig hv;
    double domain_factor = 30.0;
    double density = 0.2;
};

struct HestonConfig {
    HestonParams params;
    std::size_t m1 = 100;
    std::size_t m2 = 50;
    std::size_t steps = 100;
    HvConfig hv;
    double half_width = std::log(30.0);
    double v_max = 15.0;
    double density_x = 0.2;
    double density_v = 0.1;  // relative to v0
};

struct Run2D {
    NonUniformGrid grid_x;
    NonUniformGrid grid_y;
    std::vector<double> numeric;  // column-stacked
    std::vector<double> exact;     // empty when no analytic density is known
    MixedErrorReport error;
    MassLog mass;
};

Run2D run_bs2d(const Bs2dConfig& cfg);
Run2D run_heston(const HestonConfig& cfg);

/// Tensor four-point Lagrange interpolation of a column-stacked field on
/// (fine_x, fine_y) at the nodes of (coarse_x, coarse_y).
std::vector<double> interpolate_2d(const NonUniformGrid& fine_x, const NonUniformGrid& fine_y,
                                   std::span<const double> fine, const NonUniformGrid& coarse_x,
                                   const NonUniformGrid& coarse_y);

/// Mixed error of a coarse run against a fine reference run of the same problem,
/// restricted to v-columns j >= j1 of the coarse grid.
MixedErrorReport self_convergence_error(const Run2D& coarse, const Run2D& reference,
                                        std::size_t j1);

struct ImpliedVolRow {
    double k_over_s0 = 1.0;
    double iv_lv = 0.0;
    double iv_slv = 0.0;
    double eps_imp = 0.0;
};

inline const std::vector<double>& default_strike_ladder() {
    static const std::vector<double> k{0.75, 0.8, 0.9, 1.0, 1.1, 1.2, 1.25};
    return k;
}

struct CalibrateConfig {
    SlvParams params;
    double s0 = 1.08815;
    std::optional<LvSurface> lv;  // synthetic smile when empty
    std::size_t m1 = 400;
    std::size_t m2 = 200;
    std::size_t steps = 200;
    std::size_t inner_iterations = 2;
    HvConfig hv;
    double half_width = std::log(30.0);
    double v_max = 15.0;
    double density_x = 0.2;
    double density_v = 0.1;  // relative to v0
    /// Concentrate the v-grid around v0 instead of v = 0. Suits nearly
    /// deterministic variance, where the density never leaves v0.
    bool v_focus_at_v0 = false;
    std::vector<double> strikes = default_strike_ladder();
};

struct CalibrateRun {
    NonUniformGrid grid_x;
    NonUniformGrid grid_v;
    LeverageSurface leverage;
    std::vector<double> p_lv;
    std::vector<double> p_slv;
    MixedErrorReport marginal_error;
    std::vector<ImpliedVolRow> implied_vols;
    MassLog mass_slv;
    MassLog mass_lv;
    EvolveStats stats;
};

CalibrateRun run_calibration(const CalibrateConfig& cfg);

}  // namespace fvslv
