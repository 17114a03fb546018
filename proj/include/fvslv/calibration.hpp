#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "fvslv/density.hpp"
#include "fvslv/grid.hpp"
#include "fvslv/lv_surface.hpp"
#include "fvslv/models.hpp"
#include "fvslv/time_stepping.hpp"

namespace fvslv {

/// sigma_slv(x_i, tau_n) for all nodes and full time levels, tau_0 included.
class LeverageSurface {
public:
    LeverageSurface(std::vector<double> xs, std::vector<double> taus);

    std::size_t nodes() const { return xs_.size(); }
    std::size_t levels() const { return taus_.size(); }
    const std::vector<double>& xs() const { return xs_; }
    const std::vector<double>& taus() const { return taus_; }

    double operator()(std::size_t i, std::size_t n) const { return values_[n * xs_.size() + i]; }
    std::span<const double> column(std::size_t n) const;
    void set_column(std::size_t n, std::span<const double> values);

    /// CSV `tau,x,sigma_slv`, tau-major.
    void write_csv(const std::filesystem::path& path) const;

private:
    std::vector<double> xs_;
    std::vector<double> taus_;
    std::vector<double> values_;
};

/// Piecewise linear interpolant through (xs, ys), constant beyond the ends.
class PiecewiseLinear {
public:
    PiecewiseLinear(std::vector<double> xs, std::vector<double> ys);
    double operator()(double x) const;

private:
    std::vector<double> xs_;
    std::vector<double> ys_;
};

/**
 * E_i = sum_j psi^2(v_j) |P_ij| w_j / sum_j |P_ij| w_j for every x-row i of a
 * 2D field, with w the v-direction cell sizes. A row whose denominator is
 * exactly zero takes fallback[i].
 */
std::vector<double> conditional_expectation(const DensityField& p, const NonUniformGrid& grid_v,
                                            const std::function<double(double)>& psi_sq,
                                            std::span<const double> fallback);

/// sigma_lv / sqrt(E), elementwise. Throws CalibrationError on E <= 0.
std::vector<double> leverage_update(std::span<const double> sigma_lv,
                                    std::span<const double> expectation);

/// P_i = sum_j P_ij w_j: the x-marginal of a 2D field.
std::vector<double> marginal_density(const DensityField& p, const NonUniformGrid& grid_v);

struct CalibrationOptions {
    HvConfig hv;
    std::size_t inner_iterations = 2;
    StepObserver observer;
};

struct CalibrationResult {
    LeverageSurface leverage;
    DensityField density;
    EvolveStats stats;
};

/**
 * Leverage surface making the SLV model reproduce the marginals of the LV
 * model. Each time level (and each implicit Euler half level of the startup)
 * runs inner_iterations passes of: conditional expectation from the current
 * guess, leverage at the new level, re-run of the step from the previous level.
 */
CalibrationResult calibrate(const SlvParams& slv, const LvSurface& lv,
                            const NonUniformGrid& grid_x, const NonUniformGrid& grid_v,
                            const TimeGrid& tg, const CalibrationOptions& opts = {});

/// Density of X = log S under dX = (r_d - r_f - sigma_lv^2/2) dt + sigma_lv dW,
/// by finite volumes and Crank-Nicolson with implicit Euler startup.
DensityField lv_density_1d(const LvSurface& lv, double r_d, double r_f,
                           const NonUniformGrid& grid_x, double x0, const TimeGrid& tg,
                           std::size_t rannacher_steps = 2, const StepObserver& observer = {},
                           EvolveStats* stats = nullptr);

}  // namespace fvslv
