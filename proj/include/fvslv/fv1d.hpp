#pragma once

#include <functional>

#include "fvslv/density.hpp"
#include "fvslv/grid.hpp"
#include "fvslv/tridiagonal.hpp"

namespace fvslv {

/// Coefficients of  dp/dtau + d(mu p)/dx = d^2(sigma^2 p / 2)/dx^2.
struct Coefficients1D {
    std::function<double(double x, double tau)> drift;
    std::function<double(double x, double tau)> diffusion;
};

/**
 * Semidiscrete operator A(tau) of the conservative finite volume scheme.
 *
 * Fluxes through interior faces use the central advection average and the
 * difference of sigma^2 P / 2 across the face; the fluxes through the two end
 * faces are zero. Diffusion is sampled at nodes, drift at interior faces.
 * Every column of A has vanishing cell-size-weighted sum.
 */
TridiagonalOperator assemble_1d(const NonUniformGrid& grid, const Coefficients1D& coeffs,
                                double tau);

/// Same scheme from pre-sampled coefficients: sigma_sq at the nodes and drift
/// at faces 1..m-1 (entry 0 and m are unused). Writes into line `line` of op.
void fill_fv_line(const NonUniformGrid& grid, std::span<const double> sigma_sq,
                  std::span<const double> drift_at_faces, TridiagonalOperator& op,
                  std::size_t line);

/// Unit point mass at x0 as a cell-average vector: 1 / weight in the containing
/// cell, zero elsewhere.
DensityField dirac_initial_1d(const NonUniformGrid& grid, double x0);

}  // namespace fvslv
