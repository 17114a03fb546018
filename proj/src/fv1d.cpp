#include "fvslv/fv1d.hpp"

#include <cmath>
#include <string>

#include "fvslv/errors.hpp"

namespace fvslv {

DensityField::DensityField(const NonUniformGrid& grid)
    : m1_(grid.size()),
      m2_(1),
      values_(grid.size(), 0.0),
      weights_(grid.weights().begin(), grid.weights().end()) {}

DensityField::DensityField(const NonUniformGrid& grid_x, const NonUniformGrid& grid_y)
    : m1_(grid_x.size()), m2_(grid_y.size()), values_(m1_ * m2_, 0.0), weights_(m1_ * m2_) {
    for (std::size_t j = 0; j < m2_; ++j) {
        for (std::size_t i = 0; i < m1_; ++i) {
            weights_[i + m1_ * j] = grid_x.weight(i) * grid_y.weight(j);
        }
    }
}

void DensityField::assign(std::span<const double> values) {
    if (values.size() != values_.size()) throw ArgumentError("density field: size mismatch");
    std::copy(values.begin(), values.end(), values_.begin());
}

double total_mass(const DensityField& field) {
    return total_mass(field.values(), field.weights());
}

double total_mass(std::span<const double> values, std::span<const double> weights) {
    if (values.size() != weights.size()) throw ArgumentError("total_mass: size mismatch");
    double mass = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) mass += values[k] * weights[k];
    return mass;
}

namespace {

double checked_sample(double value, const char* what, double x, double tau) {
    if (!std::isfinite(value)) {
        throw EvaluationError(std::string(what) + " is not finite at x=" + std::to_string(x) +
                              ", tau=" + std::to_string(tau));
    }
    return value;
}

}  // namespace

void fill_fv_line(const NonUniformGrid& grid, std::span<const double> sigma_sq,
                  std::span<const double> drift_at_faces, TridiagonalOperator& op,
                  std::size_t line) {
    const LineLayout& L = op.layout();
    const std::size_t m = grid.size();
    if (L.length != m || sigma_sq.size() != m || drift_at_faces.size() != m + 1) {
        throw ArgumentError("fill_fv_line: size mismatch");
    }
    auto lower = op.lower();
    auto diag = op.diag();
    auto upper = op.upper();
    const std::size_t base = line * L.line_step;
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t idx = base + k * L.stride;
        lower[idx] = diag[idx] = upper[idx] = 0.0;
    }
    // Flux through the face between cells k-1 and k:
    //   f = a P_{k-1} + b P_k,  a = mu/2 + s_{k-1}/(2h),  b = mu/2 - s_k/(2h)
    // Cell k-1 loses f / w_{k-1}, cell k gains f / w_k.
    for (std::size_t k = 1; k < m; ++k) {
        const double h = grid.width(k);
        const double mu = drift_at_faces[k];
        const double a = 0.5 * mu + 0.5 * sigma_sq[k - 1] / h;
        const double b = 0.5 * mu - 0.5 * sigma_sq[k] / h;
        const double inv_left = 1.0 / grid.weight(k - 1);
        const double inv_right = 1.0 / grid.weight(k);
        const std::size_t left = base + (k - 1) * L.stride;
        const std::size_t right = base + k * L.stride;
        diag[left] -= a * inv_left;
        upper[left] -= b * inv_left;
        lower[right] += a * inv_right;
        diag[right] += b * inv_right;
    }
}

TridiagonalOperator assemble_1d(const NonUniformGrid& grid, const Coefficients1D& coeffs,
                                double tau) {
    const std::size_t m = grid.size();
    std::vector<double> sigma_sq(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double x = grid.node(i);
        const double s = checked_sample(coeffs.diffusion(x, tau), "diffusion", x, tau);
        if (s < 0.0) {
            throw ModelError("negative diffusion coefficient at x=" + std::to_string(x));
        }
        sigma_sq[i] = s * s;
    }
    std::vector<double> drift(m + 1, 0.0);
    for (std::size_t k = 1; k < m; ++k) {
        const double x = grid.face(k);
        drift[k] = checked_sample(coeffs.drift(x, tau), "drift", x, tau);
    }
    TridiagonalOperator op(LineLayout::single(m), tau);
    fill_fv_line(grid, sigma_sq, drift, op, 0);
    return op;
}

DensityField dirac_initial_1d(const NonUniformGrid& grid, double x0) {
    DensityField field(grid);
    const std::size_t cell = grid.locate_cell(x0);
    field(cell) = 1.0 / grid.weight(cell);
    return field;
}

}  // namespace fvslv
