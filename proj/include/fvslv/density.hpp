#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fvslv/grid.hpp"

namespace fvslv {

/**
 * Cell-average approximation of a density together with the cell sizes used
 * to integrate it. In 2D the values are the column-stacked m1 x m2 matrix:
 * entry (i, j) lives at i + m1 * j.
 */
class DensityField {
public:
    DensityField() = default;
    explicit DensityField(const NonUniformGrid& grid);
    DensityField(const NonUniformGrid& grid_x, const NonUniformGrid& grid_y);

    std::size_t rows() const { return m1_; }
    std::size_t cols() const { return m2_; }
    std::size_t size() const { return values_.size(); }

    double& operator()(std::size_t i, std::size_t j = 0) { return values_[i + m1_ * j]; }
    double operator()(std::size_t i, std::size_t j = 0) const { return values_[i + m1_ * j]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    std::span<const double> weights() const { return weights_; }

    void assign(std::span<const double> values);

private:
    std::size_t m1_ = 0;
    std::size_t m2_ = 1;
    std::vector<double> values_;
    std::vector<double> weights_;
};

/// Sum of values weighted by cell sizes (1D) or volumes (2D).
double total_mass(const DensityField& field);

/// Same, for a bare vector against a weight vector.
double total_mass(std::span<const double> values, std::span<const double> weights);

}  // namespace fvslv
