#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace fvslv {

/// Construction parameters of a sinh-stretched grid. Kept with the grid so the
/// same stretch can be rebuilt at another resolution.
struct SinhGridRecipe {
    double x_min = 0.0;
    double x_max = 1.0;
    double focus = 0.5;
    double density = 1.0;
    std::optional<double> pin;
};

/**
 * Vertex-centred 1D grid.
 *
 * Nodes x_0 < ... < x_{m-1}. Cell i is [face(i), face(i+1)] where the interior
 * faces are node midpoints and the outer faces coincide with the end nodes.
 * width(i) = x_i - x_{i-1} for 1 <= i <= m-1, and width(0) = width(m) = 0, so
 * that the cell size is weight(i) = (width(i) + width(i+1)) / 2.
 */
class NonUniformGrid {
public:
    explicit NonUniformGrid(std::vector<double> nodes,
                            std::optional<SinhGridRecipe> recipe = std::nullopt);

    std::size_t size() const { return nodes_.size(); }
    double node(std::size_t i) const { return nodes_[i]; }
    std::span<const double> nodes() const { return nodes_; }

    double width(std::size_t i) const { return widths_[i]; }
    double face(std::size_t i) const { return faces_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }
    std::span<const double> widths() const { return widths_; }
    std::span<const double> faces() const { return faces_; }
    std::span<const double> weights() const { return weights_; }

    double x_min() const { return nodes_.front(); }
    double x_max() const { return nodes_.back(); }

    /// Index of the cell containing x. A point on a shared face belongs to the
    /// lower cell. Throws ArgumentError outside [x_min, x_max].
    std::size_t locate_cell(double x) const;

    /// Index of the node equal to x, if any.
    std::optional<std::size_t> find_node(double x) const;

    /// max_i |width(i+1) - width(i)| / (max_i width(i))^2 over interior nodes.
    double smoothness_ratio() const;

    const std::optional<SinhGridRecipe>& recipe() const { return recipe_; }

private:
    std::vector<double> nodes_;
    std::vector<double> widths_;
    std::vector<double> faces_;
    std::vector<double> weights_;
    std::optional<SinhGridRecipe> recipe_;
};

NonUniformGrid make_uniform_grid(double x_min, double x_max, std::size_t m);

/// Nodes focus + density * sinh(xi) on a uniform xi-grid spanning [x_min, x_max].
/// Smaller density concentrates the nodes more strongly around focus.
NonUniformGrid make_sinh_grid(double x_min, double x_max, double focus, double density,
                              std::size_t m);

/// Sinh grid with one node placed exactly on pin. The stretch is centred on
/// focus, which defaults to the pin; pass focus = x_min to concentrate nodes at
/// the lower boundary as well (used for variance grids with an attainable zero).
NonUniformGrid make_pinned_grid(double x_min, double x_max, double pin, double density,
                                std::size_t m, std::optional<double> focus = std::nullopt);

/// Rebuilds a sinh or pinned grid from its recipe with m nodes.
NonUniformGrid rebuild(const NonUniformGrid& grid, std::size_t m);

}  // namespace fvslv
