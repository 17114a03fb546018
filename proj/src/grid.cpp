#include "fvslv/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fvslv/errors.hpp"

namespace fvslv {

NonUniformGrid::NonUniformGrid(std::vector<double> nodes, std::optional<SinhGridRecipe> recipe)
    : nodes_(std::move(nodes)), recipe_(std::move(recipe)) {
    const std::size_t m = nodes_.size();
    if (m < 3) {
        throw ArgumentError("grid needs at least 3 nodes, got " + std::to_string(m));
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (!std::isfinite(nodes_[i])) {
            throw ArgumentError("grid node " + std::to_string(i) + " is not finite");
        }
        if (i > 0 && !(nodes_[i] > nodes_[i - 1])) {
            throw ArgumentError("grid nodes must be strictly increasing (index " +
                                std::to_string(i) + ")");
        }
    }

    widths_.assign(m + 1, 0.0);
    for (std::size_t i = 1; i < m; ++i) widths_[i] = nodes_[i] - nodes_[i - 1];

    faces_.resize(m + 1);
    faces_[0] = nodes_.front();
    faces_[m] = nodes_.back();
    for (std::size_t i = 1; i < m; ++i) faces_[i] = 0.5 * (nodes_[i - 1] + nodes_[i]);

    weights_.resize(m);
    for (std::size_t i = 0; i < m; ++i) weights_[i] = 0.5 * (widths_[i] + widths_[i + 1]);
}

std::size_t NonUniformGrid::locate_cell(double x) const {
    if (!(x >= x_min() && x <= x_max())) {
        throw ArgumentError("point " + std::to_string(x) + " lies outside [" +
                            std::to_string(x_min()) + ", " + std::to_string(x_max()) + "]");
    }
    // First cell whose upper face is >= x; ties on a face resolve downwards.
    const auto upper = std::lower_bound(faces_.begin() + 1, faces_.end(), x);
    return static_cast<std::size_t>(upper - (faces_.begin() + 1));
}

std::optional<std::size_t> NonUniformGrid::find_node(double x) const {
    const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), x);
    if (it != nodes_.end() && *it == x) return static_cast<std::size_t>(it - nodes_.begin());
    return std::nullopt;
}

double NonUniformGrid::smoothness_ratio() const {
    const std::size_t m = size();
    double max_width = 0.0;
    for (std::size_t i = 1; i < m; ++i) max_width = std::max(max_width, widths_[i]);
    double max_jump = 0.0;
    for (std::size_t i = 1; i + 1 < m; ++i) {
        max_jump = std::max(max_jump, std::abs(widths_[i + 1] - widths_[i]));
    }
    return max_jump / (max_width * max_width);
}

NonUniformGrid make_uniform_grid(double x_min, double x_max, std::size_t m) {
    if (!(x_min < x_max)) throw ArgumentError("uniform grid requires x_min < x_max");
    if (m < 3) throw ArgumentError("grid needs at least 3 nodes");
    std::vector<double> nodes(m);
    const double h = (x_max - x_min) / static_cast<double>(m - 1);
    for (std::size_t i = 0; i < m; ++i) nodes[i] = x_min + static_cast<double>(i) * h;
    nodes.back() = x_max;
    return NonUniformGrid(std::move(nodes));
}

namespace {

void check_sinh_arguments(double x_min, double x_max, double focus, double density,
                          std::size_t m) {
    if (!(x_min < x_max)) throw ArgumentError("sinh grid requires x_min < x_max");
    if (!(focus >= x_min && focus <= x_max)) {
        throw ArgumentError("sinh grid focus must lie in [x_min, x_max]");
    }
    if (!(density > 0.0) || !std::isfinite(density)) {
        throw ArgumentError("sinh grid density parameter must be positive");
    }
    if (m < 3) throw ArgumentError("grid needs at least 3 nodes");
}

// Maps a stretched coordinate u in [0, 1] to the physical coordinate.
struct SinhMap {
    double focus;
    double density;
    double xi_lo;
    double xi_hi;

    SinhMap(double x_min, double x_max, double f, double d)
        : focus(f),
          density(d),
          xi_lo(std::asinh((x_min - f) / d)),
          xi_hi(std::asinh((x_max - f) / d)) {}

    double xi_of(double x) const { return std::asinh((x - focus) / density); }
    double u_of(double x) const { return (xi_of(x) - xi_lo) / (xi_hi - xi_lo); }
    double operator()(double u) const {
        return focus + density * std::sinh(xi_lo + (xi_hi - xi_lo) * u);
    }
};

}  // namespace

NonUniformGrid make_sinh_grid(double x_min, double x_max, double focus, double density,
                              std::size_t m) {
    check_sinh_arguments(x_min, x_max, focus, density, m);
    const SinhMap map(x_min, x_max, focus, density);
    const double dxi = (map.xi_hi - map.xi_lo) / static_cast<double>(m - 1);
    std::vector<double> nodes(m);
    for (std::size_t k = 0; k < m; ++k) {
        nodes[k] = focus + density * std::sinh(map.xi_lo + static_cast<double>(k) * dxi);
    }
    nodes.front() = x_min;
    nodes.back() = x_max;
    return NonUniformGrid(std::move(nodes), SinhGridRecipe{x_min, x_max, focus, density, {}});
}

NonUniformGrid make_pinned_grid(double x_min, double x_max, double pin, double density,
                                std::size_t m, std::optional<double> focus) {
    const double centre = focus.value_or(pin);
    check_sinh_arguments(x_min, x_max, centre, density, m);
    if (!(pin >= x_min && pin <= x_max)) {
        throw ArgumentError("pin must lie in [x_min, x_max]");
    }
    const SinhMap map(x_min, x_max, centre, density);
    const double last = static_cast<double>(m - 1);

    // The uniform coordinate u is warped by g(u) = u + beta u (1 - u), a smooth
    // monotone map (|beta| < 1) fixing both ends, with beta chosen so that node
    // k0 lands on the pin. Realistic sizes give |beta| well below 1/2; only very
    // coarse grids get close to the monotonicity limit.
    std::size_t k0 = 0;
    double beta = 0.0;
    if (pin == x_min) {
        k0 = 0;
    } else if (pin == x_max) {
        k0 = m - 1;
    } else {
        const double u_pin = map.u_of(pin);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k + 1 < m; ++k) {
            const double u = static_cast<double>(k) / last;
            const double b = (u_pin - u) / (u * (1.0 - u));
            if (std::abs(b) < std::abs(best)) {
                best = b;
                k0 = k;
            }
        }
        beta = best;
        if (!(std::abs(beta) < 0.95)) {
            throw ArgumentError("pin " + std::to_string(pin) +
                                " is too close to the boundary for a grid of " +
                                std::to_string(m) + " nodes");
        }
    }

    std::vector<double> nodes(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double u = static_cast<double>(k) / last;
        nodes[k] = map(u + beta * u * (1.0 - u));
    }
    nodes.front() = x_min;
    nodes.back() = x_max;
    nodes[k0] = pin;
    return NonUniformGrid(std::move(nodes), SinhGridRecipe{x_min, x_max, centre, density, pin});
}

NonUniformGrid rebuild(const NonUniformGrid& grid, std::size_t m) {
    const auto& recipe = grid.recipe();
    if (!recipe) throw ArgumentError("grid carries no construction recipe");
    if (recipe->pin) {
        return make_pinned_grid(recipe->x_min, recipe->x_max, *recipe->pin, recipe->density, m,
                                recipe->focus);
    }
    return make_sinh_grid(recipe->x_min, recipe->x_max, recipe->focus, recipe->density, m);
}

}  // namespace fvslv
