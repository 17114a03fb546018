#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fvslv/density.hpp"
#include "fvslv/grid.hpp"
#include "fvslv/tridiagonal.hpp"

namespace fvslv {

/// Coefficients of
///   dp/dtau + d(mu1 p)/dx + d(mu2 p)/dy
///     = d^2(sigma1^2 p/2)/dx^2 + d^2(rho sigma1 sigma2 p)/dxdy + d^2(sigma2^2 p/2)/dy^2.
struct Coefficients2D {
    using Field = std::function<double(double x, double y, double tau)>;
    Field drift_x;
    Field drift_y;
    Field diffusion_x;
    Field diffusion_y;
    double rho = 0.0;
};

/// Boundaries at which the mixed-derivative flux on the first interior face
/// level switches from the four-point average to the one-sided two-point
/// average. Only lower_y is the standard treatment of an attainable zero
/// variance; the others are its mirror images.
struct AttainableBoundaries {
    bool lower_y = false;
    bool upper_y = false;
    bool lower_x = false;
    bool upper_x = false;
};

/// Nine-point operator on a column-stacked m1 x m2 field.
class MixedOperator {
public:
    MixedOperator() = default;
    MixedOperator(std::size_t m1, std::size_t m2);

    std::size_t rows() const { return m1_; }
    std::size_t cols() const { return m2_; }
    std::size_t size() const { return m1_ * m2_; }

    /// Coefficient of row (i, j) on cell (i + di, j + dj), di, dj in {-1, 0, 1}.
    double coefficient(std::size_t i, std::size_t j, int di, int dj) const {
        return coef_[slot(di, dj)][i + m1_ * j];
    }
    double& coefficient(std::size_t i, std::size_t j, int di, int dj) {
        return coef_[slot(di, dj)][i + m1_ * j];
    }

    void apply(std::span<const double> in, std::span<double> out) const;
    void apply_add(std::span<const double> in, double scale, std::span<double> out) const;
    double max_abs_row_sum() const;

private:
    static std::size_t slot(int di, int dj) {
        return static_cast<std::size_t>((di + 1) + 3 * (dj + 1));
    }

    std::size_t m1_ = 0;
    std::size_t m2_ = 0;
    std::array<std::vector<double>, 9> coef_;
};

enum class SplitPart { Mixed = 0, X = 1, Y = 2 };

/**
 * A = A0 + A1 + A2 acting on vec[P] (columns of the m1 x m2 matrix stacked).
 * A1 holds all x-derivative terms, A2 all y-derivative terms, A0 the mixed
 * derivative. A1 and A2 are tridiagonal along their own direction.
 */
class SplitOperator2D {
public:
    SplitOperator2D() = default;
    SplitOperator2D(TridiagonalOperator a1, TridiagonalOperator a2, MixedOperator a0,
                    AttainableBoundaries attainable, double tau);

    std::size_t rows() const { return a0_.rows(); }
    std::size_t cols() const { return a0_.cols(); }
    std::size_t size() const { return a0_.size(); }
    double tau() const { return tau_; }
    const AttainableBoundaries& attainable() const { return attainable_; }

    const MixedOperator& a0() const { return a0_; }
    const TridiagonalOperator& a1() const { return a1_; }
    const TridiagonalOperator& a2() const { return a2_; }

    /// out = A_part in
    void apply(SplitPart part, std::span<const double> in, std::span<double> out) const;
    /// out = (A0 + A1 + A2) in
    void apply_all(std::span<const double> in, std::span<double> out) const;

    /// Factorization of I - c A_part for part X or Y.
    StageFactorization factor(SplitPart part, double c) const;

    double max_abs_row_sum() const;

private:
    TridiagonalOperator a1_;
    TridiagonalOperator a2_;
    MixedOperator a0_;
    AttainableBoundaries attainable_;
    double tau_ = 0.0;
};

SplitOperator2D assemble_2d(const NonUniformGrid& grid_x, const NonUniformGrid& grid_y,
                            const Coefficients2D& coeffs, double tau,
                            AttainableBoundaries attainable = {});

/// Convenience overload matching the common case of an attainable lower y.
SplitOperator2D assemble_2d(const NonUniformGrid& grid_x, const NonUniformGrid& grid_y,
                            const Coefficients2D& coeffs, double tau, bool attainable_lower_y);

/// Unit point mass at (x0, y0): 1 / |volume| in the containing volume. A point
/// on a shared edge goes to the lower index in that direction.
DensityField dirac_initial_2d(const NonUniformGrid& grid_x, const NonUniformGrid& grid_y,
                              double x0, double y0);

}  // namespace fvslv
