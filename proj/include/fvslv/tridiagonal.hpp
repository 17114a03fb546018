#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fvslv {

/**
 * Layout of a family of independent tridiagonal lines inside one flat vector.
 * Element k of line l sits at index l * line_step + k * stride. A 1D operator
 * is a single line with stride 1; on a column-stacked m1 x m2 field the
 * x-direction uses {m1, 1, m2, m1} and the y-direction {m2, m1, m1, 1}.
 */
struct LineLayout {
    std::size_t length = 0;
    std::size_t stride = 1;
    std::size_t count = 1;
    std::size_t line_step = 0;

    static LineLayout single(std::size_t n) { return {n, 1, 1, n}; }
    std::size_t total() const { return length * count; }
    std::size_t index(std::size_t line, std::size_t k) const {
        return line * line_step + k * stride;
    }
};

class StageFactorization;

/// Tridiagonal coupling along lines of a flat vector. lower(k) couples index k to
/// its predecessor on the same line, upper(k) to its successor; both are zero at
/// line ends.
class TridiagonalOperator {
public:
    TridiagonalOperator() = default;
    explicit TridiagonalOperator(LineLayout layout, double tau = 0.0);
    TridiagonalOperator(std::vector<double> lower, std::vector<double> diag,
                        std::vector<double> upper, double tau = 0.0);

    const LineLayout& layout() const { return layout_; }
    std::size_t size() const { return diag_.size(); }
    double tau() const { return tau_; }

    std::span<double> lower() { return lower_; }
    std::span<double> diag() { return diag_; }
    std::span<double> upper() { return upper_; }
    std::span<const double> lower() const { return lower_; }
    std::span<const double> diag() const { return diag_; }
    std::span<const double> upper() const { return upper_; }

    /// out = A in
    void apply(std::span<const double> in, std::span<double> out) const;
    std::vector<double> apply(std::span<const double> in) const;

    /// out += scale * A in
    void apply_add(std::span<const double> in, double scale, std::span<double> out) const;

    double max_abs_row_sum() const;

    /// Factorization of I - c A for repeated solves.
    StageFactorization factor_stage(double c) const;

private:
    LineLayout layout_;
    double tau_ = 0.0;
    std::vector<double> lower_;
    std::vector<double> diag_;
    std::vector<double> upper_;
};

/// Thomas factorization of a tridiagonal system laid out in lines.
class StageFactorization {
public:
    StageFactorization(LineLayout layout, std::span<const double> lower,
                       std::span<const double> diag, std::span<const double> upper);

    std::size_t size() const { return inv_pivot_.size(); }
    void solve(std::span<const double> rhs, std::span<double> out) const;
    std::vector<double> solve(std::span<const double> rhs) const;

private:
    LineLayout layout_;
    std::vector<double> lower_;
    std::vector<double> upper_prime_;
    std::vector<double> inv_pivot_;
};

/// Solves a single tridiagonal system without pivoting. lower[0] and
/// upper[n-1] are ignored. Throws SolverError on a zero pivot.
std::vector<double> tridiagonal_solve(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper,
                                      std::span<const double> rhs);

}  // namespace fvslv
