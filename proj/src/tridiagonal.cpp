#include "fvslv/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fvslv/errors.hpp"

namespace fvslv {

TridiagonalOperator::TridiagonalOperator(LineLayout layout, double tau)
    : layout_(layout),
      tau_(tau),
      lower_(layout.total(), 0.0),
      diag_(layout.total(), 0.0),
      upper_(layout.total(), 0.0) {}

TridiagonalOperator::TridiagonalOperator(std::vector<double> lower, std::vector<double> diag,
                                         std::vector<double> upper, double tau)
    : layout_(LineLayout::single(diag.size())),
      tau_(tau),
      lower_(std::move(lower)),
      diag_(std::move(diag)),
      upper_(std::move(upper)) {
    if (lower_.size() != diag_.size() || upper_.size() != diag_.size()) {
        throw ArgumentError("tridiagonal bands must have equal length");
    }
    if (!diag_.empty()) {
        lower_.front() = 0.0;
        upper_.back() = 0.0;
    }
}

void TridiagonalOperator::apply(std::span<const double> in, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    apply_add(in, 1.0, out);
}

std::vector<double> TridiagonalOperator::apply(std::span<const double> in) const {
    std::vector<double> out(in.size());
    apply(in, out);
    return out;
}

void TridiagonalOperator::apply_add(std::span<const double> in, double scale,
                                    std::span<double> out) const {
    if (in.size() != size() || out.size() != size()) {
        throw ArgumentError("tridiagonal apply: size mismatch");
    }
    const auto& L = layout_;
    for (std::size_t line = 0; line < L.count; ++line) {
        const std::size_t base = line * L.line_step;
        for (std::size_t k = 0; k < L.length; ++k) {
            const std::size_t idx = base + k * L.stride;
            double acc = diag_[idx] * in[idx];
            if (k > 0) acc += lower_[idx] * in[idx - L.stride];
            if (k + 1 < L.length) acc += upper_[idx] * in[idx + L.stride];
            out[idx] += scale * acc;
        }
    }
}

double TridiagonalOperator::max_abs_row_sum() const {
    double best = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        best = std::max(best, std::abs(lower_[i]) + std::abs(diag_[i]) + std::abs(upper_[i]));
    }
    return best;
}

StageFactorization TridiagonalOperator::factor_stage(double c) const {
    std::vector<double> lo(size()), di(size()), up(size());
    for (std::size_t i = 0; i < size(); ++i) {
        lo[i] = -c * lower_[i];
        di[i] = 1.0 - c * diag_[i];
        up[i] = -c * upper_[i];
    }
    return StageFactorization(layout_, lo, di, up);
}

StageFactorization::StageFactorization(LineLayout layout, std::span<const double> lower,
                                       std::span<const double> diag,
                                       std::span<const double> upper)
    : layout_(layout),
      lower_(lower.begin(), lower.end()),
      upper_prime_(diag.size(), 0.0),
      inv_pivot_(diag.size(), 0.0) {
    const auto& L = layout_;
    if (diag.size() != L.total() || lower.size() != L.total() || upper.size() != L.total()) {
        throw ArgumentError("stage factorization: band size does not match layout");
    }
    for (std::size_t line = 0; line < L.count; ++line) {
        const std::size_t base = line * L.line_step;
        double prev_upper_prime = 0.0;
        for (std::size_t k = 0; k < L.length; ++k) {
            const std::size_t idx = base + k * L.stride;
            const double pivot = (k == 0) ? diag[idx] : diag[idx] - lower[idx] * prev_upper_prime;
            if (pivot == 0.0 || !std::isfinite(pivot)) {
                throw SolverError("zero pivot in tridiagonal solve at line " +
                                  std::to_string(line) + ", row " + std::to_string(k));
            }
            inv_pivot_[idx] = 1.0 / pivot;
            upper_prime_[idx] = (k + 1 < L.length) ? upper[idx] * inv_pivot_[idx] : 0.0;
            prev_upper_prime = upper_prime_[idx];
        }
    }
}

void StageFactorization::solve(std::span<const double> rhs, std::span<double> out) const {
    if (rhs.size() != size() || out.size() != size()) {
        throw ArgumentError("stage solve: size mismatch");
    }
    const auto& L = layout_;
    for (std::size_t line = 0; line < L.count; ++line) {
        const std::size_t base = line * L.line_step;
        double prev = 0.0;
        for (std::size_t k = 0; k < L.length; ++k) {
            const std::size_t idx = base + k * L.stride;
            const double r = (k == 0) ? rhs[idx] : rhs[idx] - lower_[idx] * prev;
            out[idx] = r * inv_pivot_[idx];
            prev = out[idx];
        }
        for (std::size_t k = L.length - 1; k-- > 0;) {
            const std::size_t idx = base + k * L.stride;
            out[idx] -= upper_prime_[idx] * out[idx + L.stride];
        }
    }
}

std::vector<double> StageFactorization::solve(std::span<const double> rhs) const {
    std::vector<double> out(rhs.size());
    solve(rhs, out);
    return out;
}

std::vector<double> tridiagonal_solve(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper,
                                      std::span<const double> rhs) {
    const std::size_t n = diag.size();
    if (lower.size() != n || upper.size() != n || rhs.size() != n) {
        throw ArgumentError("tridiagonal_solve: size mismatch");
    }
    if (n == 0) return {};
    return StageFactorization(LineLayout::single(n), lower, diag, upper).solve(rhs);
}

}  // namespace fvslv
