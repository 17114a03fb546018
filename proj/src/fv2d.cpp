#include "fvslv/fv2d.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fvslv/errors.hpp"
#include "fvslv/fv1d.hpp"

namespace fvslv {

MixedOperator::MixedOperator(std::size_t m1, std::size_t m2) : m1_(m1), m2_(m2) {
    for (auto& c : coef_) c.assign(m1 * m2, 0.0);
}

void MixedOperator::apply(std::span<const double> in, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    apply_add(in, 1.0, out);
}

void MixedOperator::apply_add(std::span<const double> in, double scale,
                              std::span<double> out) const {
    if (in.size() != size() || out.size() != size()) {
        throw ArgumentError("mixed operator apply: size mismatch");
    }
    const std::ptrdiff_t m1 = static_cast<std::ptrdiff_t>(m1_);
    const std::ptrdiff_t m2 = static_cast<std::ptrdiff_t>(m2_);
    for (std::ptrdiff_t j = 0; j < m2; ++j) {
        const int dj_lo = j == 0 ? 0 : -1;
        const int dj_hi = j == m2 - 1 ? 0 : 1;
        for (std::ptrdiff_t i = 0; i < m1; ++i) {
            const int di_lo = i == 0 ? 0 : -1;
            const int di_hi = i == m1 - 1 ? 0 : 1;
            const std::ptrdiff_t row = i + m1 * j;
            double acc = 0.0;
            for (int dj = dj_lo; dj <= dj_hi; ++dj) {
                for (int di = di_lo; di <= di_hi; ++di) {
                    acc += coef_[slot(di, dj)][static_cast<std::size_t>(row)] *
                           in[static_cast<std::size_t>(row + di + m1 * dj)];
                }
            }
            out[static_cast<std::size_t>(row)] += scale * acc;
        }
    }
}

double MixedOperator::max_abs_row_sum() const {
    double best = 0.0;
    for (std::size_t k = 0; k < size(); ++k) {
        double s = 0.0;
        for (const auto& c : coef_) s += std::abs(c[k]);
        best = std::max(best, s);
    }
    return best;
}

SplitOperator2D::SplitOperator2D(TridiagonalOperator a1, TridiagonalOperator a2,
                                 MixedOperator a0, AttainableBoundaries attainable, double tau)
    : a1_(std::move(a1)),
      a2_(std::move(a2)),
      a0_(std::move(a0)),
      attainable_(attainable),
      tau_(tau) {}

void SplitOperator2D::apply(SplitPart part, std::span<const double> in,
                            std::span<double> out) const {
    switch (part) {
        case SplitPart::Mixed: a0_.apply(in, out); break;
        case SplitPart::X: a1_.apply(in, out); break;
        case SplitPart::Y: a2_.apply(in, out); break;
    }
}

void SplitOperator2D::apply_all(std::span<const double> in, std::span<double> out) const {
    a0_.apply(in, out);
    a1_.apply_add(in, 1.0, out);
    a2_.apply_add(in, 1.0, out);
}

StageFactorization SplitOperator2D::factor(SplitPart part, double c) const {
    switch (part) {
        case SplitPart::X: return a1_.factor_stage(c);
        case SplitPart::Y: return a2_.factor_stage(c);
        case SplitPart::Mixed: break;
    }
    throw ArgumentError("the mixed-derivative part is always treated explicitly");
}

double SplitOperator2D::max_abs_row_sum() const {
    // Row sums of |A0| + |A1| + |A2| bounded by the sum of the parts' maxima.
    return a0_.max_abs_row_sum() + a1_.max_abs_row_sum() + a2_.max_abs_row_sum();
}

namespace {

double sample(const Coefficients2D::Field& f, const char* what, double x, double y, double tau) {
    const double v = f(x, y, tau);
    if (!std::isfinite(v)) {
        throw EvaluationError(std::string(what) + " is not finite at (" + std::to_string(x) +
                              ", " + std::to_string(y) + "), tau=" + std::to_string(tau));
    }
    return v;
}

double sample_diffusion(const Coefficients2D::Field& f, const char* what, double x, double y,
                        double tau) {
    const double v = sample(f, what, x, y, tau);
    if (v < 0.0) {
        throw ModelError(std::string("negative ") + what + " at (" + std::to_string(x) + ", " +
                         std::to_string(y) + ")");
    }
    return v;
}

// Cells entering the mixed flux at corner (a, b) and their averaging weights.
struct CornerStencil {
    std::array<std::size_t, 4> ci{};
    std::array<std::size_t, 4> cj{};
    std::array<double, 4> w{};
    int n = 0;
};

CornerStencil corner_stencil(std::size_t a, std::size_t b, std::size_t m1, std::size_t m2,
                             const AttainableBoundaries& at) {
    auto clamp_x = [m1](std::size_t a_, int off) {
        const std::ptrdiff_t c = static_cast<std::ptrdiff_t>(a_) + off;
        return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(c, 0, m1 - 1));
    };
    auto clamp_y = [m2](std::size_t b_, int off) {
        const std::ptrdiff_t c = static_cast<std::ptrdiff_t>(b_) + off;
        return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(c, 0, m2 - 1));
    };

    std::array<std::size_t, 2> xs{clamp_x(a, -1), clamp_x(a, 0)};
    std::array<std::size_t, 2> ys{clamp_y(b, -1), clamp_y(b, 0)};
    int nx = 2;
    int ny = 2;
    if (at.lower_x && a == 1 && m1 > 2) {
        xs = {1, 1};
        nx = 1;
    } else if (at.upper_x && a == m1 - 1 && m1 > 2) {
        xs = {m1 - 2, m1 - 2};
        nx = 1;
    }
    if (at.lower_y && b == 1 && m2 > 2) {
        ys = {1, 1};
        ny = 1;
    } else if (at.upper_y && b == m2 - 1 && m2 > 2) {
        ys = {m2 - 2, m2 - 2};
        ny = 1;
    }
    CornerStencil s;
    const double weight = 1.0 / static_cast<double>(nx * ny);
    for (int q = 0; q < ny; ++q) {
        for (int p = 0; p < nx; ++p) {
            s.ci[static_cast<std::size_t>(s.n)] = xs[static_cast<std::size_t>(p)];
            s.cj[static_cast<std::size_t>(s.n)] = ys[static_cast<std::size_t>(q)];
            s.w[static_cast<std::size_t>(s.n)] = weight;
            ++s.n;
        }
    }
    return s;
}

MixedOperator assemble_mixed(const NonUniformGrid& gx, const NonUniformGrid& gy,
                             const Coefficients2D& coeffs, double tau,
                             const AttainableBoundaries& at) {
    const std::size_t m1 = gx.size();
    const std::size_t m2 = gy.size();
    MixedOperator a0(m1, m2);
    if (coeffs.rho == 0.0) return a0;

    for (std::size_t b = 0; b <= m2; ++b) {
        const double y = gy.face(b);
        for (std::size_t a = 0; a <= m1; ++a) {
            const double x = gx.face(a);
            const double s1 = sample_diffusion(coeffs.diffusion_x, "diffusion_x", x, y, tau);
            const double s2 = sample_diffusion(coeffs.diffusion_y, "diffusion_y", x, y, tau);
            const double g = coeffs.rho * s1 * s2;
            if (g == 0.0) continue;
            const CornerStencil st = corner_stencil(a, b, m1, m2, at);
            // Rows sharing this corner: (a-1 or a) x (b-1 or b), sign (-1)^(i1+j1)
            // with i1 = a - i, j1 = b - j.
            for (int j1 = 0; j1 <= 1; ++j1) {
                if (b < static_cast<std::size_t>(j1)) continue;
                const std::size_t j = b - static_cast<std::size_t>(j1);
                if (j >= m2) continue;
                for (int i1 = 0; i1 <= 1; ++i1) {
                    if (a < static_cast<std::size_t>(i1)) continue;
                    const std::size_t i = a - static_cast<std::size_t>(i1);
                    if (i >= m1) continue;
                    const double sign = ((i1 + j1) % 2 == 0) ? 1.0 : -1.0;
                    const double scale = sign * g / (gx.weight(i) * gy.weight(j));
                    for (int q = 0; q < st.n; ++q) {
                        const auto uq = static_cast<std::size_t>(q);
                        const int di = static_cast<int>(st.ci[uq]) - static_cast<int>(i);
                        const int dj = static_cast<int>(st.cj[uq]) - static_cast<int>(j);
                        a0.coefficient(i, j, di, dj) += scale * st.w[uq];
                    }
                }
            }
        }
    }
    return a0;
}

}  // namespace

SplitOperator2D assemble_2d(const NonUniformGrid& gx, const NonUniformGrid& gy,
                            const Coefficients2D& coeffs, double tau,
                            AttainableBoundaries attainable) {
    if (!(std::abs(coeffs.rho) <= 1.0)) {
        throw ArgumentError("correlation must lie in [-1, 1], got " + std::to_string(coeffs.rho));
    }
    const std::size_t m1 = gx.size();
    const std::size_t m2 = gy.size();

    TridiagonalOperator a1(LineLayout{m1, 1, m2, m1}, tau);
    {
        std::vector<double> sigma_sq(m1);
        std::vector<double> drift(m1 + 1, 0.0);
        for (std::size_t j = 0; j < m2; ++j) {
            const double y = gy.node(j);
            for (std::size_t i = 0; i < m1; ++i) {
                const double s =
                    sample_diffusion(coeffs.diffusion_x, "diffusion_x", gx.node(i), y, tau);
                sigma_sq[i] = s * s;
            }
            for (std::size_t k = 1; k < m1; ++k) {
                drift[k] = sample(coeffs.drift_x, "drift_x", gx.face(k), y, tau);
            }
            fill_fv_line(gx, sigma_sq, drift, a1, j);
        }
    }

    TridiagonalOperator a2(LineLayout{m2, m1, m1, 1}, tau);
    {
        std::vector<double> sigma_sq(m2);
        std::vector<double> drift(m2 + 1, 0.0);
        for (std::size_t i = 0; i < m1; ++i) {
            const double x = gx.node(i);
            for (std::size_t j = 0; j < m2; ++j) {
                const double s =
                    sample_diffusion(coeffs.diffusion_y, "diffusion_y", x, gy.node(j), tau);
                sigma_sq[j] = s * s;
            }
            for (std::size_t k = 1; k < m2; ++k) {
                drift[k] = sample(coeffs.drift_y, "drift_y", x, gy.face(k), tau);
            }
            fill_fv_line(gy, sigma_sq, drift, a2, i);
        }
    }

    MixedOperator a0 = assemble_mixed(gx, gy, coeffs, tau, attainable);
    return SplitOperator2D(std::move(a1), std::move(a2), std::move(a0), attainable, tau);
}

SplitOperator2D assemble_2d(const NonUniformGrid& gx, const NonUniformGrid& gy,
                            const Coefficients2D& coeffs, double tau, bool attainable_lower_y) {
    AttainableBoundaries at;
    at.lower_y = attainable_lower_y;
    return assemble_2d(gx, gy, coeffs, tau, at);
}

DensityField dirac_initial_2d(const NonUniformGrid& gx, const NonUniformGrid& gy, double x0,
                              double y0) {
    DensityField field(gx, gy);
    const std::size_t i = gx.locate_cell(x0);
    const std::size_t j = gy.locate_cell(y0);
    field(i, j) = 1.0 / (gx.weight(i) * gy.weight(j));
    return field;
}

}  // namespace fvslv
