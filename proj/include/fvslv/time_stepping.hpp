#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fvslv/density.hpp"
#include "fvslv/fv2d.hpp"
#include "fvslv/tridiagonal.hpp"

namespace fvslv {

/// Uniform time levels tau_n = n * dt, dt = horizon / steps.
class TimeGrid {
public:
    TimeGrid(double horizon, std::size_t steps);

    double horizon() const { return horizon_; }
    std::size_t steps() const { return steps_; }
    double dt() const { return horizon_ / static_cast<double>(steps_); }
    double time(std::size_t n) const {
        return n == steps_ ? horizon_ : static_cast<double>(n) * dt();
    }

private:
    double horizon_;
    std::size_t steps_;
};

inline constexpr double kDefaultTheta = 0.5 + 0.28867513459481288225;  // 1/2 + sqrt(3)/6

struct HvConfig {
    double theta = kDefaultTheta;
    /// Leading steps replaced by two implicit Euler half steps each.
    std::size_t rannacher_steps = 2;
};

enum class StepKind { ImplicitEulerHalf, CrankNicolson, HundsdorferVerwer };

/// Reported after every completed (sub)step.
struct StepInfo {
    std::size_t level = 0;  // full time level the substep belongs to
    double tau = 0.0;       // time reached by the substep
    StepKind kind = StepKind::CrankNicolson;
    double mass = 0.0;
};

using StepObserver = std::function<void(const StepInfo&, std::span<const double> state)>;

struct EvolveStats {
    std::size_t implicit_euler_half_steps = 0;
    std::size_t crank_nicolson_steps = 0;
    std::size_t hv_steps = 0;
    double max_mass_drift = 0.0;  // max |mass_n - mass_0|
};

struct EvolveOptions {
    /// Coefficients do not depend on tau: assemble and factor once.
    bool autonomous = false;
    StepObserver observer;
};

using Assembler1D = std::function<TridiagonalOperator(double tau)>;
using Assembler2D = std::function<SplitOperator2D(double tau)>;

/// Crank-Nicolson for P' = A(tau) P with implicit Euler half steps in place
/// of the first rannacher_steps steps (0 disables the startup).
DensityField crank_nicolson_evolve(const Assembler1D& assemble, DensityField p0,
                                   const TimeGrid& tg, std::size_t rannacher_steps = 2,
                                   const EvolveOptions& opts = {}, EvolveStats* stats = nullptr);

/// One implicit Euler step (I - dt A) P = P_prev on a single tridiagonal system.
std::vector<double> implicit_euler_1d_step(const TridiagonalOperator& a,
                                           std::span<const double> p_prev, double dt);

/// One implicit Euler step (I - dt (A0 + A1 + A2)) P = W on the full 2D system.
/// Throws SolverError with the residual if the iterative solve does not converge.
std::vector<double> implicit_euler_2d_step(const SplitOperator2D& a, std::span<const double> w,
                                           double dt);

/**
 * Split system at one time level as seen by the HV step:
 *   apply(part, in, out)            out = F_part(tau, in)
 *   solve_implicit(part, c, rhs, out)  y - c F_part(tau, y) = rhs
 * Parts X and Y must support solve_implicit.
 */
template <class S>
concept HvSystem = requires(const S& s, SplitPart part, double c, std::span<const double> in,
                            std::span<double> out) {
    s.apply(part, in, out);
    s.solve_implicit(part, c, in, out);
};

/// SplitOperator2D with the stage matrices I - c A1 and I - c A2 factored once.
class FactoredSplit2D {
public:
    FactoredSplit2D(const SplitOperator2D& op, double c);

    const SplitOperator2D& op() const { return *op_; }
    double c() const { return c_; }
    void apply(SplitPart part, std::span<const double> in, std::span<double> out) const {
        op_->apply(part, in, out);
    }
    void solve_implicit(SplitPart part, double c, std::span<const double> rhs,
                        std::span<double> out) const;

private:
    const SplitOperator2D* op_;
    double c_;
    StageFactorization fx_;
    StageFactorization fy_;
};

/**
 * One Hundsdorfer-Verwer step from tau_{n-1} (prev) to tau_n (next):
 *   Y0 = W + dt F(prev, W)
 *   Yl = Y(l-1) + theta dt (Fl(next, Yl) - Fl(prev, W)),        l = 1, 2
 *   Z0 = Y0 + dt/2 (F(next, Y2) - F(prev, W))
 *   Zl = Z(l-1) + theta dt (Fl(next, Zl) - Fl(next, Y2)),       l = 1, 2
 * and returns Z2. Part Mixed is always explicit. prev is only applied, never
 * solved against, so a plain SplitOperator2D will do.
 */
template <class Prev, HvSystem Next>
std::vector<double> hv_step(const Prev& prev, const Next& next, std::span<const double> w,
                            double theta, double dt) {
    const std::size_t n = w.size();
    const double c = theta * dt;
    std::vector<double> f0(n), f1(n), f2(n);
    prev.apply(SplitPart::Mixed, w, f0);
    prev.apply(SplitPart::X, w, f1);
    prev.apply(SplitPart::Y, w, f2);

    std::vector<double> y0(n), rhs(n), y1(n), y2(n);
    for (std::size_t k = 0; k < n; ++k) y0[k] = w[k] + dt * (f0[k] + f1[k] + f2[k]);
    for (std::size_t k = 0; k < n; ++k) rhs[k] = y0[k] - c * f1[k];
    next.solve_implicit(SplitPart::X, c, rhs, y1);
    for (std::size_t k = 0; k < n; ++k) rhs[k] = y1[k] - c * f2[k];
    next.solve_implicit(SplitPart::Y, c, rhs, y2);

    std::vector<double> g0(n), g1(n), g2(n);
    next.apply(SplitPart::Mixed, y2, g0);
    next.apply(SplitPart::X, y2, g1);
    next.apply(SplitPart::Y, y2, g2);

    std::vector<double> z(n), z1(n);
    for (std::size_t k = 0; k < n; ++k) {
        z[k] = y0[k] + 0.5 * dt * ((g0[k] + g1[k] + g2[k]) - (f0[k] + f1[k] + f2[k]));
    }
    for (std::size_t k = 0; k < n; ++k) rhs[k] = z[k] - c * g1[k];
    next.solve_implicit(SplitPart::X, c, rhs, z1);
    for (std::size_t k = 0; k < n; ++k) rhs[k] = z1[k] - c * g2[k];
    next.solve_implicit(SplitPart::Y, c, rhs, z);
    return z;
}

/// HV time stepping for P' = (A0 + A1 + A2)(tau) P with implicit Euler half
/// steps replacing the first rannacher_steps steps.
DensityField hv_evolve(const Assembler2D& assemble, DensityField p0, const TimeGrid& tg,
                       const HvConfig& cfg, const EvolveOptions& opts = {},
                       EvolveStats* stats = nullptr);

}  // namespace fvslv
