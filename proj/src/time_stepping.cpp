#include "fvslv/time_stepping.hpp"

#include <algorithm>
#include <optional>
#include <string>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include "fvslv/errors.hpp"

namespace fvslv {

TimeGrid::TimeGrid(double horizon, std::size_t steps) : horizon_(horizon), steps_(steps) {
    if (steps == 0) throw ArgumentError("time grid needs at least one step");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw ArgumentError("time horizon must be positive and finite");
    }
}

namespace {

class MassMonitor {
public:
    MassMonitor(std::span<const double> weights, const StepObserver& observer,
                std::span<const double> initial, EvolveStats* stats)
        : weights_(weights), observer_(observer), stats_(stats) {
        mass0_ = total_mass(initial, weights_);
    }

    void report(std::size_t level, double tau, StepKind kind, std::span<const double> state) {
        const double mass = total_mass(state, weights_);
        if (stats_ != nullptr) {
            stats_->max_mass_drift = std::max(stats_->max_mass_drift, std::abs(mass - mass0_));
            switch (kind) {
                case StepKind::ImplicitEulerHalf: ++stats_->implicit_euler_half_steps; break;
                case StepKind::CrankNicolson: ++stats_->crank_nicolson_steps; break;
                case StepKind::HundsdorferVerwer: ++stats_->hv_steps; break;
            }
        }
        if (observer_) observer_(StepInfo{level, tau, kind, mass}, state);
    }

private:
    std::span<const double> weights_;
    const StepObserver& observer_;
    EvolveStats* stats_;
    double mass0_ = 0.0;
};

Eigen::SparseMatrix<double> stage_matrix(const SplitOperator2D& a, double dt) {
    using Triplet = Eigen::Triplet<double>;
    const std::size_t m1 = a.rows();
    const std::size_t m2 = a.cols();
    const auto n = static_cast<Eigen::Index>(a.size());
    std::vector<Triplet> t;
    t.reserve(a.size() * 13);
    for (std::size_t k = 0; k < a.size(); ++k) {
        const auto ik = static_cast<Eigen::Index>(k);
        t.emplace_back(ik, ik, 1.0);
    }
    for (const TridiagonalOperator* op : {&a.a1(), &a.a2()}) {
        const LineLayout& L = op->layout();
        for (std::size_t line = 0; line < L.count; ++line) {
            for (std::size_t k = 0; k < L.length; ++k) {
                const std::size_t idx = L.index(line, k);
                const auto row = static_cast<Eigen::Index>(idx);
                t.emplace_back(row, row, -dt * op->diag()[idx]);
                if (k > 0) {
                    t.emplace_back(row, static_cast<Eigen::Index>(idx - L.stride),
                                   -dt * op->lower()[idx]);
                }
                if (k + 1 < L.length) {
                    t.emplace_back(row, static_cast<Eigen::Index>(idx + L.stride),
                                   -dt * op->upper()[idx]);
                }
            }
        }
    }
    const MixedOperator& a0 = a.a0();
    for (std::size_t j = 0; j < m2; ++j) {
        for (std::size_t i = 0; i < m1; ++i) {
            const auto row = static_cast<Eigen::Index>(i + m1 * j);
            for (int dj = -1; dj <= 1; ++dj) {
                if ((j == 0 && dj < 0) || (j + 1 == m2 && dj > 0)) continue;
                for (int di = -1; di <= 1; ++di) {
                    if ((i == 0 && di < 0) || (i + 1 == m1 && di > 0)) continue;
                    const double v = a0.coefficient(i, j, di, dj);
                    if (v == 0.0) continue;
                    const auto col = row + di + static_cast<Eigen::Index>(m1) * dj;
                    t.emplace_back(row, col, -dt * v);
                }
            }
        }
    }
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

}  // namespace

std::vector<double> implicit_euler_1d_step(const TridiagonalOperator& a,
                                           std::span<const double> p_prev, double dt) {
    return a.factor_stage(dt).solve(p_prev);
}

std::vector<double> implicit_euler_2d_step(const SplitOperator2D& a, std::span<const double> w,
                                           double dt) {
    if (w.size() != a.size()) throw ArgumentError("implicit Euler step: size mismatch");
    const Eigen::SparseMatrix<double> m = stage_matrix(a, dt);
    const Eigen::Map<const Eigen::VectorXd> rhs(w.data(), static_cast<Eigen::Index>(w.size()));

    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> solver;
    solver.setTolerance(1e-12);
    solver.setMaxIterations(500);
    solver.compute(m);
    if (solver.info() != Eigen::Success) {
        throw SolverError("implicit Euler: preconditioner setup failed");
    }
    Eigen::VectorXd x = solver.solveWithGuess(rhs, rhs);
    if (solver.info() != Eigen::Success) {
        throw SolverError("implicit Euler: no convergence after " +
                          std::to_string(solver.iterations()) +
                          " iterations, relative residual " + std::to_string(solver.error()));
    }
    return {x.data(), x.data() + x.size()};
}

FactoredSplit2D::FactoredSplit2D(const SplitOperator2D& op, double c)
    : op_(&op),
      c_(c),
      fx_(op.factor(SplitPart::X, c)),
      fy_(op.factor(SplitPart::Y, c)) {}

void FactoredSplit2D::solve_implicit(SplitPart part, double c, std::span<const double> rhs,
                                     std::span<double> out) const {
    if (c != c_) throw ArgumentError("stage factorization was built for another step size");
    switch (part) {
        case SplitPart::X: fx_.solve(rhs, out); return;
        case SplitPart::Y: fy_.solve(rhs, out); return;
        case SplitPart::Mixed: break;
    }
    throw ArgumentError("the mixed-derivative part has no implicit stage");
}

DensityField crank_nicolson_evolve(const Assembler1D& assemble, DensityField p0,
                                   const TimeGrid& tg, std::size_t rannacher_steps,
                                   const EvolveOptions& opts, EvolveStats* stats) {
    std::vector<double> state(p0.values().begin(), p0.values().end());
    MassMonitor monitor(p0.weights(), opts.observer, state, stats);
    const double dt = tg.dt();
    const std::size_t startup = std::min(rannacher_steps, tg.steps());

    TridiagonalOperator a_prev = assemble(0.0);
    // In the autonomous case I - dt/2 A serves both the half steps and CN.
    std::optional<StageFactorization> cached;
    if (opts.autonomous) cached.emplace(a_prev.factor_stage(0.5 * dt));

    std::vector<double> rhs(state.size());
    for (std::size_t n = 1; n <= tg.steps(); ++n) {
        const double t0 = tg.time(n - 1);
        const double t1 = tg.time(n);
        if (n <= startup) {
            for (int half = 1; half <= 2; ++half) {
                const double th = half == 1 ? t0 + 0.5 * dt : t1;
                if (opts.autonomous) {
                    cached->solve(state, rhs);
                } else {
                    a_prev = assemble(th);
                    a_prev.factor_stage(0.5 * dt).solve(state, rhs);
                }
                state.swap(rhs);
                monitor.report(n, th, StepKind::ImplicitEulerHalf, state);
            }
            continue;
        }
        std::copy(state.begin(), state.end(), rhs.begin());
        a_prev.apply_add(state, 0.5 * dt, rhs);
        if (opts.autonomous) {
            cached->solve(rhs, state);
        } else {
            a_prev = assemble(t1);
            a_prev.factor_stage(0.5 * dt).solve(rhs, state);
        }
        monitor.report(n, t1, StepKind::CrankNicolson, state);
    }
    p0.assign(state);
    return p0;
}

DensityField hv_evolve(const Assembler2D& assemble, DensityField p0, const TimeGrid& tg,
                       const HvConfig& cfg, const EvolveOptions& opts, EvolveStats* stats) {
    if (!(cfg.theta > 0.0)) throw ArgumentError("theta must be positive");
    std::vector<double> state(p0.values().begin(), p0.values().end());
    MassMonitor monitor(p0.weights(), opts.observer, state, stats);
    const double dt = tg.dt();
    const std::size_t startup = std::min(cfg.rannacher_steps, tg.steps());

    SplitOperator2D a_prev = assemble(0.0);
    std::optional<FactoredSplit2D> cached;

    for (std::size_t n = 1; n <= tg.steps(); ++n) {
        const double t0 = tg.time(n - 1);
        const double t1 = tg.time(n);
        if (n <= startup) {
            for (int half = 1; half <= 2; ++half) {
                const double th = half == 1 ? t0 + 0.5 * dt : t1;
                if (!opts.autonomous) a_prev = assemble(th);
                state = implicit_euler_2d_step(a_prev, state, 0.5 * dt);
                monitor.report(n, th, StepKind::ImplicitEulerHalf, state);
            }
            continue;
        }
        if (opts.autonomous) {
            if (!cached) cached.emplace(a_prev, cfg.theta * dt);
            state = hv_step(a_prev, *cached, state, cfg.theta, dt);
        } else {
            SplitOperator2D a_next = assemble(t1);
            const FactoredSplit2D next(a_next, cfg.theta * dt);
            state = hv_step(a_prev, next, state, cfg.theta, dt);
            a_prev = std::move(a_next);
        }
        monitor.report(n, t1, StepKind::HundsdorferVerwer, state);
    }
    p0.assign(state);
    return p0;
}

}  // namespace fvslv
