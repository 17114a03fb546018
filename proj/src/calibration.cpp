#include "fvslv/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>

#include "fvslv/csv.hpp"
#include "fvslv/errors.hpp"
#include "fvslv/fv1d.hpp"
#include "fvslv/fv2d.hpp"

namespace fvslv {

LeverageSurface::LeverageSurface(std::vector<double> xs, std::vector<double> taus)
    : xs_(std::move(xs)), taus_(std::move(taus)), values_(xs_.size() * taus_.size(), 0.0) {}

std::span<const double> LeverageSurface::column(std::size_t n) const {
    return std::span<const double>(values_).subspan(n * xs_.size(), xs_.size());
}

void LeverageSurface::set_column(std::size_t n, std::span<const double> values) {
    if (values.size() != xs_.size() || n >= taus_.size()) {
        throw ArgumentError("leverage column has the wrong shape");
    }
    std::copy(values.begin(), values.end(), values_.begin() + static_cast<std::ptrdiff_t>(n * xs_.size()));
}

void LeverageSurface::write_csv(const std::filesystem::path& path) const {
    CsvWriter out(path, {"tau", "x", "sigma_slv"});
    for (std::size_t n = 0; n < taus_.size(); ++n) {
        for (std::size_t i = 0; i < xs_.size(); ++i) out.row({taus_[n], xs_[i], (*this)(i, n)});
    }
}

PiecewiseLinear::PiecewiseLinear(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.empty() || xs_.size() != ys_.size()) {
        throw ArgumentError("piecewise linear interpolant: bad sizes");
    }
}

double PiecewiseLinear::operator()(double x) const {
    if (x <= xs_.front()) return ys_.front();
    if (x >= xs_.back()) return ys_.back();
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const auto k = static_cast<std::size_t>(it - xs_.begin());
    const double t = (x - xs_[k - 1]) / (xs_[k] - xs_[k - 1]);
    return (1.0 - t) * ys_[k - 1] + t * ys_[k];
}

std::vector<double> conditional_expectation(const DensityField& p, const NonUniformGrid& grid_v,
                                            const std::function<double(double)>& psi_sq,
                                            std::span<const double> fallback) {
    const std::size_t m1 = p.rows();
    const std::size_t m2 = p.cols();
    if (grid_v.size() != m2 || fallback.size() != m1) {
        throw ArgumentError("conditional_expectation: size mismatch");
    }
    std::vector<double> psi(m2);
    for (std::size_t j = 0; j < m2; ++j) psi[j] = psi_sq(grid_v.node(j));
    std::vector<double> num(m1, 0.0);
    std::vector<double> den(m1, 0.0);
    for (std::size_t j = 0; j < m2; ++j) {
        const double w = grid_v.weight(j);
        for (std::size_t i = 0; i < m1; ++i) {
            const double a = std::abs(p(i, j)) * w;
            num[i] += psi[j] * a;
            den[i] += a;
        }
    }
    std::vector<double> e(m1);
    for (std::size_t i = 0; i < m1; ++i) e[i] = den[i] == 0.0 ? fallback[i] : num[i] / den[i];
    return e;
}

std::vector<double> leverage_update(std::span<const double> sigma_lv,
                                    std::span<const double> expectation) {
    if (sigma_lv.size() != expectation.size()) throw ArgumentError("leverage_update: size mismatch");
    std::vector<double> out(sigma_lv.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!(expectation[i] > 0.0)) {
            throw CalibrationError("non-positive conditional expectation at node " +
                                   std::to_string(i));
        }
        out[i] = sigma_lv[i] / std::sqrt(expectation[i]);
    }
    return out;
}

std::vector<double> marginal_density(const DensityField& p, const NonUniformGrid& grid_v) {
    if (grid_v.size() != p.cols()) throw ArgumentError("marginal_density: size mismatch");
    std::vector<double> out(p.rows(), 0.0);
    for (std::size_t j = 0; j < p.cols(); ++j) {
        const double w = grid_v.weight(j);
        for (std::size_t i = 0; i < p.rows(); ++i) out[i] += p(i, j) * w;
    }
    return out;
}

namespace {

std::vector<double> sample_lv(const LvSurface& lv, const NonUniformGrid& gx, double tau) {
    std::vector<double> s(gx.size());
    for (std::size_t i = 0; i < gx.size(); ++i) s[i] = lv(gx.node(i), tau);
    return s;
}

class Calibrator {
public:
    Calibrator(const SlvParams& slv, const LvSurface& lv, const NonUniformGrid& gx,
               const NonUniformGrid& gv, const CalibrationOptions& opts)
        : slv_(slv), lv_(lv), gx_(gx), gv_(gv), opts_(opts) {
        attainable_.lower_y = slv.zero_attainable();
        psi_sq_ = [this](double v) { return slv_.psi_sq(v); };
    }

    SplitOperator2D assemble(std::span<const double> leverage, double tau) const {
        auto interp = std::make_shared<PiecewiseLinear>(
            std::vector<double>(gx_.nodes().begin(), gx_.nodes().end()),
            std::vector<double>(leverage.begin(), leverage.end()));
        const Coefficients2D c =
            slv_coefficients(slv_, [interp](double x, double) { return (*interp)(x); });
        return assemble_2d(gx_, gv_, c, tau, attainable_);
    }

    std::vector<double> expectation(std::span<const double> state,
                                    std::span<const double> fallback) const {
        DensityField f(gx_, gv_);
        f.assign(state);
        return conditional_expectation(f, gv_, psi_sq_, fallback);
    }

    const SlvParams& slv_;
    const LvSurface& lv_;
    const NonUniformGrid& gx_;
    const NonUniformGrid& gv_;
    const CalibrationOptions& opts_;
    AttainableBoundaries attainable_;
    std::function<double(double)> psi_sq_;
};

}  // namespace

CalibrationResult calibrate(const SlvParams& slv, const LvSurface& lv,
                            const NonUniformGrid& grid_x, const NonUniformGrid& grid_v,
                            const TimeGrid& tg, const CalibrationOptions& opts) {
    slv.validate();
    if (opts.inner_iterations == 0) throw ArgumentError("need at least one inner iteration");
    if (!(opts.hv.theta > 0.0)) throw ArgumentError("theta must be positive");
    const Calibrator cal(slv, lv, grid_x, grid_v, opts);
    const std::size_t m1 = grid_x.size();
    const double dt = tg.dt();
    const double theta = opts.hv.theta;
    const std::size_t startup = std::min(opts.hv.rannacher_steps, tg.steps());

    std::vector<double> taus(tg.steps() + 1);
    for (std::size_t n = 0; n <= tg.steps(); ++n) taus[n] = tg.time(n);
    LeverageSurface surface(std::vector<double>(grid_x.nodes().begin(), grid_x.nodes().end()),
                            taus);

    DensityField field = dirac_initial_2d(grid_x, grid_v, slv.x0, slv.v0);
    std::vector<double> state(field.values().begin(), field.values().end());
    const std::vector<double> weights(field.weights().begin(), field.weights().end());
    const double mass0 = total_mass(state, weights);
    EvolveStats stats;

    std::vector<double> e_prev(m1, slv.psi_sq(slv.v0));
    std::vector<double> lev = leverage_update(sample_lv(lv, grid_x, 0.0), e_prev);
    surface.set_column(0, lev);

    auto report = [&](std::size_t n, double tau, StepKind kind) {
        const double mass = total_mass(state, weights);
        stats.max_mass_drift = std::max(stats.max_mass_drift, std::abs(mass - mass0));
        if (kind == StepKind::ImplicitEulerHalf) {
            ++stats.implicit_euler_half_steps;
        } else {
            ++stats.hv_steps;
        }
        if (opts.observer) opts.observer(StepInfo{n, tau, kind, mass}, state);
    };
    auto located = [](const Error& e, std::size_t n, std::size_t q) -> std::string {
        return std::string(e.what()) + " (time level " + std::to_string(n) +
               ", inner iteration " + std::to_string(q) + ")";
    };

    std::optional<SplitOperator2D> a_prev;
    if (startup == 0) a_prev.emplace(cal.assemble(lev, 0.0));
    for (std::size_t n = 1; n <= tg.steps(); ++n) {
        const double t0 = tg.time(n - 1);
        const double t1 = tg.time(n);
        if (n <= startup) {
            for (int half = 1; half <= 2; ++half) {
                const double tb = half == 1 ? t0 + 0.5 * dt : t1;
                const std::vector<double> sigma_lv = sample_lv(lv, grid_x, tb);
                const std::vector<double> start = state;
                std::vector<double> e;
                for (std::size_t q = 1; q <= opts.inner_iterations; ++q) {
                    try {
                        e = cal.expectation(state, e_prev);
                        lev = leverage_update(sigma_lv, e);
                        a_prev.emplace(cal.assemble(lev, tb));
                        state = implicit_euler_2d_step(*a_prev, start, 0.5 * dt);
                    } catch (const SolverError& err) {
                        throw SolverError(located(err, n, q));
                    } catch (const CalibrationError& err) {
                        throw CalibrationError(located(err, n, q));
                    }
                }
                e_prev = std::move(e);
                report(n, tb, StepKind::ImplicitEulerHalf);
            }
        } else {
            const std::vector<double> sigma_lv = sample_lv(lv, grid_x, t1);
            const std::vector<double> start = state;
            std::vector<double> e;
            std::optional<SplitOperator2D> a_next;
            for (std::size_t q = 1; q <= opts.inner_iterations; ++q) {
                try {
                    e = cal.expectation(state, e_prev);
                    lev = leverage_update(sigma_lv, e);
                    a_next.emplace(cal.assemble(lev, t1));
                    const FactoredSplit2D next(*a_next, theta * dt);
                    state = hv_step(*a_prev, next, start, theta, dt);
                } catch (const SolverError& err) {
                    throw SolverError(located(err, n, q));
                } catch (const CalibrationError& err) {
                    throw CalibrationError(located(err, n, q));
                }
            }
            a_prev = std::move(a_next);
            e_prev = std::move(e);
            report(n, t1, StepKind::HundsdorferVerwer);
        }
        surface.set_column(n, lev);
    }
    if (tg.steps() >= 1) surface.set_column(0, surface.column(1));

    field.assign(state);
    return {std::move(surface), std::move(field), stats};
}

DensityField lv_density_1d(const LvSurface& lv, double r_d, double r_f,
                           const NonUniformGrid& grid_x, double x0, const TimeGrid& tg,
                           std::size_t rannacher_steps, const StepObserver& observer,
                           EvolveStats* stats) {
    const double drift = r_d - r_f;
    Coefficients1D c;
    c.drift = [&lv, drift](double x, double tau) {
        const double s = lv(x, tau);
        return drift - 0.5 * s * s;
    };
    c.diffusion = [&lv](double x, double tau) { return lv(x, tau); };
    EvolveOptions opts;
    opts.autonomous = lv.time_independent();
    opts.observer = observer;
    return crank_nicolson_evolve(
        [&](double tau) { return assemble_1d(grid_x, c, tau); }, dirac_initial_1d(grid_x, x0),
        tg, rannacher_steps, opts, stats);
}

}  // namespace fvslv
