#include "fvslv/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fvslv/csv.hpp"
#include "fvslv/errors.hpp"
#include "fvslv/fv1d.hpp"
#include "fvslv/fv2d.hpp"

namespace fvslv {

const std::vector<ParameterSet>& builtin_sets() {
    static const std::vector<ParameterSet> sets = [] {
        auto make = [](std::string name, SetKind kind, double kappa, double eta, double xi,
                       double rho, double r_d, double r_f, double v0, double horizon,
                       double s0) {
            SlvParams p;
            p.kappa = kappa;
            p.eta = eta;
            p.xi = xi;
            p.rho = rho;
            p.r_d = r_d;
            p.r_f = r_f;
            p.x0 = 0.0;
            p.v0 = v0;
            p.horizon = horizon;
            return ParameterSet{std::move(name), kind, p, s0};
        };
        return std::vector<ParameterSet>{
            make("A", SetKind::Cir, 5.0, 0.16, 0.9, 0.0, 0.0, 0.0, 0.0625, 0.25, 1.0),
            make("B", SetKind::Cir, 1.15, 0.0348, 0.39, 0.0, 0.0, 0.0, 0.0348, 0.25, 1.0),
            make("C", SetKind::Heston, 5.0, 0.16, 0.9, 0.1, 0.1, 0.0, 0.0625, 0.25, 1.0),
            make("D", SetKind::Heston, 1.15, 0.0348, 0.39, -0.64, 0.04, 0.0, 0.0348, 0.25, 1.0),
            make("E", SetKind::Calibration, 5.0, 0.16, 0.9, 0.1, 0.02, 0.01, 0.0625, 0.25,
                 1.08815),
            make("F", SetKind::Calibration, 1.15, 0.0348, 0.39, -0.64, 0.02, 0.01, 0.0348, 0.25,
                 1.08815),
            make("G", SetKind::Calibration, 1.5, 0.0154, 0.24, -0.11, 0.02, 0.01, 0.0154, 1.0,
                 1.08815),
        };
    }();
    return sets;
}

const ParameterSet& find_set(std::string_view name) {
    for (const auto& s : builtin_sets()) {
        if (s.name == name) return s;
    }
    throw ConfigError("unknown parameter set '" + std::string(name) + "'");
}

NonUniformGrid make_price_grid(double s0, double factor, double density, std::size_t m) {
    return make_pinned_grid(0.0, factor * s0, s0, density, m);
}

NonUniformGrid make_variance_grid(double v0, double v_max, double density, std::size_t m) {
    return make_pinned_grid(0.0, v_max, v0, density, m, 0.0);
}

NonUniformGrid make_log_grid(double x0, double half_width, double density, std::size_t m) {
    return make_pinned_grid(x0 - half_width, x0 + half_width, x0, density, m);
}

void MassLog::record(const StepInfo& info) {
    level.push_back(info.level);
    tau.push_back(info.tau);
    mass.push_back(info.mass);
}

StepObserver MassLog::observer() {
    return [this](const StepInfo& info, std::span<const double>) { record(info); };
}

double MassLog::max_drift() const {
    double d = 0.0;
    for (double m : mass) d = std::max(d, std::abs(m - 1.0));
    return d;
}

void MassLog::write_csv(const std::filesystem::path& path) const {
    CsvWriter out(path, {"level", "tau", "mass", "drift"});
    for (std::size_t k = 0; k < mass.size(); ++k) {
        out.row({static_cast<double>(level[k]), tau[k], mass[k], mass[k] - 1.0});
    }
}

Run1D run_bs1d(const Bs1dConfig& cfg) {
    cfg.params.validate();
    const double s0 = cfg.params.s0;
    NonUniformGrid grid = make_price_grid(s0, cfg.domain_factor, cfg.density * s0, cfg.m);
    const Coefficients1D coeffs = bs1d_coefficients(cfg.params);
    const TimeGrid tg(cfg.horizon, cfg.steps);
    MassLog mass;
    EvolveOptions opts;
    opts.autonomous = true;
    opts.observer = mass.observer();
    const DensityField p = crank_nicolson_evolve(
        [&](double tau) { return assemble_1d(grid, coeffs, tau); }, dirac_initial_1d(grid, s0),
        tg, cfg.rannacher_steps, opts);

    std::vector<double> exact(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.node(i) > 0.0) exact[i] = bs1d_exact_density(cfg.params, grid.node(i), cfg.horizon);
    }
    std::vector<double> numeric(p.values().begin(), p.values().end());
    MixedErrorReport err = mixed_error(exact, numeric);
    return {std::move(grid), std::move(numeric), std::move(exact), std::move(err), std::move(mass)};
}

Run1D run_cir(const CirConfig& cfg) {
    cfg.params.validate();
    const double v0 = cfg.params.v0;
    NonUniformGrid grid = make_variance_grid(v0, cfg.v_max, cfg.density * v0, cfg.m);
    const Coefficients1D coeffs = cir_coefficients(cfg.params);
    const TimeGrid tg(cfg.horizon, cfg.steps);
    MassLog mass;
    EvolveOptions opts;
    opts.autonomous = true;
    opts.observer = mass.observer();
    const DensityField p = crank_nicolson_evolve(
        [&](double tau) { return assemble_1d(grid, coeffs, tau); }, dirac_initial_1d(grid, v0),
        tg, cfg.rannacher_steps, opts);

    const std::size_t j1 = v_low_filter(grid, cfg.coarse_m);
    std::vector<double> exact(grid.size(), 0.0);
    for (std::size_t i = j1; i < grid.size(); ++i) {
        exact[i] = cir_exact_density(cfg.params, grid.node(i), cfg.horizon);
    }
    std::vector<double> numeric(p.values().begin(), p.values().end());
    MixedErrorReport err =
        mixed_error(exact, numeric, 1.0, [j1](std::size_t i) { return i >= j1; });
    err.j1 = j1;
    return {std::move(grid), std::move(numeric), std::move(exact), std::move(err), std::move(mass)};
}

Run2D run_bs2d(const Bs2dConfig& cfg) {
    cfg.params.validate();
    const auto& p = cfg.params;
    NonUniformGrid gx = make_price_grid(p.s1_0, cfg.domain_factor, cfg.density * p.s1_0, cfg.m);
    NonUniformGrid gy = make_price_grid(p.s2_0, cfg.domain_factor, cfg.density * p.s2_0, cfg.m);
    const Coefficients2D coeffs = bs2d_coefficients(p);
    const TimeGrid tg(cfg.horizon, cfg.steps);
    MassLog mass;
    EvolveOptions opts;
    opts.autonomous = true;
    opts.observer = mass.observer();
    const DensityField field =
        hv_evolve([&](double tau) { return assemble_2d(gx, gy, coeffs, tau); },
                  dirac_initial_2d(gx, gy, p.s1_0, p.s2_0), tg, cfg.hv, opts);

    std::vector<double> exact(field.size(), 0.0);
    for (std::size_t j = 0; j < gy.size(); ++j) {
        for (std::size_t i = 0; i < gx.size(); ++i) {
            if (gx.node(i) > 0.0 && gy.node(j) > 0.0) {
                exact[i + gx.size() * j] =
                    bs2d_exact_density(p, gx.node(i), gy.node(j), cfg.horizon);
            }
        }
    }
    std::vector<double> numeric(field.values().begin(), field.values().end());
    MixedErrorReport err = mixed_error(exact, numeric);
    return {std::move(gx), std::move(gy), std::move(numeric), std::move(exact), std::move(err),
            std::move(mass)};
}

Run2D run_heston(const HestonConfig& cfg) {
    const HestonParams& p = cfg.params;
    p.validate();
    NonUniformGrid gx = make_log_grid(p.x0, cfg.half_width, cfg.density_x, cfg.m1);
    NonUniformGrid gv = make_variance_grid(p.v0, cfg.v_max, cfg.density_v * p.v0, cfg.m2);
    const Coefficients2D coeffs = heston_coefficients(p);
    const TimeGrid tg(p.horizon, cfg.steps);
    MassLog mass;
    EvolveOptions opts;
    opts.autonomous = true;
    opts.observer = mass.observer();
    const bool attainable = p.zero_attainable();
    const DensityField field =
        hv_evolve([&](double tau) { return assemble_2d(gx, gv, coeffs, tau, attainable); },
                  dirac_initial_2d(gx, gv, p.x0, p.v0), tg, cfg.hv, opts);
    std::vector<double> numeric(field.values().begin(), field.values().end());
    return {std::move(gx), std::move(gv), std::move(numeric), {}, {}, std::move(mass)};
}

namespace {

// Lagrange weights of the four fine nodes nearest x (clamped at the ends).
std::pair<std::size_t, std::array<double, 4>> lagrange4(const NonUniformGrid& g, double x) {
    const auto nodes = g.nodes();
    const std::size_t m = nodes.size();
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    std::size_t k = static_cast<std::size_t>(it - nodes.begin());
    k = std::clamp<std::size_t>(k, 2, m - 2);
    const std::size_t first = std::min(k - 2, m >= 4 ? m - 4 : 0);
    const std::size_t count = std::min<std::size_t>(4, m);
    std::array<double, 4> w{};
    for (std::size_t a = 0; a < count; ++a) {
        double l = 1.0;
        for (std::size_t b = 0; b < count; ++b) {
            if (a == b) continue;
            l *= (x - nodes[first + b]) / (nodes[first + a] - nodes[first + b]);
        }
        w[a] = l;
    }
    return {first, w};
}

}  // namespace

std::vector<double> interpolate_2d(const NonUniformGrid& fine_x, const NonUniformGrid& fine_y,
                                   std::span<const double> fine, const NonUniformGrid& coarse_x,
                                   const NonUniformGrid& coarse_y) {
    const std::size_t fm1 = fine_x.size();
    if (fine.size() != fm1 * fine_y.size()) throw ArgumentError("interpolate_2d: size mismatch");
    const std::size_t cm1 = coarse_x.size();
    const std::size_t cx = std::min<std::size_t>(4, fm1);
    const std::size_t cy = std::min<std::size_t>(4, fine_y.size());
    std::vector<double> out(cm1 * coarse_y.size(), 0.0);
    std::vector<std::pair<std::size_t, std::array<double, 4>>> wx(cm1);
    for (std::size_t i = 0; i < cm1; ++i) wx[i] = lagrange4(fine_x, coarse_x.node(i));
    for (std::size_t j = 0; j < coarse_y.size(); ++j) {
        const auto [fy, wy] = lagrange4(fine_y, coarse_y.node(j));
        for (std::size_t i = 0; i < cm1; ++i) {
            const auto& [fx, w] = wx[i];
            double acc = 0.0;
            for (std::size_t b = 0; b < cy; ++b) {
                for (std::size_t a = 0; a < cx; ++a) {
                    acc += wy[b] * w[a] * fine[(fx + a) + fm1 * (fy + b)];
                }
            }
            out[i + cm1 * j] = acc;
        }
    }
    return out;
}

MixedErrorReport self_convergence_error(const Run2D& coarse, const Run2D& reference,
                                        std::size_t j1) {
    const std::vector<double> ref = interpolate_2d(reference.grid_x, reference.grid_y,
                                                   reference.numeric, coarse.grid_x,
                                                   coarse.grid_y);
    return mixed_error_2d(ref, coarse.numeric, coarse.grid_x.size(), j1);
}

CalibrateRun run_calibration(const CalibrateConfig& cfg) {
    const SlvParams& p = cfg.params;
    p.validate();
    const LvSurface lv = cfg.lv ? *cfg.lv : SyntheticSmile{0.10, 0.10, 4.0, p.x0}.surface();
    NonUniformGrid gx = make_log_grid(p.x0, cfg.half_width, cfg.density_x, cfg.m1);
    NonUniformGrid gv =
        cfg.v_focus_at_v0
            ? make_pinned_grid(0.0, cfg.v_max, p.v0, cfg.density_v * p.v0, cfg.m2)
            : make_variance_grid(p.v0, cfg.v_max, cfg.density_v * p.v0, cfg.m2);
    const TimeGrid tg(p.horizon, cfg.steps);

    MassLog mass_slv;
    CalibrationOptions opts;
    opts.hv = cfg.hv;
    opts.inner_iterations = cfg.inner_iterations;
    opts.observer = mass_slv.observer();
    CalibrationResult res = calibrate(p, lv, gx, gv, tg, opts);

    MassLog mass_lv;
    const DensityField plv = lv_density_1d(lv, p.r_d, p.r_f, gx, p.x0, tg,
                                           cfg.hv.rannacher_steps, mass_lv.observer());
    std::vector<double> p_lv(plv.values().begin(), plv.values().end());
    std::vector<double> p_slv = marginal_density(res.density, gv);
    MixedErrorReport err = mixed_error(p_lv, p_slv);

    std::vector<ImpliedVolRow> rows;
    for (double k : cfg.strikes) {
        const double strike = k * cfg.s0;
        const double s0 = cfg.s0;
        const double x0 = p.x0;
        // Below the spot the call is deep in the money; its price is taken from
        // the out-of-the-money put through put-call parity so that the discrete
        // forward error cannot push it under the intrinsic bound.
        const bool via_put = strike < s0;
        auto payoff = [strike, s0, x0, via_put](double x) {
            const double s = s0 * std::exp(x - x0);
            return via_put ? std::max(strike - s, 0.0) : std::max(s - strike, 0.0);
        };
        const double parity = via_put ? s0 * std::exp(-p.r_f * p.horizon) -
                                            strike * std::exp(-p.r_d * p.horizon)
                                      : 0.0;
        const double fv_lv = fair_value(p_lv, payoff, p.r_d, p.horizon, gx) + parity;
        const double fv_slv = fair_value(p_slv, payoff, p.r_d, p.horizon, gx) + parity;
        ImpliedVolRow row;
        row.k_over_s0 = k;
        // A price outside the no-arbitrage bounds (possible on coarse grids from
        // small negative tail values) is reported as NaN rather than aborting.
        auto invert = [&](double price) {
            try {
                return implied_vol(price, s0, strike, p.r_d, p.r_f, p.horizon);
            } catch (const InversionError&) {
                return std::numeric_limits<double>::quiet_NaN();
            }
        };
        row.iv_lv = invert(fv_lv);
        row.iv_slv = invert(fv_slv);
        row.eps_imp = std::abs(row.iv_lv - row.iv_slv);
        rows.push_back(row);
    }
    return {std::move(gx),      std::move(gv),       std::move(res.leverage),
            std::move(p_lv),    std::move(p_slv),    std::move(err),
            std::move(rows),    std::move(mass_slv), std::move(mass_lv),
            res.stats};
}

}  // namespace fvslv
