#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fvslv/csv.hpp"
#include "fvslv/diagnostics.hpp"
#include "fvslv/errors.hpp"
#include "fvslv/experiments.hpp"

namespace fs = std::filesystem;
using namespace fvslv;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr double kDriftWarning = 1e-8;

std::vector<std::size_t> parse_sweep(const std::string& spec) {
    std::vector<std::size_t> parts;
    std::stringstream in(spec);
    std::string tok;
    while (std::getline(in, tok, ':')) {
        try {
            std::size_t used = 0;
            const long v = std::stol(tok, &used);
            if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
            parts.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw ConfigError("bad sweep '" + spec + "', expected start:step:end");
        }
    }
    if (parts.size() != 3 || parts[0] > parts[2]) {
        throw ConfigError("bad sweep '" + spec + "', expected start:step:end");
    }
    std::vector<std::size_t> ms;
    for (std::size_t m = parts[0]; m <= parts[2]; m += parts[1]) ms.push_back(m);
    return ms;
}

void warn_drift(const MassLog& log, const std::string& what) {
    for (std::size_t k = 0; k < log.mass.size(); ++k) {
        const double d = log.mass[k] - 1.0;
        if (std::abs(d) > kDriftWarning) {
            std::cerr << "warning: " << what << ": mass drift " << format_double(d)
                      << " at tau=" << format_double(log.tau[k]) << '\n';
        }
    }
}

void write_density_1d(const fs::path& path, const NonUniformGrid& g,
                      const std::vector<double>& p) {
    CsvWriter out(path, {"x", "p"});
    for (std::size_t i = 0; i < g.size(); ++i) out.row({g.node(i), p[i]});
}

void write_density_2d(const fs::path& path, const NonUniformGrid& gx, const NonUniformGrid& gy,
                      const std::vector<double>& p) {
    CsvWriter out(path, {"x", "v", "p"});
    for (std::size_t j = 0; j < gy.size(); ++j) {
        for (std::size_t i = 0; i < gx.size(); ++i) {
            out.row({gx.node(i), gy.node(j), p[i + gx.size() * j]});
        }
    }
}

void write_convergence(const fs::path& path, const std::vector<std::size_t>& ms,
                       const std::vector<double>& errors) {
    CsvWriter out(path, {"m", "error"});
    for (std::size_t k = 0; k < ms.size(); ++k) out.row({static_cast<double>(ms[k]), errors[k]});
    if (ms.size() >= 3) {
        const std::vector<double> md(ms.begin(), ms.end());
        const OrderFit fit = convergence_order(md, errors);
        std::cout << "fitted order " << std::setprecision(4) << fit.slope
                  << (fit.mixed_regime ? " (mixed regime)" : "") << '\n';
    }
}

struct Common {
    std::size_t n = 0;
    std::size_t rannacher = 2;
    std::string sweep;
    std::optional<double> theta;
};

HvConfig hv_config(const Common& c) {
    HvConfig hv;
    hv.rannacher_steps = c.rannacher;
    if (c.theta) hv.theta = *c.theta;
    return hv;
}

const ParameterSet& set_of_kind(const std::string& name, SetKind kind, const char* what) {
    const ParameterSet& s = find_set(name);
    if (s.kind != kind) throw ConfigError("set " + name + " is not a " + what + " set");
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite volume Kolmogorov solvers and SLV calibration experiments"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string out_dir;
    app.add_option("-o,--out-dir", out_dir, "Directory for CSV artifacts")
        ->envname("FVSLV_OUT_DIR");

    Common common;
    std::size_t m = 200, m1 = 0, m2 = 0, q = 2, ref_m1 = 400;
    std::string set_name;
    std::string lv_file;
    std::optional<double> density, density_v;
    bool v_focus_v0 = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--n", common.n, "Number of time steps")->check(CLI::PositiveNumber);
        sub->add_option("--rannacher", common.rannacher,
                        "Leading steps replaced by implicit Euler half steps");
        sub->add_option("--sweep", common.sweep, "Grid sweep start:step:end");
    };

    auto* bs1d = app.add_subcommand("bs1d", "1D Black-Scholes density against the lognormal");
    bs1d->add_option("--m", m, "Grid points")->check(CLI::Range(3, 1000000));
    bs1d->add_option("--density", density, "Stretch parameter relative to S0");
    auto* cir = app.add_subcommand("cir", "CIR density against the analytic density");
    cir->add_option("--set", set_name, "Parameter set (A or B)")->required();
    cir->add_option("--m", m, "Grid points")->check(CLI::Range(3, 1000000));
    cir->add_option("--density", density, "Stretch parameter relative to V0");
    auto* bs2d = app.add_subcommand("bs2d", "2D Black-Scholes density against the bivariate lognormal");
    bs2d->add_option("--m", m, "Grid points per direction")->check(CLI::Range(3, 100000));
    bs2d->add_option("--theta", common.theta, "HV parameter theta");
    bs2d->add_option("--density", density, "Stretch parameter relative to S0");
    auto* heston = app.add_subcommand("heston", "Heston density; sweeps use self-convergence");
    heston->add_option("--set", set_name, "Parameter set (C or D)")->required();
    heston->add_option("--m1", m1, "Grid points in x (default 2 m2 or 100)");
    heston->add_option("--m2", m2, "Grid points in v (default m1 / 2)");
    heston->add_option("--theta", common.theta, "HV parameter theta");
    heston->add_option("--ref-m1", ref_m1, "Reference grid m1 for sweeps (m2 = m1 / 2)");
    auto* calib = app.add_subcommand("calibrate", "SLV leverage calibration against an LV model");
    calib->add_option("--set", set_name, "Parameter set (E, F or G)")->required();
    calib->add_option("--m1", m1, "Grid points in x")->default_val(400);
    calib->add_option("--m2", m2, "Grid points in v")->default_val(200);
    calib->add_option("--q", q, "Inner iterations per step")->check(CLI::PositiveNumber);
    calib->add_option("--theta", common.theta, "HV parameter theta");
    calib->add_option("--lv-file", lv_file, "Local volatility lattice CSV (tau,x,sigma_lv)");
    calib->add_option("--density-v", density_v, "v-grid stretch parameter relative to V0");
    calib->add_flag("--v-focus-v0", v_focus_v0, "Concentrate the v-grid at V0 instead of 0");
    auto* sets = app.add_subcommand("sets", "List the built-in parameter sets");

    for (CLI::App* sub : {bs1d, cir, bs2d, heston}) add_common(sub);
    calib->add_option("--n", common.n, "Number of time steps (default 200 per unit time)")
        ->check(CLI::PositiveNumber);
    calib->add_option("--rannacher", common.rannacher,
                      "Leading steps replaced by implicit Euler half steps");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    // Step counts default per experiment.
    auto steps_or = [&](CLI::App* sub, std::size_t fallback) {
        return sub->count("--n") > 0 ? common.n : fallback;
    };

    try {
        const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
        if (!sets->parsed()) fs::create_directories(dir);

        if (sets->parsed()) {
            std::cout << "set,kind,kappa,eta,xi,rho,r_d,r_f,x0,v0,T,q\n";
            for (const auto& s : builtin_sets()) {
                const auto& p = s.params;
                const char* kind = s.kind == SetKind::Cir      ? "cir"
                                   : s.kind == SetKind::Heston ? "heston"
                                                               : "calibration";
                std::cout << s.name << ',' << kind << ',' << p.kappa << ',' << p.eta << ','
                          << p.xi << ',' << p.rho << ',' << p.r_d << ',' << p.r_f << ','
                          << p.x0 << ',' << p.v0 << ',' << p.horizon << ','
                          << std::fixed << std::setprecision(2) << p.q()
                          << std::defaultfloat << std::setprecision(6) << '\n';
            }
            return 0;
        }

        if (bs1d->parsed()) {
            Bs1dConfig cfg;
            cfg.steps = steps_or(bs1d, 2000);
            cfg.rannacher_steps = common.rannacher;
            if (density) cfg.density = *density;
            if (!common.sweep.empty()) {
                const auto ms = parse_sweep(common.sweep);
                std::vector<double> errors;
                for (std::size_t mm : ms) {
                    cfg.m = mm;
                    const Run1D r = run_bs1d(cfg);
                    warn_drift(r.mass, "bs1d m=" + std::to_string(mm));
                    errors.push_back(r.error.max_error);
                }
                write_convergence(dir / "bs1d_convergence.csv", ms, errors);
                return 0;
            }
            cfg.m = m;
            const Run1D r = run_bs1d(cfg);
            warn_drift(r.mass, "bs1d");
            write_density_1d(dir / "bs1d_density.csv", r.grid, r.numeric);
            r.mass.write_csv(dir / "bs1d_mass.csv");
            std::cout << "max mixed error " << format_double(r.error.max_error) << ", max mass drift "
                      << format_double(r.mass.max_drift()) << '\n';
            return 0;
        }

        if (cir->parsed()) {
            const ParameterSet& s = set_of_kind(set_name, SetKind::Cir, "CIR");
            CirConfig cfg;
            cfg.params = s.params.variance();
            cfg.horizon = s.params.horizon;
            cfg.steps = steps_or(cir, 2000);
            cfg.rannacher_steps = common.rannacher;
            if (density) cfg.density = *density;
            const std::string tag = "cir_" + s.name;
            if (!common.sweep.empty()) {
                const auto ms = parse_sweep(common.sweep);
                std::vector<double> errors;
                for (std::size_t mm : ms) {
                    cfg.m = mm;
                    const Run1D r = run_cir(cfg);
                    warn_drift(r.mass, tag + " m=" + std::to_string(mm));
                    errors.push_back(r.error.max_error);
                }
                write_convergence(dir / (tag + "_convergence.csv"), ms, errors);
                return 0;
            }
            cfg.m = m;
            const Run1D r = run_cir(cfg);
            warn_drift(r.mass, tag);
            write_density_1d(dir / (tag + "_density.csv"), r.grid, r.numeric);
            r.mass.write_csv(dir / (tag + "_mass.csv"));
            std::cout << "max mixed error " << format_double(r.error.max_error) << " (j1 = "
                      << r.error.j1 << "), max mass drift " << format_double(r.mass.max_drift())
                      << '\n';
            return 0;
        }

        if (bs2d->parsed()) {
            Bs2dConfig cfg;
            cfg.steps = steps_or(bs2d, 200);
            cfg.hv = hv_config(common);
            if (density) cfg.density = *density;
            if (!common.sweep.empty()) {
                const auto ms = parse_sweep(common.sweep);
                std::vector<double> errors;
                for (std::size_t mm : ms) {
                    cfg.m = mm;
                    const Run2D r = run_bs2d(cfg);
                    warn_drift(r.mass, "bs2d m=" + std::to_string(mm));
                    errors.push_back(r.error.max_error);
                }
                write_convergence(dir / "bs2d_convergence.csv", ms, errors);
                return 0;
            }
            cfg.m = m;
            const Run2D r = run_bs2d(cfg);
            warn_drift(r.mass, "bs2d");
            write_density_2d(dir / "bs2d_density.csv", r.grid_x, r.grid_y, r.numeric);
            r.mass.write_csv(dir / "bs2d_mass.csv");
            std::cout << "max mixed error " << format_double(r.error.max_error) << ", max mass drift "
                      << format_double(r.mass.max_drift()) << '\n';
            return 0;
        }

        if (heston->parsed()) {
            const ParameterSet& s = set_of_kind(set_name, SetKind::Heston, "Heston");
            HestonConfig cfg;
            cfg.params = s.params;
            cfg.steps = steps_or(heston, 100);
            cfg.hv = hv_config(common);
            const std::string tag = "heston_" + s.name;
            if (!common.sweep.empty()) {
                const auto ms = parse_sweep(common.sweep);
                HestonConfig ref_cfg = cfg;
                ref_cfg.m1 = ref_m1;
                ref_cfg.m2 = ref_m1 / 2;
                const Run2D ref = run_heston(ref_cfg);
                warn_drift(ref.mass, tag + " reference");
                std::vector<double> errors;
                // v_low comes from the coarsest v-grid of the sweep.
                cfg.m1 = ms.front();
                cfg.m2 = ms.front() / 2;
                const std::size_t coarse_m2 = cfg.m2;
                for (std::size_t mm : ms) {
                    cfg.m1 = mm;
                    cfg.m2 = mm / 2;
                    const Run2D r = run_heston(cfg);
                    warn_drift(r.mass, tag + " m1=" + std::to_string(mm));
                    const std::size_t j1 = v_low_filter(r.grid_y, coarse_m2);
                    errors.push_back(self_convergence_error(r, ref, j1).max_error);
                }
                write_convergence(dir / (tag + "_convergence.csv"), ms, errors);
                return 0;
            }
            if (m1 == 0 && m2 == 0) m1 = 100;
            cfg.m1 = m1 != 0 ? m1 : 2 * m2;
            cfg.m2 = m2 != 0 ? m2 : m1 / 2;
            const Run2D r = run_heston(cfg);
            warn_drift(r.mass, tag);
            write_density_2d(dir / (tag + "_density.csv"), r.grid_x, r.grid_y, r.numeric);
            r.mass.write_csv(dir / (tag + "_mass.csv"));
            std::cout << "max mass drift " << format_double(r.mass.max_drift()) << '\n';
            return 0;
        }

        if (calib->parsed()) {
            const ParameterSet& s = set_of_kind(set_name, SetKind::Calibration, "calibration");
            CalibrateConfig cfg;
            cfg.params = s.params;
            cfg.s0 = s.s0;
            cfg.m1 = m1;
            cfg.m2 = m2;
            cfg.inner_iterations = q;
            cfg.hv = hv_config(common);
            cfg.steps = calib->count("--n") > 0
                            ? common.n
                            : static_cast<std::size_t>(std::lround(200.0 * s.params.horizon));
            if (density_v) cfg.density_v = *density_v;
            cfg.v_focus_at_v0 = v_focus_v0;
            if (!lv_file.empty()) cfg.lv = read_lv_surface_csv(lv_file);
            const CalibrateRun r = run_calibration(cfg);
            const std::string tag = "calibrate_" + s.name;
            warn_drift(r.mass_slv, tag + " slv");
            warn_drift(r.mass_lv, tag + " lv");
            r.leverage.write_csv(dir / (tag + "_leverage.csv"));
            {
                CsvWriter out(dir / (tag + "_marginals.csv"), {"x", "p_lv", "p_slv", "diff"});
                for (std::size_t i = 0; i < r.grid_x.size(); ++i) {
                    out.row({r.grid_x.node(i), r.p_lv[i], r.p_slv[i], r.p_lv[i] - r.p_slv[i]});
                }
            }
            {
                CsvWriter out(dir / (tag + "_implied_vols.csv"),
                              {"k_over_s0", "iv_lv", "iv_slv", "eps_imp"});
                for (const auto& row : r.implied_vols) {
                    out.row({row.k_over_s0, row.iv_lv, row.iv_slv, row.eps_imp});
                }
            }
            r.mass_slv.write_csv(dir / (tag + "_mass.csv"));
            std::cout << "max marginal mixed error " << format_double(r.marginal_error.max_error)
                      << '\n';
            for (const auto& row : r.implied_vols) {
                std::cout << "K/S0 " << row.k_over_s0 << ": iv_lv " << row.iv_lv << ", eps_imp "
                          << row.eps_imp << '\n';
            }
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ArgumentError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kExitSolver;
    }
    return 0;
}
