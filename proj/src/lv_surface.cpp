#include "fvslv/lv_surface.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fvslv/errors.hpp"

namespace fvslv {

LvSurface LvSurface::closed_form(Fn fn, bool time_independent) {
    if (!fn) throw ArgumentError("local volatility function is empty");
    LvSurface s;
    s.fn_ = std::move(fn);
    s.time_independent_ = time_independent;
    return s;
}

namespace {

bool strictly_increasing(const std::vector<double>& v) {
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (!(v[k] > v[k - 1])) return false;
    }
    return true;
}

// Bracketing index k and weight t with position = (1 - t) v[k] + t v[k + 1],
// clamped to the end points.
std::pair<std::size_t, double> bracket(const std::vector<double>& v, double x) {
    if (v.size() == 1 || x <= v.front()) return {0, 0.0};
    if (x >= v.back()) return {v.size() - 2, 1.0};
    const auto it = std::upper_bound(v.begin(), v.end(), x);
    const auto k = static_cast<std::size_t>(it - v.begin()) - 1;
    return {k, (x - v[k]) / (v[k + 1] - v[k])};
}

}  // namespace

LvSurface LvSurface::lattice(std::vector<double> taus, std::vector<double> xs,
                             std::vector<double> values) {
    if (taus.empty() || xs.empty()) throw ConfigError("local volatility lattice is empty");
    if (values.size() != taus.size() * xs.size()) {
        throw ConfigError("local volatility lattice is not rectangular");
    }
    if (!strictly_increasing(taus) || !strictly_increasing(xs)) {
        throw ConfigError("local volatility lattice axes must be strictly increasing");
    }
    for (double v : values) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw ConfigError("local volatility values must be positive and finite");
        }
    }
    LvSurface s;
    s.time_independent_ = taus.size() == 1;
    s.taus_ = std::move(taus);
    s.xs_ = std::move(xs);
    s.values_ = std::move(values);
    return s;
}

double LvSurface::operator()(double x, double tau) const {
    if (fn_) return fn_(x, tau);
    const auto [n, s] = bracket(taus_, tau);
    const auto [i, t] = bracket(xs_, x);
    const std::size_t mx = xs_.size();
    auto at = [&](std::size_t nn, std::size_t ii) {
        nn = std::min(nn, taus_.size() - 1);
        ii = std::min(ii, mx - 1);
        return values_[nn * mx + ii];
    };
    const double lo = (1.0 - t) * at(n, i) + t * at(n, i + 1);
    const double hi = (1.0 - t) * at(n + 1, i) + t * at(n + 1, i + 1);
    return (1.0 - s) * lo + s * hi;
}

double SyntheticSmile::operator()(double x) const {
    const double th = std::tanh(c * (x - center));
    return a + b * th * th;
}

LvSurface SyntheticSmile::surface() const {
    if (!(a > 0.0) || b < 0.0) throw ArgumentError("synthetic smile needs a > 0 and b >= 0");
    const SyntheticSmile self = *this;
    return LvSurface::closed_form([self](double x, double) { return self(x); }, true);
}

LvSurface read_lv_surface_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("local volatility file is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "tau,x,sigma_lv") {
        throw ConfigError("local volatility file must start with header tau,x,sigma_lv");
    }
    std::vector<double> taus;
    std::vector<double> xs;
    std::vector<double> values;
    std::vector<double> current_xs;
    std::size_t line_no = 1;
    auto close_block = [&]() {
        if (taus.size() == 1) {
            xs = current_xs;
        } else if (current_xs != xs) {
            throw ConfigError("local volatility lattice is not rectangular at tau=" +
                              std::to_string(taus.back()));
        }
        current_xs.clear();
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        double f[3];
        for (int k = 0; k < 3; ++k) {
            if (!std::getline(row, cell, ',')) {
                throw ConfigError("line " + std::to_string(line_no) + ": expected 3 fields");
            }
            try {
                std::size_t used = 0;
                f[k] = std::stod(cell, &used);
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ConfigError("line " + std::to_string(line_no) + ": bad number '" + cell +
                                  "'");
            }
        }
        if (std::getline(row, cell, ',')) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 3 fields");
        }
        if (taus.empty() || f[0] != taus.back()) {
            if (!taus.empty()) close_block();
            taus.push_back(f[0]);
        }
        current_xs.push_back(f[1]);
        values.push_back(f[2]);
    }
    if (taus.empty()) throw ConfigError("local volatility file has no data rows");
    close_block();
    return LvSurface::lattice(std::move(taus), std::move(xs), std::move(values));
}

LvSurface read_lv_surface_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open local volatility file " + path);
    return read_lv_surface_csv(in);
}

}  // namespace fvslv
