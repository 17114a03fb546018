#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace fvslv {

/// Local volatility sigma_lv(x, tau), either closed form or a rectangular
/// lattice interpolated bilinearly and held flat beyond its hull.
class LvSurface {
public:
    using Fn = std::function<double(double x, double tau)>;

    static LvSurface closed_form(Fn fn, bool time_independent = false);
    /// values are tau-major: values[n * xs.size() + i] = sigma(xs[i], taus[n]).
    static LvSurface lattice(std::vector<double> taus, std::vector<double> xs,
                             std::vector<double> values);

    double operator()(double x, double tau) const;
    bool time_independent() const { return time_independent_; }

    bool is_lattice() const { return !fn_; }
    const std::vector<double>& taus() const { return taus_; }
    const std::vector<double>& xs() const { return xs_; }
    const std::vector<double>& values() const { return values_; }

private:
    LvSurface() = default;

    Fn fn_;
    bool time_independent_ = false;
    std::vector<double> taus_;
    std::vector<double> xs_;
    std::vector<double> values_;
};

/// sigma(x) = a + b tanh(c (x - center))^2, constant in time.
struct SyntheticSmile {
    double a = 0.10;
    double b = 0.10;
    double c = 4.0;
    double center = 0.0;

    double operator()(double x) const;
    LvSurface surface() const;
};

/// Parses CSV with header `tau,x,sigma_lv`, tau-major over a rectangular
/// lattice. Throws ConfigError on malformed, non-rectangular or non-positive input.
LvSurface read_lv_surface_csv(std::istream& in);
LvSurface read_lv_surface_csv(const std::string& path);

}  // namespace fvslv
