#include "coag/initial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "coag/quadrature.hpp"

namespace coag {

InitialDensity InitialDensity::exponential(double amplitude, double rate) {
    if (amplitude < 0.0) throw std::invalid_argument("exponential density needs amplitude >= 0");
    if (!(rate > 0.0)) throw std::invalid_argument("exponential density needs rate > 0");
    InitialDensity d(Kind::exponential);
    d.p1_ = amplitude;
    d.p2_ = rate;
    return d;
}

InitialDensity InitialDensity::constant(double value) {
    if (value < 0.0) throw std::invalid_argument("constant density must be non-negative");
    InitialDensity d(Kind::constant);
    d.p1_ = value;
    return d;
}

InitialDensity InitialDensity::tabulated(std::vector<std::pair<double, double>> samples) {
    if (samples.size() < 2) throw std::invalid_argument("tabulated density needs >= 2 samples");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!(samples[i].first > 0.0))
            throw std::invalid_argument("tabulated volumes must be positive");
        if (samples[i].second < 0.0)
            throw std::invalid_argument("tabulated density values must be non-negative");
        if (i > 0 && !(samples[i].first > samples[i - 1].first))
            throw std::invalid_argument("tabulated volumes must be strictly increasing");
    }
    InitialDensity d(Kind::tabulated);
    d.samples_ = std::move(samples);
    return d;
}

double InitialDensity::value(double zeta) const {
    if (!(zeta > 0.0)) throw std::domain_error("density argument must be positive");
    switch (kind_) {
        case Kind::exponential:
            return p1_ * std::exp(-p2_ * zeta);
        case Kind::constant:
            return p1_;
        case Kind::tabulated: {
            if (zeta < samples_.front().first || zeta > samples_.back().first) return 0.0;
            auto it = std::lower_bound(samples_.begin(), samples_.end(), zeta,
                                       [](const auto& s, double z) { return s.first < z; });
            if (it == samples_.begin()) return it->second;
            auto hi = it, lo = it - 1;
            if (hi->first == zeta) return hi->second;
            double t = std::log(zeta / lo->first) / std::log(hi->first / lo->first);
            // log-linear; fall back to linear across zero samples
            if (lo->second > 0.0 && hi->second > 0.0)
                return lo->second * std::exp(t * std::log(hi->second / lo->second));
            return lo->second + t * (hi->second - lo->second);
        }
    }
    return 0.0;
}

double InitialDensity::integral(double a, double b) const {
    if (!(b >= a)) throw std::invalid_argument("integral needs b >= a");
    if (a == b) return 0.0;
    switch (kind_) {
        case Kind::exponential:
            if (std::isinf(b)) return p1_ / p2_ * std::exp(-p2_ * a);
            return p1_ / p2_ * (std::exp(-p2_ * a) - std::exp(-p2_ * b));
        case Kind::constant:
            if (std::isinf(b))
                return p1_ == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
            return p1_ * (b - a);
        case Kind::tabulated: {
            double lo = std::max(a, samples_.front().first);
            double hi = std::min(b, samples_.back().first);
            if (!(hi > lo)) return 0.0;
            return integrate([this](double z) { return value(z); }, lo, hi, 1e-10);
        }
    }
    return 0.0;
}

double InitialDensity::mass_integral(double a, double b) const {
    if (!(b >= a)) throw std::invalid_argument("mass_integral needs b >= a");
    if (a == b) return 0.0;
    switch (kind_) {
        case Kind::exponential: {
            // integral z a e^{-rz} = a e^{-rz} (z/r + 1/r^2) between bounds
            auto anti = [&](double z) {
                return -p1_ * std::exp(-p2_ * z) * (z / p2_ + 1.0 / (p2_ * p2_));
            };
            double upper = std::isinf(b) ? 0.0 : anti(b);
            return upper - anti(a);
        }
        case Kind::constant:
            if (p1_ == 0.0) return 0.0;
            if (std::isinf(b)) return std::numeric_limits<double>::infinity();
            return p1_ * 0.5 * (b * b - a * a);
        case Kind::tabulated: {
            double lo = std::max(a, samples_.front().first);
            double hi = std::min(b, samples_.back().first);
            if (!(hi > lo)) return 0.0;
            return integrate([this](double z) { return z * value(z); }, lo, hi, 1e-10);
        }
    }
    return 0.0;
}

bool InitialDensity::singular_moment_finite(double two_beta) const {
    switch (kind_) {
        case Kind::exponential:
            return p1_ == 0.0 || two_beta < 1.0;
        case Kind::constant:
            return p1_ == 0.0 || two_beta < 1.0;
        case Kind::tabulated:
            return true;  // support bounded away from zero
    }
    return true;
}

DistributionState project_initial(const InitialDensity& f, std::shared_ptr<const Grid> grid) {
    if (!grid) throw std::invalid_argument("project_initial needs a grid");
    DistributionState s;
    s.grid = grid;
    s.time = 0.0;
    s.values.resize(grid->cells());
    const auto& e = grid->edges();
    for (std::size_t i = 0; i < grid->cells(); ++i) {
        double cell = f.integral(e[i], e[i + 1]);
        if (!(cell >= 0.0) || !std::isfinite(cell))
            throw std::runtime_error("initial density integrates negative or non-finite on cell " +
                                     std::to_string(i));
        s.values[i] = cell / grid->widths()[i];
    }
    return s;
}

}  // namespace coag
