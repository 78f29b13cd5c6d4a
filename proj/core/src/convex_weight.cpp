#include "coag/convex_weight.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coag {

ConvexWeight ConvexWeight::quadratic() {
    ConvexWeight wgt;
    wgt.knot_ = {1.0};
    wgt.sp_ = {2.0};
    wgt.slope_ = {2.0};
    wgt.sigma_at_knot_ = {1.0};
    return wgt;  // extends to exactly x^2 everywhere
}

double ConvexWeight::sigma_prime(double x) const {
    if (x < 0.0) throw std::domain_error("convex weight argument must be >= 0");
    auto it = std::lower_bound(knot_.begin(), knot_.end(), x);
    std::size_t k = static_cast<std::size_t>(it - knot_.begin());
    if (k == knot_.size()) {  // beyond the last knot: final slope continues
        return sp_.back() + slope_.back() * (x - knot_.back());
    }
    double x0 = k == 0 ? 0.0 : knot_[k - 1];
    double s0 = k == 0 ? 0.0 : sp_[k - 1];
    return s0 + slope_[k] * (x - x0);
}

double ConvexWeight::sigma(double x) const {
    if (x < 0.0) throw std::domain_error("convex weight argument must be >= 0");
    auto it = std::lower_bound(knot_.begin(), knot_.end(), x);
    std::size_t k = static_cast<std::size_t>(it - knot_.begin());
    if (k == knot_.size()) {
        double d = x - knot_.back();
        return sigma_at_knot_.back() + sp_.back() * d + 0.5 * slope_.back() * d * d;
    }
    double x0 = k == 0 ? 0.0 : knot_[k - 1];
    double s0 = k == 0 ? 0.0 : sp_[k - 1];
    double base = k == 0 ? 0.0 : sigma_at_knot_[k - 1];
    double d = x - x0;
    return base + s0 * d + 0.5 * slope_[k] * d * d;
}

ConvexWeight build_vallee_poussin(const DistributionState& initial, double beta,
                                  ConvexWeight::Mode mode) {
    if (!initial.grid || initial.values.empty())
        throw std::invalid_argument("convex weight builder needs a non-empty state");
    const auto& x = initial.grid->pivots();
    const auto& w = initial.grid->widths();
    const std::size_t N = initial.values.size();

    // data f against measure mu; the weight certifies integral sigma(f) dmu < inf
    std::vector<double> f(N), mu(N);
    for (std::size_t i = 0; i < N; ++i) {
        if (mode == ConvexWeight::Mode::volume) {
            f[i] = x[i];
            mu[i] = initial.values[i] * w[i];
        } else {
            f[i] = std::pow(x[i], -beta) * initial.values[i];
            mu[i] = w[i];
        }
    }

    double total = 0.0;
    double fmin = 0.0, fmax = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        if (mu[i] <= 0.0 || f[i] <= 0.0) continue;
        total += f[i] * mu[i];
        if (fmin == 0.0 || f[i] < fmin) fmin = f[i];
        fmax = std::max(fmax, f[i]);
    }
    if (!std::isfinite(total))
        throw std::runtime_error("convex weight builder: data integral is not finite");

    ConvexWeight wgt;
    wgt.mode_ = mode;
    wgt.beta_ = beta;
    if (total == 0.0) {
        // nothing to certify; any superlinear convex weight will do
        ConvexWeight q = ConvexWeight::quadratic();
        q.mode_ = mode;
        q.beta_ = beta;
        return q;
    }

    auto tail = [&](double m) {
        double acc = 0.0;
        for (std::size_t i = 0; i < N; ++i)
            if (f[i] > m) acc += f[i] * mu[i];
        return acc;
    };

    // dyadic levels; keep one whenever the tail above it has halved again.
    // Dyadic spacing makes knot gaps non-decreasing, hence sigma' concave.
    int p_lo = static_cast<int>(std::floor(std::log2(fmin)));
    int p_hi = static_cast<int>(std::ceil(std::log2(fmax))) + 1;
    double needed = 0.5 * total;
    for (int p = p_lo; p <= p_hi; ++p) {
        double m = std::ldexp(1.0, p);
        double t = tail(m);
        if (t <= needed) {
            wgt.knot_.push_back(m);
            needed = 0.5 * std::min(t, needed);
            if (t == 0.0) break;
        }
    }
    // the level above fmax always qualifies, so at least one knot exists
    const std::size_t K = wgt.knot_.size();
    wgt.sp_.resize(K);
    wgt.slope_.resize(K);
    wgt.sigma_at_knot_.resize(K);
    double prev_knot = 0.0, prev_sp = 0.0, prev_sigma = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        wgt.sp_[k] = static_cast<double>(k + 1);
        double gap = wgt.knot_[k] - prev_knot;
        wgt.slope_[k] = (wgt.sp_[k] - prev_sp) / gap;
        wgt.sigma_at_knot_[k] = prev_sigma + prev_sp * gap + 0.5 * wgt.slope_[k] * gap * gap;
        prev_knot = wgt.knot_[k];
        prev_sp = wgt.sp_[k];
        prev_sigma = wgt.sigma_at_knot_[k];
    }
    return wgt;
}

}  // namespace coag
