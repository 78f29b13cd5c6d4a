#include "coag/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace coag {

Kernel Kernel::smoluchowski() {
    // regime ratios peak at the (1,1) corner: 2(ze)^1/3 + z^2/3 + e^2/3 -> 4
    Kernel k(Family::smoluchowski, "smoluchowski", 1.0 / 3.0, 4.0, true);
    return k;
}

Kernel Kernel::granulation(double t1, double t2) {
    if (t1 > 1.0) throw std::invalid_argument("granulation kernel requires t1 <= 1");
    if (t2 < 0.0) throw std::invalid_argument("granulation kernel requires t2 >= 0");
    // t1 >= 0: (z+e)^t1 <= 2^t1 on (0,1)^2, so beta = t2 works;
    // t1 <  0: (z+e)^t1 <= 2^t1 (z e)^(t1/2) sharpens the singularity instead
    double beta = t1 < 0.0 ? t2 - 0.5 * t1 : t2;
    if (beta <= 0.0) beta = 0.5;  // kernel bounded near 0, any exponent envelopes it
    Kernel k(Family::granulation, "granulation", beta, 2.0, true);
    k.p1_ = t1;
    k.p2_ = t2;
    k.params_ = {{"t1", t1}, {"t2", t2}};
    return k;
}

Kernel Kernel::product(double beta) {
    if (beta <= 0.0) throw std::invalid_argument("product kernel requires beta > 0");
    Kernel k(Family::product, "product", beta, 1.0, true);
    k.p1_ = beta;
    k.params_ = {{"beta", beta}};
    return k;
}

Kernel Kernel::constant(double value) {
    if (value < 0.0) throw std::invalid_argument("constant kernel must be non-negative");
    Kernel k(Family::constant, "constant", 1.0 / 3.0, value > 1.0 ? value : 1.0, true);
    k.p1_ = value;
    k.params_ = {{"value", value}};
    return k;
}

Kernel Kernel::additive() {
    return Kernel(Family::additive, "additive", 1.0 / 3.0, 2.0, true);
}

Kernel Kernel::multiplicative() {
    // z*e / (z+e) is unbounded on (1,inf)^2: no k satisfies the growth bound
    return Kernel(Family::multiplicative, "multiplicative", 1.0 / 3.0, 1.0, false);
}

Kernel Kernel::custom(std::string name, std::function<double(double, double)> fn,
                      double beta, double k_bound, bool growth_ok) {
    Kernel k(Family::custom, std::move(name), beta, k_bound, growth_ok);
    k.custom_fn_ = std::move(fn);
    return k;
}

Kernel Kernel::from_config(const std::string& name, const std::map<std::string, double>& params) {
    auto get = [&](const char* key, double fallback) {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    };
    if (name == "smoluchowski") return smoluchowski();
    if (name == "granulation") return granulation(get("t1", 1.0), get("t2", 0.5));
    if (name == "product") return product(get("beta", 1.0 / 3.0));
    if (name == "constant") return constant(get("value", 1.0));
    if (name == "additive") return additive();
    if (name == "multiplicative") return multiplicative();
    throw std::invalid_argument("unknown kernel '" + name +
                                "' (known: smoluchowski, granulation, product, constant, "
                                "additive, multiplicative)");
}

double Kernel::operator()(double zeta, double eta) const {
    if (!(zeta > 0.0) || !(eta > 0.0))
        throw std::domain_error("kernel arguments must be positive volumes");
    switch (family_) {
        case Family::constant:
            return p1_;
        case Family::additive:
            return zeta + eta;
        case Family::multiplicative:
            return zeta * eta;
        case Family::smoluchowski: {
            double cz = std::cbrt(zeta), ce = std::cbrt(eta);
            return (cz + ce) * (1.0 / cz + 1.0 / ce);
        }
        case Family::granulation:
            return std::pow(zeta + eta, p1_) / std::pow(zeta * eta, p2_);
        case Family::product:
            return std::pow(zeta * eta, -p1_);
        case Family::custom:
            return custom_fn_(zeta, eta);
    }
    return 0.0;
}

double eval_truncated(const Kernel& k, const TruncationParams& tp, double zeta, double eta) {
    if (!(tp.n > 1.0)) throw std::invalid_argument("truncation level n must exceed 1");
    if (tp.theta != 0 && tp.theta != 1) throw std::invalid_argument("theta must be 0 or 1");
    double inv_n = 1.0 / tp.n;
    if (!(zeta > inv_n && zeta < tp.n && eta > inv_n && eta < tp.n)) return 0.0;
    if (tp.theta == 1 && !(zeta + eta < tp.n)) return 0.0;
    return k(zeta, eta);
}

HypothesisReport verify_hypotheses(const Kernel& k, const SampleSpec& spec) {
    if (spec.points < 2 || !(spec.min > 0.0) || !(spec.max > spec.min))
        throw std::invalid_argument("sample spec needs min > 0, max > min, points >= 2");

    std::vector<double> s(spec.points);
    double lr = std::log(spec.max / spec.min) / (spec.points - 1);
    for (int i = 0; i < spec.points; ++i) s[i] = spec.min * std::exp(i * lr);

    HypothesisReport rep;
    rep.symmetric = true;
    rep.nonnegative = true;
    rep.minimal_sampled_k = 0.0;

    for (int a = 0; a < spec.points; ++a) {
        for (int b = a; b < spec.points; ++b) {
            double z = s[a], e = s[b];
            double v1 = k(z, e), v2 = k(e, z);
            if (v1 < 0.0 || v2 < 0.0) rep.nonnegative = false;
            double mag = std::max(std::abs(v1), std::abs(v2));
            if (std::abs(v1 - v2) > 1e-12 * (mag > 1.0 ? mag : 1.0)) rep.symmetric = false;

            // regime bound with unit k; the boundary z == 1 counts as large
            double bound;
            bool z_small = z < 1.0, e_small = e < 1.0;
            if (z_small && e_small)
                bound = std::pow(z * e, -k.beta());
            else if (!z_small && !e_small)
                bound = z + e;
            else if (z_small)
                bound = e * std::pow(z, -k.beta());
            else
                bound = z * std::pow(e, -k.beta());

            double ratio = v1 / bound;
            if (ratio > rep.minimal_sampled_k) {
                rep.minimal_sampled_k = ratio;
                rep.worst_pair = {z, e};
            }
        }
    }
    rep.envelope_holds = rep.minimal_sampled_k <= k.k_bound() * (1.0 + 1e-12);
    return rep;
}

}  // namespace coag
