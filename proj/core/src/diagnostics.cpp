#include "coag/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "coag/kernel.hpp"

namespace coag {

TestFunction TestFunction::one() {
    return {"one", [](double) { return 1.0; }};
}

TestFunction TestFunction::min_with(double q) {
    return {"min_with", [q](double z) { return std::min(z, q); }};
}

TestFunction TestFunction::indicator_above(double q) {
    return {"indicator_above", [q](double z) { return z >= q ? 1.0 : 0.0; }};
}

TestFunction TestFunction::volume_below(double q) {
    return {"volume_below", [q](double z) { return z < q ? z : 0.0; }};
}

double weak_transfer(const TestFunction& omega, const TruncationParams& tp, double zeta,
                     double eta) {
    const double v = zeta + eta;
    const double theta = static_cast<double>(tp.theta);
    double born = v < tp.n ? omega.f(v) : 0.0;
    double dies = (omega.f(zeta) + omega.f(eta)) * (1.0 - theta + (v < tp.n ? theta : 0.0));
    return born - dies;
}

namespace {

// position of t among the snapshots: (index, 0) at a snapshot, otherwise the
// bracketing lower index and the interpolation fraction
std::pair<std::size_t, double> locate_time(const Trajectory& traj, double t,
                                           bool allow_interpolation) {
    double tol = 1e-9 * std::max(1.0, std::abs(t));
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i)
        if (std::abs(traj.snapshots[i].time - t) <= tol) return {i, 0.0};
    if (!allow_interpolation)
        throw std::invalid_argument("diagnostics: time does not match a recorded snapshot");
    if (t < traj.snapshots.front().time || t > traj.snapshots.back().time)
        throw std::invalid_argument("diagnostics: time outside the recorded range");
    std::size_t k = 0;
    while (traj.snapshots[k + 1].time < t) ++k;
    std::cerr << "note: t = " << t << " is not a snapshot time, interpolating between "
              << traj.snapshots[k].time << " and " << traj.snapshots[k + 1].time << '\n';
    double frac = (t - traj.snapshots[k].time) /
                  (traj.snapshots[k + 1].time - traj.snapshots[k].time);
    return {k, frac};
}

DistributionState state_at(const Trajectory& traj, std::size_t k, double frac) {
    if (frac == 0.0) return traj.snapshots[k];
    const auto& a = traj.snapshots[k];
    const auto& b = traj.snapshots[k + 1];
    DistributionState st;
    st.grid = a.grid;
    st.time = a.time + frac * (b.time - a.time);
    st.values.resize(a.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i)
        st.values[i] = a.values[i] + frac * (b.values[i] - a.values[i]);
    return st;
}

// 1/2 sum over ordered pivot pairs of h(z, e, z+e) psi_n^theta(z, e) g g w w.
template <class H>
double half_pair_sum(const Trajectory& traj, const DistributionState& state, H&& h) {
    const auto& x = state.grid->pivots();
    const auto& w = state.grid->widths();
    const auto& g = state.values;
    const std::size_t N = g.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        if (g[i] == 0.0) continue;
        double gi = g[i] * w[i];
        for (std::size_t j = 0; j < N; ++j) {
            if (g[j] == 0.0) continue;
            double hv = h(x[i], x[j], x[i] + x[j]);
            if (hv == 0.0) continue;
            acc += 0.5 * hv * eval_truncated(traj.kernel, traj.trunc, x[i], x[j]) * gi *
                   g[j] * w[j];
        }
    }
    return acc;
}

// trapezoid over snapshots 0..last plus, when frac > 0, a partial interval
// closed with the linearly interpolated integrand
double trapezoid(const Trajectory& traj, std::size_t last, double frac,
                 const std::vector<double>& vals) {
    double acc = 0.0;
    for (std::size_t s = 0; s < last; ++s) {
        double dt = traj.snapshots[s + 1].time - traj.snapshots[s].time;
        acc += 0.5 * (vals[s] + vals[s + 1]) * dt;
    }
    if (frac > 0.0) {
        double dt = frac * (traj.snapshots[last + 1].time - traj.snapshots[last].time);
        double end = vals[last] + frac * (vals[last + 1] - vals[last]);
        acc += 0.5 * (vals[last] + end) * dt;
    }
    return acc;
}

double discretization_estimate(const Trajectory& traj, std::size_t last, double frac,
                               double scale) {
    double t_end = frac == 0.0
                       ? traj.snapshots[last].time
                       : traj.snapshots[last].time +
                             frac * (traj.snapshots[last + 1].time - traj.snapshots[last].time);
    double span = t_end - traj.snapshots.front().time;
    double intervals = static_cast<double>(last) + frac;
    double mean_dt = intervals > 0.0 ? span / intervals : 0.0;
    return (traj.grid->ratio() - 1.0 + mean_dt) * scale;
}

double weighted_sum(const DistributionState& state, const std::function<double(double)>& f) {
    const auto& x = state.grid->pivots();
    const auto& w = state.grid->widths();
    double acc = 0.0;
    for (std::size_t i = 0; i < state.values.size(); ++i)
        acc += f(x[i]) * state.values[i] * w[i];
    return acc;
}

// lhs and rhs of the weak formulation up to t = snapshot last + frac:
// moment change against omega versus the time integral of the pair transfer
IdentityCheck weak_eval(const Trajectory& traj, const TestFunction& omega, std::size_t last,
                        double frac) {
    if (!omega.f) throw std::invalid_argument("weak form needs a test function");
    std::size_t top = frac > 0.0 ? last + 1 : last;
    std::vector<double> vals(top + 1);
    for (std::size_t s = 0; s <= top; ++s)
        vals[s] = half_pair_sum(traj, traj.snapshots[s], [&](double z, double e, double) {
            return weak_transfer(omega, traj.trunc, z, e);
        });
    DistributionState end = state_at(traj, last, frac);

    IdentityCheck chk;
    auto abs_omega = [&](double z) { return std::abs(omega.f(z)); };
    chk.lhs = weighted_sum(end, omega.f) - weighted_sum(traj.snapshots.front(), omega.f);
    chk.rhs = trapezoid(traj, last, frac, vals);
    chk.residual = std::abs(chk.lhs - chk.rhs);
    chk.scale = std::max({weighted_sum(traj.snapshots.front(), abs_omega),
                          weighted_sum(end, abs_omega), std::abs(chk.rhs), 1e-300});
    chk.error_estimate = discretization_estimate(traj, last, frac, chk.scale);
    return chk;
}

}  // namespace

IdentityCheck mass_balance_finite_q(const Trajectory& traj, double q, double t) {
    if (!(q > 0.0)) throw std::invalid_argument("mass balance cutoff q must be positive");
    auto [last, frac] = locate_time(traj, t, true);
    IdentityCheck chk = weak_eval(traj, TestFunction::volume_below(q), last, frac);
    chk.sign_ok = chk.lhs <= 1e-12 * chk.scale;
    return chk;
}

IdentityCheck weak_form_residual(const Trajectory& traj, const TestFunction& omega, double t) {
    auto [last, frac] = locate_time(traj, t, false);
    return weak_eval(traj, omega, last, frac);
}

TailCheck tail_identity(const Trajectory& traj, double q, double t) {
    if (!(q > 0.0)) throw std::invalid_argument("tail cutoff q must be positive");
    auto [last, frac] = locate_time(traj, t, true);
    IdentityCheck weak = weak_eval(traj, TestFunction::indicator_above(q), last, frac);

    // both tail double integrals over ordered pairs, without the 1/2: pairs
    // whose merger crosses q from below minus pairs already entirely above q
    std::size_t top = frac > 0.0 ? last + 1 : last;
    std::vector<double> vals(top + 1);
    for (std::size_t s = 0; s <= top; ++s)
        vals[s] = 2.0 * half_pair_sum(traj, traj.snapshots[s],
                                      [q](double z, double e, double v) {
                                          if (z < q && e < q && v >= q) return 1.0;
                                          if (z >= q && e >= q) return -1.0;
                                          return 0.0;
                                      });

    TailCheck chk;
    chk.lhs = weak.lhs;
    chk.rhs = weak.rhs;
    chk.residual = weak.residual;
    chk.scale = weak.scale;
    chk.error_estimate = weak.error_estimate;
    chk.bracket_scaled = q * trapezoid(traj, last, frac, vals);
    return chk;
}

ModulusResult equicontinuity_modulus(const Trajectory& traj, double lambda) {
    if (traj.snapshots.size() < 2)
        throw std::invalid_argument("equicontinuity modulus needs at least two snapshots");
    if (!(lambda > 1.0) || !(lambda < traj.trunc.n))
        throw std::invalid_argument("equicontinuity modulus needs 1 < lambda < n");
    const double beta = traj.kernel.beta();
    const auto& x = traj.grid->pivots();
    const auto& w = traj.grid->widths();

    ModulusResult res;
    for (std::size_t s = 0; s + 1 < traj.snapshots.size(); ++s) {
        const auto& a = traj.snapshots[s];
        const auto& b = traj.snapshots[s + 1];
        double dt = b.time - a.time;
        if (dt <= 0.0) continue;
        double acc = 0.0;  // cells with pivot below lambda (midpoint quadrature)
        for (std::size_t i = 0; i < x.size() && x[i] < lambda; ++i)
            acc += std::pow(x[i], -beta) * std::abs(b.values[i] - a.values[i]) * w[i];
        double quotient = acc / dt;
        if (quotient > res.max_quotient) {
            res.max_quotient = quotient;
            res.argmax_interval = {a.time, b.time};
        }
    }
    double k = traj.kernel.k_bound();
    double B = traj.moments.front().m_neg2b + traj.moments.front().m1;
    res.bound = k * B * B *
                (2.0 + 2.0 * std::pow(lambda, 1.0 + beta) + std::pow(lambda, 1.0 + 2.0 * beta)) *
                std::pow(lambda, beta);
    res.pass = res.max_quotient <= res.bound;
    return res;
}

BoundReport check_apriori_bounds(const Trajectory& traj, const ConvexWeight& sigma1,
                                 const ConvexWeight& sigma2, double lambda, double tol) {
    if (sigma2.mode() != ConvexWeight::Mode::singular || sigma2.beta() != traj.kernel.beta())
        throw std::invalid_argument(
            "a priori bounds need sigma2 built in singular mode with the run's beta");
    const double beta = traj.kernel.beta();
    const double k = traj.kernel.k_bound();
    const auto& x = traj.grid->pivots();
    const auto& w = traj.grid->widths();

    BoundReport rep;
    rep.lambda = lambda;
    rep.T = traj.moments.back().t;
    rep.tol = tol;
    rep.B = traj.moments.front().m_neg2b + traj.moments.front().m1;

    auto sigma1_integral = [&](const DistributionState& st) {
        double acc = 0.0;
        for (std::size_t i = 0; i < st.values.size(); ++i)
            acc += sigma1.sigma(x[i]) * st.values[i] * w[i];
        return acc;
    };
    // integral over (0, cut) of sigma2(z^-beta g(z)) dz
    auto sigma2_integral = [&](const DistributionState& st, double cut) {
        double acc = 0.0;
        for (std::size_t i = 0; i < st.values.size() && x[i] < cut; ++i)
            acc += sigma2.sigma(std::pow(x[i], -beta) * st.values[i]) * w[i];
        return acc;
    };

    const auto& init = traj.snapshots.front();
    rep.I1 = sigma1_integral(init);
    rep.I2 = sigma2_integral(init, traj.grid->max_volume() * 2.0);
    rep.Gamma_T =
        (rep.I1 + (sigma1.sigma_second_at_0() + sigma1.sigma(1.0)) * rep.B) *
        std::exp(4.0 * k * rep.B * rep.T);
    rep.L1_lambda_T =
        rep.I2 * std::exp(2.0 * k * std::pow(lambda, 1.0 + 2.0 * beta) * rep.B * rep.T);
    ModulusResult mod = equicontinuity_modulus(traj, lambda);
    rep.L2_lambda = mod.bound;
    rep.observed_modulus = mod.max_quotient;

    for (const auto& st : traj.snapshots) {
        rep.observed_sigma1 = std::max(rep.observed_sigma1, sigma1_integral(st));
        rep.observed_sigma2 = std::max(rep.observed_sigma2, sigma2_integral(st, lambda));
    }
    for (const auto& row : traj.moments)
        rep.observed_B = std::max(rep.observed_B, row.m_neg2b + row.m1);

    rep.pass_sigma1 = rep.observed_sigma1 <= rep.Gamma_T * (1.0 + tol);
    rep.pass_sigma2 = rep.observed_sigma2 <= rep.L1_lambda_T * (1.0 + tol);
    rep.pass_B = rep.observed_B <= rep.B * (1.0 + tol);
    rep.pass_modulus = rep.observed_modulus <= rep.L2_lambda * (1.0 + tol);
    rep.all_pass = rep.pass_sigma1 && rep.pass_sigma2 && rep.pass_B && rep.pass_modulus;
    return rep;
}

}  // namespace coag
