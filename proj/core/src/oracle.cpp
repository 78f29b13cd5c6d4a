#include "coag/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coag/quadrature.hpp"

namespace coag {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Moments discrete_moments(const DistributionState& st) {
    const auto& x = st.grid->pivots();
    const auto& w = st.grid->widths();
    Moments m;
    for (std::size_t i = 0; i < st.values.size(); ++i) {
        double gw = st.values[i] * w[i];
        m.m0 += gw;
        m.m1 += x[i] * gw;
        m.m2 += x[i] * x[i] * gw;
    }
    return m;
}

double rel_error(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}
}  // namespace

double constant_kernel_exact(double zeta, double t) {
    if (t < 0.0) throw std::domain_error("exact solution defined for t >= 0");
    double a = 2.0 / (2.0 + t);
    return a * a * std::exp(-a * zeta);
}

double constant_kernel_exact_residual(double zeta, double t) {
    double a = 2.0 / (2.0 + t);
    // d/dt of a^2 e^(-a z) with a' = -a^2 / 2
    double dgdt = -0.5 * a * a * a * std::exp(-a * zeta) * (2.0 - a * zeta);
    double birth =
        0.5 * integrate([&](double e) { return constant_kernel_exact(zeta - e, t) *
                                               constant_kernel_exact(e, t); },
                        0.0, zeta);
    double death = constant_kernel_exact(zeta, t) *
                   integrate_to_inf([&](double e) { return constant_kernel_exact(e, t); }, 0.0);
    return dgdt - birth + death;
}

Moments moment_ode(KernelClass k, const Moments& initial, double t) {
    if (t < 0.0) throw std::invalid_argument("moment evolution defined for t >= 0");
    Moments m = initial;
    switch (k) {
        case KernelClass::constant:
            m.m0 = 2.0 * initial.m0 / (2.0 + initial.m0 * t);
            m.m2 = initial.m2 + initial.m1 * initial.m1 * t;
            break;
        case KernelClass::additive:
            m.m0 = initial.m0 * std::exp(-initial.m1 * t);
            m.m2 = initial.m2 * std::exp(2.0 * initial.m1 * t);
            break;
        case KernelClass::multiplicative: {
            if (initial.m2 > 0.0 && t >= 1.0 / initial.m2)
                throw GelationBlowup(1.0 / initial.m2,
                                     "second moment blows up at the gelation time");
            m.m0 = initial.m0 - 0.5 * initial.m1 * initial.m1 * t;
            m.m2 = initial.m2 > 0.0 ? initial.m2 / (1.0 - initial.m2 * t) : 0.0;
            break;
        }
    }
    return m;
}

std::optional<double> gelation_time_estimate(const Trajectory& traj, double threshold) {
    if (traj.trunc.theta != 0)
        throw std::invalid_argument("escape loss exists only for non-conservative runs");
    if (threshold < 0.0) throw std::invalid_argument("threshold must be >= 0");
    double target = threshold * traj.moments.front().m1;
    for (std::size_t r = 0; r < traj.moments.size(); ++r) {
        double loss = traj.moments[r].loss;
        if (threshold == 0.0 ? loss > 0.0 : loss > target) {
            if (threshold == 0.0 || r == 0) return traj.moments[r].t;
            const auto& prev = traj.moments[r - 1];
            double span = loss - prev.loss;
            double frac = span > 0.0 ? (target - prev.loss) / span : 1.0;
            return prev.t + frac * (traj.moments[r].t - prev.t);
        }
    }
    return std::nullopt;
}

OracleComparison compare_oracle(const Trajectory& traj, const std::string& oracle_spec) {
    OracleComparison cmp;
    cmp.oracle = oracle_spec;
    Moments init = discrete_moments(traj.snapshots.front());

    if (oracle_spec == "constant-exact") {
        const auto& x = traj.grid->pivots();
        const auto& w = traj.grid->widths();
        for (const auto& st : traj.snapshots) {
            double l1 = 0.0;
            for (std::size_t i = 0; i < st.values.size(); ++i)
                l1 += std::abs(st.values[i] - constant_kernel_exact(x[i], st.time)) * w[i];
            double a = 2.0 / (2.0 + st.time);
            Moments got = discrete_moments(st);
            cmp.rows.push_back({st.time, l1, rel_error(got.m0, a), rel_error(got.m1, 1.0),
                                rel_error(got.m2, 2.0 / a)});
        }
        return cmp;
    }

    KernelClass kc;
    if (oracle_spec == "moments:constant") kc = KernelClass::constant;
    else if (oracle_spec == "moments:additive") kc = KernelClass::additive;
    else if (oracle_spec == "moments:multiplicative") kc = KernelClass::multiplicative;
    else
        throw std::invalid_argument(
            "unknown oracle '" + oracle_spec +
            "'; valid: constant-exact, moments:constant, moments:additive, "
            "moments:multiplicative");

    double gel = kc == KernelClass::multiplicative && init.m2 > 0.0
                     ? 1.0 / init.m2
                     : std::numeric_limits<double>::infinity();
    for (const auto& st : traj.snapshots) {
        OracleComparison::Row row{st.time, kNaN, kNaN, kNaN, kNaN};
        if (st.time < gel * (1.0 - 1e-12)) {
            Moments want = moment_ode(kc, init, st.time);
            Moments got = discrete_moments(st);
            row.m0_rel_error = rel_error(got.m0, want.m0);
            row.m1_rel_error = rel_error(got.m1, want.m1);
            row.m2_rel_error = rel_error(got.m2, want.m2);
        }
        cmp.rows.push_back(row);
    }
    return cmp;
}

OracleComparison compare_trajectories(const Trajectory& traj, const Trajectory& reference) {
    OracleComparison cmp;
    cmp.oracle = "reference";
    for (const auto& st : traj.snapshots) {
        double tol = 1e-9 * std::max(1.0, std::abs(st.time));
        auto it = std::find_if(reference.snapshots.begin(), reference.snapshots.end(),
                               [&](const DistributionState& r) {
                                   return std::abs(r.time - st.time) <= tol;
                               });
        if (it == reference.snapshots.end()) continue;
        Moments got = discrete_moments(st);
        Moments want = discrete_moments(*it);
        cmp.rows.push_back({st.time, l1_distance(st, *it), rel_error(got.m0, want.m0),
                            rel_error(got.m1, want.m1), rel_error(got.m2, want.m2)});
    }
    return cmp;
}

}  // namespace coag
