#ifndef COAG_DIAGNOSTICS_HPP
#define COAG_DIAGNOSTICS_HPP

#include <array>
#include <functional>
#include <string>

#include "coag/convex_weight.hpp"
#include "coag/solver.hpp"

namespace coag {

// Bounded test function for the weak formulation.
struct TestFunction {
    std::string name;
    std::function<double(double)> f;

    static TestFunction one();
    static TestFunction min_with(double q);         // min(z, q)
    static TestFunction indicator_above(double q);  // 1 on [q, inf)
    static TestFunction volume_below(double q);     // z on (0, q), else 0
};

// The pair transfer of the truncated weak form,
//   H(z, e) = omega(z+e) 1{z+e<n} - (omega(z) + omega(e)) (1-theta+theta 1{z+e<n}).
// For omega = z 1{z<q} and n much larger than q this reproduces the classical
// sign table: 0 when z+e < q, -(z+e) when z+e >= q with both parts below q,
// -z (resp. -e) when only z (resp. e) is below q, 0 when both are above.
double weak_transfer(const TestFunction& omega, const TruncationParams& tp, double zeta,
                     double eta);

// All identities below are evaluated on the recorded trajectory with the
// run's own truncated kernel at pivot pairs (midpoint quadrature) and the
// trapezoid rule over snapshot times. weak_form_residual requires `t` to
// match a snapshot time; the two named identities accept any t inside the
// recorded range and interpolate linearly between snapshots, noting this on
// stderr. error_estimate is the advertised O(h + dt) discretization scale
// (ratio - 1 + mean snapshot spacing) * scale; residuals are reported raw.

struct IdentityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;  // |lhs - rhs|
    double scale = 1.0;     // natural size of the identity
    double error_estimate = 0.0;
    bool sign_ok = true;
};

// Finite-q mass balance: mass below q at time t minus its initial value
// equals minus the time-integrated mass flux past q. sign_ok reports
// lhs <= 1e-12 * scale (the flux integrand is non-negative).
IdentityCheck mass_balance_finite_q(const Trajectory& traj, double q, double t);

struct TailCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    double scale = 1.0;
    double error_estimate = 0.0;
    // q times the time integral of (crossing-pairs double integral minus
    // both-above-q double integral), ordered pairs without the 1/2; tends to
    // 0 as q grows when the data stays uniformly integrable
    double bracket_scaled = 0.0;
};

// Particle count on [q, inf): gains from pairs merging across q minus losses
// from pairs with both partners already above q.
TailCheck tail_identity(const Trajectory& traj, double q, double t);

// | integral (g(t) - g_in) omega  -  1/2 int_0^t sum H_omega psi_n g g |
// with H_omega(z,e) = omega(z+e) 1{z+e<n} - (omega(z)+omega(e)) (1-theta+theta 1{z+e<n}).
IdentityCheck weak_form_residual(const Trajectory& traj, const TestFunction& omega, double t);

struct ModulusResult {
    double max_quotient = 0.0;  // max over consecutive snapshots of
                                // int_0^lambda z^-beta |g(t2)-g(t1)| dz / (t2-t1)
    double bound = 0.0;         // L2(lambda) = k B^2 (2 + 2 l^(1+b) + l^(1+2b)) l^b
    bool pass = false;
    std::array<double, 2> argmax_interval{};
};

// Requires at least two snapshots and 1 < lambda < n.
ModulusResult equicontinuity_modulus(const Trajectory& traj, double lambda);

struct BoundReport {
    double I1 = 0.0;        // integral sigma1(z) g_in
    double I2 = 0.0;        // integral sigma2(z^-beta g_in)
    double B = 0.0;         // M_{-2beta}(0) + M_1(0)
    double Gamma_T = 0.0;   // [I1 + (sigma1''(0) + sigma1(1)) B] exp(4 k B T)
    double L1_lambda_T = 0.0;  // I2 exp(2 k lambda^(1+2beta) B T)
    double L2_lambda = 0.0;
    double observed_sigma1 = 0.0;  // sup_t integral sigma1(z) g(t)
    double observed_sigma2 = 0.0;  // sup_t integral_0^lambda sigma2(z^-beta g(t))
    double observed_B = 0.0;       // sup_t (M_{-2beta} + M_1)(t)
    double observed_modulus = 0.0;
    bool pass_sigma1 = false;
    bool pass_sigma2 = false;
    bool pass_B = false;
    bool pass_modulus = false;
    bool all_pass = false;
    double lambda = 0.0, T = 0.0, tol = 0.0;
};

// Explicit-constant a priori bounds over the whole recorded trajectory.
// sigma2 must have been built in singular mode with the trajectory's beta;
// a mismatch throws std::invalid_argument. Pass means
// observed <= constant * (1 + tol).
BoundReport check_apriori_bounds(const Trajectory& traj, const ConvexWeight& sigma1,
                                 const ConvexWeight& sigma2, double lambda,
                                 double tol = 1e-6);

}  // namespace coag

#endif
