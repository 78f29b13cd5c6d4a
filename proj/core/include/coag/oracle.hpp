#ifndef COAG_ORACLE_HPP
#define COAG_ORACLE_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coag/solver.hpp"

namespace coag {

// Exact solution of the untruncated equation for psi == 1 and g_in = e^-z:
// g(z,t) = a(t)^2 exp(-a(t) z) with a(t) = 2 / (2 + t). Negative t throws
// std::domain_error.
double constant_kernel_exact(double zeta, double t);

// Pointwise residual dg/dt - birth + death of the exact solution, birth and
// death evaluated by adaptive quadrature; analytically zero, numerically
// below 1e-10 for moderate (zeta, t).
double constant_kernel_exact_residual(double zeta, double t);

enum class KernelClass { constant, additive, multiplicative };

struct Moments {
    double m0 = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;
};

struct GelationBlowup : std::runtime_error {
    GelationBlowup(double tg, const std::string& what) : std::runtime_error(what), gel_time(tg) {}
    double gel_time;
};

// Closed-form moment evolution of the untruncated equation:
//   constant        m0(t) = 2 m0 / (2 + m0 t),  m2(t) = m2 + m1^2 t
//   additive        m0(t) = m0 exp(-m1 t),      m2(t) = m2 exp(2 m1 t)
//   multiplicative  m2(t) = m2 / (1 - m2 t) pre-gel, m0(t) = m0 - m1^2 t / 2
// m1 is constant in every class. The multiplicative class throws
// GelationBlowup carrying T_g = 1/m2(0) when t >= T_g.
Moments moment_ode(KernelClass k, const Moments& initial, double t);

// First time the cumulative escape loss exceeds threshold * M1(0), linearly
// interpolated between recorded steps; threshold 0 returns the first step
// with any positive loss. std::nullopt when never crossed. Conservative
// trajectories (theta = 1) throw std::invalid_argument.
std::optional<double> gelation_time_estimate(const Trajectory& traj, double threshold);

struct OracleComparison {
    struct Row {
        double t;
        double l1_density_error;  // NaN when no density oracle exists
        double m0_rel_error;
        double m1_rel_error;
        double m2_rel_error;  // NaN when the oracle moment is not defined
    };
    std::string oracle;
    std::vector<Row> rows;
};

// Error norms of a trajectory against a closed-form oracle ("constant-exact",
// "moments:constant", "moments:additive", "moments:multiplicative") or a
// reference trajectory; rows at the common snapshot times. Unknown oracle
// names throw std::invalid_argument listing the valid ones.
OracleComparison compare_oracle(const Trajectory& traj, const std::string& oracle_spec);
OracleComparison compare_trajectories(const Trajectory& traj, const Trajectory& reference);

}  // namespace coag

#endif
