#ifndef COAG_KERNEL_HPP
#define COAG_KERNEL_HPP

#include <array>
#include <functional>
#include <map>
#include <string>

namespace coag {

// Symmetric coagulation rate kernels psi(zeta, eta) on (0,inf)^2, each with a
// declared singularity exponent beta > 0 and envelope constant k such that
//   psi <= k (zeta*eta)^-beta        on (0,1)^2
//   psi <= k eta * zeta^-beta        on (0,1) x (1,inf)
//   psi <= k (zeta + eta)            on (1,inf)^2
// The multiplicative kernel zeta*eta violates the linear growth bound and is
// flagged; it is kept for gelation cross-checks only.
class Kernel {
public:
    // (zeta^1/3 + eta^1/3)(zeta^-1/3 + eta^-1/3), beta = 1/3, k = 4
    static Kernel smoluchowski();
    // (zeta+eta)^t1 / (zeta*eta)^t2 with t1 <= 1, t2 >= 0
    static Kernel granulation(double t1, double t2);
    // (zeta*eta)^-beta
    static Kernel product(double beta);
    static Kernel constant(double value = 1.0);
    static Kernel additive();
    static Kernel multiplicative();
    // escape hatch for tests; fn need not be symmetric
    static Kernel custom(std::string name, std::function<double(double, double)> fn,
                         double beta, double k_bound, bool growth_ok = true);
    // name plus numeric parameter map, as found in config files; throws
    // std::invalid_argument on unknown names or out-of-range parameters
    static Kernel from_config(const std::string& name,
                              const std::map<std::string, double>& params);

    // throws std::domain_error unless zeta > 0 and eta > 0
    double operator()(double zeta, double eta) const;

    double beta() const { return beta_; }
    double k_bound() const { return k_bound_; }
    bool satisfies_growth() const { return growth_ok_; }
    const std::string& name() const { return name_; }
    const std::map<std::string, double>& params() const { return params_; }

private:
    enum class Family { constant, additive, multiplicative, smoluchowski, granulation, product, custom };
    Kernel(Family f, std::string name, double beta, double k, bool growth_ok)
        : family_(f), name_(std::move(name)), beta_(beta), k_bound_(k), growth_ok_(growth_ok) {}

    Family family_;
    std::string name_;
    double beta_ = 0.0;
    double k_bound_ = 0.0;
    bool growth_ok_ = true;
    double p1_ = 0.0, p2_ = 0.0;  // family-specific parameters
    std::map<std::string, double> params_;
    std::function<double(double, double)> custom_fn_;
};

struct TruncationParams {
    double n = 0.0;  // truncation level, must exceed 1
    int theta = 1;   // 1 = conservative, 0 = non-conservative
};

// psi_n^theta(zeta,eta): zero unless both arguments lie in the open interval
// (1/n, n); the conservative mode additionally zeroes pairs with
// zeta + eta >= n. All interval tests are strict.
double eval_truncated(const Kernel& k, const TruncationParams& tp, double zeta, double eta);

// log-spaced sample grid per axis, used by verify_hypotheses
struct SampleSpec {
    double min = 1e-6;
    double max = 1e6;
    int points = 100;
};

struct HypothesisReport {
    bool symmetric = false;
    bool nonnegative = false;
    bool envelope_holds = false;        // minimal_sampled_k <= declared k_bound
    double minimal_sampled_k = 0.0;     // sup psi / regime bound over the sample grid
    std::array<double, 2> worst_pair{}; // argmax of the ratio
};

// Samples the three-regime growth bound on a log-spaced grid. Points on the
// regime boundary zeta == 1 count toward [1,inf). Throws std::invalid_argument
// on an empty or inverted sample spec.
HypothesisReport verify_hypotheses(const Kernel& k, const SampleSpec& spec);

}  // namespace coag

#endif
