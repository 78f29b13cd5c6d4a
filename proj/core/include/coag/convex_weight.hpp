#ifndef COAG_CONVEX_WEIGHT_HPP
#define COAG_CONVEX_WEIGHT_HPP

#include <vector>

#include "coag/grid.hpp"

namespace coag {

// Convex integrability weight sigma with sigma(0) = sigma'(0) = 0, sigma'
// non-decreasing and concave, sigma(x)/x unbounded. sigma' is piecewise
// linear between knots and continues with its final slope, so sigma is
// piecewise quadratic and the defining inequalities hold exactly.
class ConvexWeight {
public:
    // self-test weight x^2 (one knot, slope 2)
    static ConvexWeight quadratic();

    double sigma(double x) const;        // x < 0 throws std::domain_error
    double sigma_prime(double x) const;
    double sigma_second_at_0() const { return slope_.empty() ? 0.0 : slope_.front(); }

    const std::vector<double>& knots() const { return knot_; }

    enum class Mode { volume, singular };
    Mode mode() const { return mode_; }
    double beta() const { return beta_; }  // only meaningful for Mode::singular

private:
    friend ConvexWeight build_vallee_poussin(const DistributionState&, double, ConvexWeight::Mode);
    ConvexWeight() = default;
    std::vector<double> knot_;    // increasing, knot_[0] > 0
    std::vector<double> sp_;      // sigma' at knots, sp_[k] = k + 1
    std::vector<double> slope_;   // sigma'' on (knot_[k-1], knot_[k]], non-increasing
    std::vector<double> sigma_at_knot_;
    Mode mode_ = Mode::volume;
    double beta_ = 0.0;
};

// Builds a weight certifying uniform integrability of the initial data:
//   Mode::volume    sigma_1 with   integral sigma_1(z) g_in(z) dz      finite
//   Mode::singular  sigma_2 with   integral sigma_2(z^-beta g_in(z)) dz finite
// Construction: dyadic levels m = 2^p are scanned upward and a level is kept
// whenever the tail integral of the data above it has at least halved;
// sigma' rises by 1 across each kept level. Dyadic spacing makes the segment
// slopes non-increasing, hence sigma' concave. Throws std::runtime_error when
// the data integral is not finite, std::invalid_argument on an empty state.
ConvexWeight build_vallee_poussin(const DistributionState& initial, double beta,
                                  ConvexWeight::Mode mode);

}  // namespace coag

#endif
