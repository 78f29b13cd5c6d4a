#ifndef COAG_INITIAL_HPP
#define COAG_INITIAL_HPP

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "coag/grid.hpp"

namespace coag {

// Initial number densities. Closed-form kinds carry exact antiderivatives;
// tabulated data is interpolated log-linearly (linear in log volume, log
// density) between samples and vanishes outside the tabulated range.
class InitialDensity {
public:
    static InitialDensity exponential(double amplitude, double rate);  // a * exp(-r z)
    static InitialDensity constant(double value);
    // pairs (volume, density), volumes strictly increasing and positive;
    // throws std::invalid_argument on unsorted or negative input
    static InitialDensity tabulated(std::vector<std::pair<double, double>> samples);

    double value(double zeta) const;            // throws std::domain_error for zeta <= 0
    double integral(double a, double b) const;  // exact when closed-form, else adaptive
    // mass integral of z * g over (a, b); b may be +inf for closed forms
    double mass_integral(double a, double b) const;

    // true when integral z^-2beta * g(z) dz converges near zero; used for the
    // well-posedness warning, decided analytically per kind
    bool singular_moment_finite(double two_beta) const;

    enum class Kind { exponential, constant, tabulated };
    Kind kind() const { return kind_; }
    double amplitude() const { return p1_; }
    double rate() const { return p2_; }
    const std::vector<std::pair<double, double>>& samples() const { return samples_; }

private:
    explicit InitialDensity(Kind k) : kind_(k) {}
    Kind kind_;
    double p1_ = 0.0, p2_ = 0.0;
    std::vector<std::pair<double, double>> samples_;
};

// Cell averages of f on the grid: exact antiderivative when available,
// adaptive quadrature at relative tolerance 1e-10 otherwise. Density values
// must be non-negative at quadrature nodes; negatives raise std::runtime_error.
DistributionState project_initial(const InitialDensity& f, std::shared_ptr<const Grid> grid);

}  // namespace coag

#endif
