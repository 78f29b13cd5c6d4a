#ifndef COAG_QUADRATURE_HPP
#define COAG_QUADRATURE_HPP

#include <functional>

namespace coag {

// Adaptive Gauss-Kronrod on a finite interval, relative tolerance rel_tol.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12);

// Semi-infinite integral over (a, inf) for integrands decaying at infinity.
double integrate_to_inf(const std::function<double(double)>& f, double a,
                        double rel_tol = 1e-12);

}  // namespace coag

#endif
