#pragma once
// Derivative-free minimizers used by the CSS/ML fitters: Brent's method on an
// interval for one-dimensional profiles, Nelder-Mead with box clamping for
// the joint (d, ARMA) searches. All searches are bounded.

#include <functional>
#include <vector>

namespace longmem::optim {

struct Result {
    std::vector<double> x;
    double fx = 0.0;
    std::size_t evals = 0;
    bool converged = false;
};

// Brent minimization of f on [lo, hi] to the given x-tolerance.
Result brent_min(const std::function<double(double)>& f, double lo, double hi,
                 double tol = 1e-8, std::size_t max_iter = 200);

// Nelder-Mead restricted to the box [lo_i, hi_i]; evaluation points are
// clamped to the box before calling f. Stops when the simplex f-spread and
// x-spread drop below tol.
Result nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                   std::vector<double> x0, const std::vector<double>& lo,
                   const std::vector<double>& hi, double tol = 1e-8,
                   std::size_t max_iter = 2000);

} // namespace longmem::optim
