#pragma once
// ARFIMA(p,d,q) model representation, spectral densities, autocovariances,
// and exact Gaussian simulation.
//
// Sign convention: coefficients are stored exactly as they appear in the
// generating polynomials (1 + phi_1 B + ... ) (1-B)^d (Y_t - mu) =
// (1 + theta_1 B + ...) eps_t. A negative phi_1 therefore corresponds to
// positive first-order autocorrelation. The CLI documents the mapping to the
// conventional (1 - phi B) form.
//
// The short-memory factor is used as f* = (sigma^2/2pi)|Theta|^2/|Phi|^2
// without renormalizing to integral log f* = 0: the slope estimators and all
// bias-correction formulas depend only on the ratios f*''(0)/f*(0) and
// f(lambda)/f(mu), which are invariant to that normalization.

#include <vector>

#include "longmem/errors.hpp"
#include "longmem/rng.hpp"

namespace longmem::arfima {

struct ArfimaModel {
    double d = 0.0;
    std::vector<double> ar;  // phi_1..phi_p of (1 + phi_1 B + ...)
    std::vector<double> ma;  // theta_1..theta_q of (1 + theta_1 B + ...)
    double sigma2 = 1.0;
    double mu = 0.0;

    // Throws std::invalid_argument unless d in (-0.5, 0.5), sigma2 > 0, and
    // both polynomials have all roots strictly outside the unit circle.
    void validate() const;
};

// True when 1 + c_1 z + ... + c_p z^p has all roots strictly outside |z| = 1.
bool roots_outside_unit_circle(const std::vector<double>& coeffs);

// Short-memory spectral factor (sigma^2/2pi)|Theta(e^{-il})|^2/|Phi(e^{-il})|^2.
double arma_spectral_factor(const ArfimaModel& model, double lambda);

// f(lambda) = (2 sin(lambda/2))^{-2d} f*(lambda) on (0, pi].
// lambda = 0 with d > 0 is a pole and raises a domain error.
double spectral_density(const ArfimaModel& model, double lambda);

// f*''(0) by fourth-order central differences on the even extension
// (h = 1e-3; odd derivatives vanish since f* is even).
double fstar_second_derivative_at_zero(const ArfimaModel& model);

// gamma_0..gamma_max_lag by adaptive quadrature of 2 int_0^pi cos(k l) f(l) dl,
// with the lambda^{-2d} endpoint singularity removed by the substitution
// lambda = u^{1/(1-2d)} when d > 0. Absolute tolerance 1e-10 * gamma_0.
std::vector<double> autocovariances(const ArfimaModel& model, int max_lag);

// Exact gamma_0..gamma_max_lag via the fractional-noise closed form convolved
// with the ARMA psi-weight autocovariances. Machine-precision agreement with
// the quadrature route is part of the test suite; this is the path the
// likelihood and simulation code uses.
std::vector<double> autocovariances_exact(const ArfimaModel& model, int max_lag);

// One exact Gaussian draw of length n via the Durbin-Levinson innovations
// recursion; deterministic given the stream. Throws numerical_error naming
// the failing lag if the autocovariance sequence loses positive definiteness.
std::vector<double> simulate(const ArfimaModel& model, int n, RngStream& rng);

// Whitening byproducts of one Durbin-Levinson sweep over a data vector,
// shared by the profile likelihood (see altestimators).
struct DlWhitened {
    double quad_yy = 0.0;   // sum e_y(t)^2 / v_t
    double quad_y1 = 0.0;   // sum e_y(t) e_1(t) / v_t
    double quad_11 = 0.0;   // sum e_1(t)^2 / v_t
    double log_det = 0.0;   // sum log v_t
};

// Runs Durbin-Levinson on Toeplitz(gamma) and whitens both y and the
// all-ones vector. gamma must have at least y.size() entries.
DlWhitened dl_whiten(const std::vector<double>& gamma, const std::vector<double>& y);

} // namespace longmem::arfima
