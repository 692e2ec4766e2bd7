#pragma once
// Special functions behind the periodogram covariance machinery: Dirichlet
// kernel, digamma, log gamma ratios, and the log-periodogram covariance
// series.

#include <complex>
#include <cstddef>

namespace longmem::specfun {

struct SeriesControl {
    double rel_tol = 1e-12;
    std::size_t max_terms = 500;
};

// Delta^(T)(lambda) = sum_{t=1}^{T} exp(-i lambda t).
// Returns T exactly at lambda == 0 (mod 2pi); the removable singularity is
// detected with |sin(lambda/2)| < 1e-12 rather than left to the ratio form.
std::complex<double> dirichlet_kernel(int T, double lambda);

// Delta^(T)(lambda) * Delta^(T)(-lambda) = sin^2(T lambda/2) / sin^2(lambda/2),
// equal to T^2 at lambda == 0 (mod 2pi).
double dirichlet_kernel_abs2(int T, double lambda);

// Digamma for x > 0, >= 1e-12 relative accuracy.
double digamma(double x);

// log(Gamma(a+k)/Gamma(a)) as sum_{j=0}^{k-1} log(a+j); avoids overflow.
double gamma_ratio_log(double a, int k);

struct SeriesResult {
    double value = 0.0;
    bool truncated = false;
    std::size_t terms = 0;
};

// Covariance of two log-periodogram ordinates whose underlying periodograms
// have squared correlation rho2:
//   sqrt(1-rho2) * sum_{k>=1} (Psi(1/2+k)+Psi(1/2))^2 G_k rho2^k
//   - (1-rho2)   * ( sum_{k>=1} (Psi(1/2+k)+Psi(1/2)) G_k rho2^k )^2
// with G_k = Gamma(1/2+k)/(Gamma(1/2) k!). Truncates when a term's relative
// contribution to both partial sums drops below ctl.rel_tol, or flags
// truncated=true at ctl.max_terms.
SeriesResult log_periodogram_cov(double rho2, const SeriesControl& ctl = {});

} // namespace longmem::specfun
