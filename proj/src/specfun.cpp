#include "longmem/specfun.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace longmem::specfun {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Bernoulli terms B_{2k}/(2k) for the digamma asymptotic expansion.
constexpr double kB[] = {
    1.0 / 12.0, -1.0 / 120.0, 1.0 / 252.0, -1.0 / 240.0,
    1.0 / 132.0, -691.0 / 32760.0, 1.0 / 12.0,
};

} // namespace

std::complex<double> dirichlet_kernel(int T, double lambda) {
    if (T < 1) throw std::invalid_argument("dirichlet_kernel: T must be >= 1");
    if (!std::isfinite(lambda))
        throw std::invalid_argument("dirichlet_kernel: lambda must be finite");
    const double s = std::sin(0.5 * lambda);
    if (std::abs(s) < 1e-12) {
        // lambda == 0 (mod 2pi): every summand is 1
        return {static_cast<double>(T), 0.0};
    }
    const double mag = std::sin(0.5 * lambda * T) / s;
    const double phase = -0.5 * lambda * (T + 1);
    return std::polar(mag, phase);
}

double dirichlet_kernel_abs2(int T, double lambda) {
    if (T < 1) throw std::invalid_argument("dirichlet_kernel_abs2: T must be >= 1");
    if (!std::isfinite(lambda))
        throw std::invalid_argument("dirichlet_kernel_abs2: lambda must be finite");
    const double s = std::sin(0.5 * lambda);
    if (std::abs(s) < 1e-12) return static_cast<double>(T) * static_cast<double>(T);
    const double num = std::sin(0.5 * lambda * T);
    return (num * num) / (s * s);
}

double digamma(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("digamma: requires x > 0");
    double result = 0.0;
    while (x < 10.0) {  // upward recurrence into the asymptotic region
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    double term = inv2;
    result += std::log(x) - 0.5 * inv;
    for (double c : kB) {
        result -= c * term;
        term *= inv2;
    }
    return result;
}

double gamma_ratio_log(double a, int k) {
    if (!(a > 0.0)) throw std::invalid_argument("gamma_ratio_log: requires a > 0");
    if (k < 0) throw std::invalid_argument("gamma_ratio_log: requires k >= 0");
    double acc = 0.0;
    for (int j = 0; j < k; ++j) acc += std::log(a + j);
    return acc;
}

namespace {

// Per-term coefficients of the two sums in the covariance series:
//   A_k = (Psi(1/2+k)+Psi(1/2))^2 * G_k,  B_k = (Psi(1/2+k)+Psi(1/2)) * G_k,
// G_k = Gamma(1/2+k)/(Gamma(1/2) k!). G_k stays bounded but is assembled in
// log space since intermediate Gamma values overflow past k ~ 170.
struct CovTables {
    std::vector<double> A, B;
    explicit CovTables(std::size_t max_k) : A(max_k + 1), B(max_k + 1) {
        const double psi_half = digamma(0.5);
        double log_kfact = 0.0;
        for (std::size_t k = 1; k <= max_k; ++k) {
            log_kfact += std::log(static_cast<double>(k));
            const double g = std::exp(gamma_ratio_log(0.5, static_cast<int>(k)) - log_kfact);
            const double psi_sum = digamma(0.5 + static_cast<double>(k)) + psi_half;
            A[k] = psi_sum * psi_sum * g;
            B[k] = psi_sum * g;
        }
    }
};

const CovTables& cov_tables(std::size_t max_k) {
    static const CovTables tables(4096);
    if (max_k > 4096)
        throw std::invalid_argument("log_periodogram_cov: max_terms above table size 4096");
    return tables;
}

} // namespace

SeriesResult log_periodogram_cov(double rho2, const SeriesControl& ctl) {
    if (!(rho2 >= 0.0) || rho2 >= 1.0)
        throw std::invalid_argument("log_periodogram_cov: requires 0 <= rho2 < 1");
    if (!(ctl.rel_tol > 0.0) || ctl.max_terms < 1)
        throw std::invalid_argument("log_periodogram_cov: invalid SeriesControl");

    SeriesResult out;
    if (rho2 == 0.0) return out;

    const CovTables& tab = cov_tables(ctl.max_terms);
    double s1 = 0.0, s2 = 0.0, pow_rho = 1.0;
    std::size_t k = 0;
    bool converged = false;
    while (k < ctl.max_terms) {
        ++k;
        pow_rho *= rho2;
        const double ta = tab.A[k] * pow_rho;
        const double tb = tab.B[k] * pow_rho;
        s1 += ta;
        s2 += tb;
        if (std::abs(ta) <= ctl.rel_tol * std::abs(s1) &&
            std::abs(tb) <= ctl.rel_tol * std::abs(s2)) {
            converged = true;
            break;
        }
    }
    out.terms = k;
    out.truncated = !converged;
    out.value = std::sqrt(1.0 - rho2) * s1 - (1.0 - rho2) * (s2 * s2);
    return out;
}

} // namespace longmem::specfun
