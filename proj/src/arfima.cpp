#include "longmem/arfima.hpp"

#include <cmath>
#include <algorithm>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

#include "longmem/linalg.hpp"
#include "longmem/simd.hpp"

namespace longmem::arfima {

namespace {

constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kTwoPi = 6.283185307179586476925286766559;

double poly_abs2(const std::vector<double>& coeffs, double lambda) {
    // |1 + sum_k c_k e^{-ik lambda}|^2
    double re = 1.0, im = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        const double a = -lambda * static_cast<double>(k + 1);
        re += coeffs[k] * std::cos(a);
        im += coeffs[k] * std::sin(a);
    }
    return re * re + im * im;
}

} // namespace

bool roots_outside_unit_circle(const std::vector<double>& coeffs) {
    // Schur-Cohn on the reversed polynomial z^p + c_1 z^{p-1} + ... + c_p,
    // whose roots are the reciprocals.
    std::vector<double> a;
    a.reserve(coeffs.size() + 1);
    a.push_back(1.0);
    for (double c : coeffs) a.push_back(c);
    while (a.size() > 1) {
        const double kappa = a.back() / a.front();
        if (!(std::abs(kappa) < 1.0)) return false;
        std::vector<double> b(a.size() - 1);
        for (std::size_t k = 0; k + 1 < a.size(); ++k)
            b[k] = a[k] - kappa * a[a.size() - 1 - k];
        a = std::move(b);
    }
    return true;
}

void ArfimaModel::validate() const {
    if (!(d > -0.5 && d < 0.5))
        throw std::invalid_argument("ArfimaModel: d must lie in (-0.5, 0.5)");
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("ArfimaModel: sigma2 must be positive");
    if (!roots_outside_unit_circle(ar))
        throw std::invalid_argument("ArfimaModel: AR polynomial is not stationary");
    if (!roots_outside_unit_circle(ma))
        throw std::invalid_argument("ArfimaModel: MA polynomial is not invertible");
}

double arma_spectral_factor(const ArfimaModel& model, double lambda) {
    return model.sigma2 / kTwoPi * poly_abs2(model.ma, lambda) / poly_abs2(model.ar, lambda);
}

double spectral_density(const ArfimaModel& model, double lambda) {
    if (!(lambda >= 0.0 && lambda <= kPi))
        throw std::invalid_argument("spectral_density: lambda must lie in (0, pi]");
    if (lambda == 0.0) {
        if (model.d > 0.0)
            throw std::invalid_argument("spectral_density: pole at lambda = 0 for d > 0");
        if (model.d < 0.0) return 0.0;
        return arma_spectral_factor(model, 0.0);
    }
    const double base = 2.0 * std::sin(0.5 * lambda);
    return std::pow(base, -2.0 * model.d) * arma_spectral_factor(model, lambda);
}

double fstar_second_derivative_at_zero(const ArfimaModel& model) {
    const double h = 1e-3;
    const double f0 = arma_spectral_factor(model, 0.0);
    const double f1 = arma_spectral_factor(model, h);
    const double f2 = arma_spectral_factor(model, 2.0 * h);
    // even extension: f(-h) = f(h)
    return (-2.0 * f2 + 32.0 * f1 - 30.0 * f0) / (12.0 * h * h);
}

namespace {

// Adaptive Simpson on [a, b] to an absolute tolerance.
struct AdaptiveSimpson {
    const std::function<double(double)>& f;
    int max_depth = 48;
    long evals = 0;
    bool converged = true;

    double run(double a, double b, double tol) {
        const double fa = eval(a), fb = eval(b), fm = eval(0.5 * (a + b));
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        return recurse(a, b, fa, fm, fb, whole, tol, 0);
    }

    double eval(double x) {
        ++evals;
        return f(x);
    }

    double recurse(double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        const double flm = eval(lm), frm = eval(rm);
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        if (depth >= max_depth) {
            converged = false;
            return left + right + delta / 15.0;
        }
        if (std::abs(delta) <= 15.0 * tol)
            return left + right + delta / 15.0;
        return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
               recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }
};

double autocov_quadrature_single(const ArfimaModel& model, int k, double abs_tol,
                                 long* evals) {
    const double d = model.d;
    std::function<double(double)> integrand;
    double lo, hi;
    if (d > 0.0) {
        // lambda = u^c with c = 1/(1-2d); the lambda^{-2d} factor cancels
        // against the Jacobian at the origin.
        const double c = 1.0 / (1.0 - 2.0 * d);
        integrand = [&model, k, c](double u) {
            const double lambda = std::min(std::pow(u, c), kPi);
            const double jac = c * std::pow(u, c - 1.0);
            return 2.0 * std::cos(k * lambda) * spectral_density(model, lambda) * jac;
        };
        lo = 1e-13;
        hi = std::pow(kPi, 1.0 - 2.0 * d);
    } else {
        integrand = [&model, k](double lambda) {
            return 2.0 * std::cos(k * lambda) * spectral_density(model, std::min(lambda, kPi));
        };
        lo = 1e-13;
        hi = kPi;
    }
    // Initial panelization tied to the oscillation count so cos(k lambda)
    // cannot alias against the Simpson sample points; odd panel count breaks
    // the half-period symmetry.
    AdaptiveSimpson quad{integrand};
    const int panels = std::max(9, 2 * k + 3);
    double value = 0.0;
    const double panel_tol = abs_tol / panels;
    for (int p = 0; p < panels; ++p) {
        const double a = lo + (hi - lo) * p / panels;
        const double b = lo + (hi - lo) * (p + 1) / panels;
        value += quad.run(a, b, panel_tol);
    }
    if (evals) *evals += quad.evals;
    if (!quad.converged)
        throw numerical_error("autocovariances: quadrature failed to converge at lag " +
                              std::to_string(k) + " (abs_tol " + std::to_string(abs_tol) +
                              ", " + std::to_string(quad.evals) + " evaluations)");
    return value;
}

} // namespace

std::vector<double> autocovariances(const ArfimaModel& model, int max_lag) {
    if (max_lag < 0) throw std::invalid_argument("autocovariances: max_lag must be >= 0");
    model.validate();
    long evals = 0;
    const double gamma0 =
        autocov_quadrature_single(model, 0, 1e-12 * std::max(1.0, model.sigma2), &evals);
    std::vector<double> out(static_cast<std::size_t>(max_lag) + 1);
    out[0] = gamma0;
    const double tol = 1e-10 * gamma0;
    for (int k = 1; k <= max_lag; ++k)
        out[static_cast<std::size_t>(k)] = autocov_quadrature_single(model, k, tol, &evals);
    return out;
}

namespace {

// Autocovariances of the pure ARMA block (1 + phi B) y = (1 + theta B) e at
// unit innovation variance, by the standard cross-covariance equations:
//   gamma(k) + sum_i phi_i gamma(|k-i|) = sum_{j>=k} theta_j psi_{j-k},
// solved for gamma(0..p) and recursed beyond; extended until the tail falls
// below 1e-15 of gamma(0).
std::vector<double> arma_autocovariances(const std::vector<double>& ar,
                                         const std::vector<double>& ma) {
    const int p = static_cast<int>(ar.size());
    const int q = static_cast<int>(ma.size());
    if (p == 0 && q == 0) return {1.0};

    auto theta = [&](int j) { return j == 0 ? 1.0 : (j <= q ? ma[j - 1] : 0.0); };

    // psi_0..psi_q
    std::vector<double> psi(static_cast<std::size_t>(q) + 1);
    psi[0] = 1.0;
    for (int j = 1; j <= q; ++j) {
        double v = theta(j);
        for (int i = 1; i <= p && i <= j; ++i)
            v -= ar[static_cast<std::size_t>(i - 1)] * psi[static_cast<std::size_t>(j - i)];
        psi[static_cast<std::size_t>(j)] = v;
    }
    auto rhs = [&](int k) {
        double acc = 0.0;
        for (int j = k; j <= q; ++j) acc += theta(j) * psi[static_cast<std::size_t>(j - k)];
        return acc;
    };

    // solve for gamma(0..p)
    std::vector<double> gamma;
    if (p == 0) {
        gamma.push_back(rhs(0));
    } else {
        linalg::Matrix A(static_cast<std::size_t>(p) + 1, static_cast<std::size_t>(p) + 1);
        std::vector<double> b(static_cast<std::size_t>(p) + 1);
        for (int k = 0; k <= p; ++k) {
            A(static_cast<std::size_t>(k), static_cast<std::size_t>(k)) += 1.0;
            for (int i = 1; i <= p; ++i)
                A(static_cast<std::size_t>(k),
                  static_cast<std::size_t>(std::abs(k - i))) +=
                    ar[static_cast<std::size_t>(i - 1)];
            b[static_cast<std::size_t>(k)] = rhs(k);
        }
        gamma = linalg::lu_solve(std::move(A), std::move(b));
    }

    const double g0 = std::abs(gamma[0]);
    const int hard_cap = 200000;
    for (int k = static_cast<int>(gamma.size()); k < hard_cap; ++k) {
        double v = (k <= q) ? rhs(k) : 0.0;
        for (int i = 1; i <= p; ++i)
            v -= ar[static_cast<std::size_t>(i - 1)] * gamma[static_cast<std::size_t>(k - i)];
        gamma.push_back(v);
        if (k > q) {
            double tail = 0.0;
            for (int i = 0; i < std::max(p, 1) && i < static_cast<int>(gamma.size()); ++i)
                tail = std::max(tail, std::abs(gamma[gamma.size() - 1 - static_cast<std::size_t>(i)]));
            if (tail < 1e-15 * g0) break;
        }
    }
    return gamma;
}

// Fractional-noise autocovariances gamma_FN(0..max_lag) at unit innovation
// variance: gamma_0 = Gamma(1-2d)/Gamma(1-d)^2, ratio (k-1+d)/(k-d).
std::vector<double> fractional_noise_autocov(double d, int max_lag) {
    std::vector<double> g(static_cast<std::size_t>(max_lag) + 1);
    g[0] = std::exp(std::lgamma(1.0 - 2.0 * d) - 2.0 * std::lgamma(1.0 - d));
    for (int k = 1; k <= max_lag; ++k)
        g[static_cast<std::size_t>(k)] =
            g[static_cast<std::size_t>(k - 1)] * (k - 1.0 + d) / (k - d);
    return g;
}

} // namespace

std::vector<double> autocovariances_exact(const ArfimaModel& model, int max_lag) {
    if (max_lag < 0) throw std::invalid_argument("autocovariances_exact: max_lag >= 0");
    model.validate();
    // Y is the ARMA filter applied to fractional noise, so gamma_Y is the
    // ARMA autocovariance sequence convolved with the fractional-noise one.
    const std::vector<double> r = arma_autocovariances(model.ar, model.ma);
    const int J = static_cast<int>(r.size()) - 1;

    const std::vector<double> gfn = fractional_noise_autocov(model.d, max_lag + J);
    std::vector<double> out(static_cast<std::size_t>(max_lag) + 1);
    for (int k = 0; k <= max_lag; ++k) {
        double acc = r[0] * gfn[static_cast<std::size_t>(k)];
        for (int h = 1; h <= J; ++h)
            acc += r[static_cast<std::size_t>(h)] *
                   (gfn[static_cast<std::size_t>(std::abs(k - h))] +
                    gfn[static_cast<std::size_t>(k + h)]);
        out[static_cast<std::size_t>(k)] = model.sigma2 * acc;
    }
    return out;
}

namespace {

// One Durbin-Levinson step: reflection coefficient, row update, variance.
// Throws when positive definiteness is lost.
struct DlRecursion {
    const std::vector<double>& gamma;
    std::vector<double> row, next;
    double v;

    explicit DlRecursion(const std::vector<double>& g)
        : gamma(g), row(g.size()), next(g.size()), v(g[0]) {
        if (!(g[0] > 0.0)) throw numerical_error("durbin-levinson: gamma_0 not positive");
    }

    // advance from step t-1 to t (t >= 1); afterwards row holds c_t and v = v_t
    void advance(std::size_t t) {
        const double num =
            gamma[t] - (t > 1 ? simd::dot(row.data(), gamma.data() + 1, t - 1) : 0.0);
        const double k = num / v;
        if (!(std::abs(k) < 1.0) || !std::isfinite(k))
            throw numerical_error(
                "durbin-levinson: autocovariance sequence not positive definite at lag " +
                std::to_string(t));
        simd::dl_update(next.data(), row.data(), k, t);
        row.swap(next);
        v *= (1.0 - k * k);
    }
};

} // namespace

std::vector<double> simulate(const ArfimaModel& model, int n, RngStream& rng) {
    if (n < 2) throw std::invalid_argument("simulate: n must be >= 2");
    model.validate();
    const std::vector<double> gamma = autocovariances_exact(model, n - 1);

    std::vector<double> x(static_cast<std::size_t>(n));
    DlRecursion dl(gamma);
    x[0] = std::sqrt(dl.v) * rng.next_normal();
    for (int t = 1; t < n; ++t) {
        dl.advance(static_cast<std::size_t>(t));
        const double mean = simd::dot(dl.row.data(), x.data(), static_cast<std::size_t>(t));
        x[static_cast<std::size_t>(t)] = mean + std::sqrt(dl.v) * rng.next_normal();
    }
    if (model.mu != 0.0)
        for (auto& v : x) v += model.mu;
    return x;
}

DlWhitened dl_whiten(const std::vector<double>& gamma, const std::vector<double>& y) {
    const std::size_t n = y.size();
    if (gamma.size() < n) throw std::invalid_argument("dl_whiten: gamma too short");
    DlWhitened out;
    DlRecursion dl(gamma);
    double coeff_sum = 0.0;  // sum of the current prediction coefficients
    {
        const double e_y = y[0], e_1 = 1.0;
        out.quad_yy += e_y * e_y / dl.v;
        out.quad_y1 += e_y * e_1 / dl.v;
        out.quad_11 += e_1 * e_1 / dl.v;
        out.log_det += std::log(dl.v);
    }
    for (std::size_t t = 1; t < n; ++t) {
        dl.advance(t);
        const double k = dl.row[0];
        coeff_sum = coeff_sum + k * (1.0 - coeff_sum);
        const double e_y = y[t] - simd::dot(dl.row.data(), y.data(), t);
        const double e_1 = 1.0 - coeff_sum;
        out.quad_yy += e_y * e_y / dl.v;
        out.quad_y1 += e_y * e_1 / dl.v;
        out.quad_11 += e_1 * e_1 / dl.v;
        out.log_det += std::log(dl.v);
    }
    return out;
}

} // namespace longmem::arfima
