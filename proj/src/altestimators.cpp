#include "longmem/altestimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "longmem/jackknife.hpp"
#include "longmem/linalg.hpp"
#include "longmem/lpr.hpp"
#include "longmem/optim.hpp"
#include "longmem/spectral.hpp"

namespace longmem::altest {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
} // namespace

GsConfig::GsConfig() {
    q_grid.reserve(21);
    for (int i = 0; i <= 20; ++i) q_grid.push_back(1.0 + 0.05 * i);
}

void GsConfig::validate() const {
    if (r < 0) throw std::invalid_argument("GsConfig: r must be >= 0");
    if (q_grid.empty() || q_grid.front() != 1.0)
        throw std::invalid_argument("GsConfig: q grid must start at 1");
    for (std::size_t i = 1; i < q_grid.size(); ++i)
        if (!(q_grid[i] > q_grid[i - 1]))
            throw std::invalid_argument("GsConfig: q grid must be strictly increasing");
    if (static_cast<int>(q_grid.size()) <= r + 2)
        throw std::invalid_argument("GsConfig: need K > r + 2 for GLS identifiability");
    if (delta && *delta == 0.0)
        throw std::invalid_argument("GsConfig: delta must be non-zero");
}

double gs_tau_star(int r) {
    if (r < 1) throw std::invalid_argument("gs_tau_star: r must be >= 1");
    double fact = 1.0;
    for (int i = 2; i <= 2 * r; ++i) fact *= i;
    return -std::pow(kTwoPi, 2 * r) * r / (fact * (2.0 * r + 1.0) * (2.0 * r + 1.0));
}

double gs_delta(int r, const std::vector<double>& q_grid) {
    if (r < 1) throw std::invalid_argument("gs_delta: r must be >= 1");
    double qsum = 0.0;
    for (double q : q_grid) qsum += std::pow(q, 2.0 + 2.0 * r);
    const double denom = gs_tau_star(r) * qsum;
    if (denom == 0.0) throw std::invalid_argument("gs_delta: zero denominator");
    return gs_tau_star(r) / denom;  // tau_r defaulted to tau*_r
}

double gs_estimate(const std::vector<double>& series, const GsConfig& cfg) {
    cfg.validate();
    const int n = static_cast<int>(series.size());
    const int K = static_cast<int>(cfg.q_grid.size());
    const int N_base = cfg.bandwidth ? *cfg.bandwidth
                                     : spectral::bandwidth(n, cfg.base_bandwidth_exponent);

    std::vector<int> bands(static_cast<std::size_t>(K));
    int N_max = 0;
    for (int i = 0; i < K; ++i) {
        // floor(q_i N) with a guard: q_i N frequently lands on exact integers
        const long double qn =
            static_cast<long double>(cfg.q_grid[static_cast<std::size_t>(i)]) * N_base;
        bands[static_cast<std::size_t>(i)] = static_cast<int>(std::floor(qn + 1e-9L));
        N_max = std::max(N_max, bands[static_cast<std::size_t>(i)]);
    }
    if (!(N_max < n / 2.0))
        throw std::invalid_argument("gs_estimate: largest bandwidth reaches n/2");

    // one periodogram covering the widest bandwidth, then K slope fits
    spectral::SpectralGrid grid;
    grid.n = n;
    grid.alpha = cfg.base_bandwidth_exponent;
    grid.N = N_max;
    grid.lambdas.resize(static_cast<std::size_t>(N_max));
    for (int j = 1; j <= N_max; ++j)
        grid.lambdas[static_cast<std::size_t>(j - 1)] = kTwoPi * j / n;
    const auto pgram = spectral::periodogram(series, grid);

    std::vector<double> dhat(static_cast<std::size_t>(K));
    for (int i = 0; i < K; ++i)
        dhat[static_cast<std::size_t>(i)] =
            lpr::lpr_from_periodogram(pgram.values, bands[static_cast<std::size_t>(i)], grid);

    return gs_combine(dhat, cfg);
}

double gs_combine(const std::vector<double>& dhat, const GsConfig& cfg) {
    cfg.validate();
    const int K = static_cast<int>(cfg.q_grid.size());
    if (static_cast<int>(dhat.size()) != K)
        throw std::invalid_argument("gs_combine: family size does not match q grid");

    // design matrix
    const int cols = cfg.intercept_only ? 1 : 2 + cfg.r;
    const double delta = cfg.intercept_only
                             ? 0.0
                             : (cfg.delta ? *cfg.delta : gs_delta(cfg.r, cfg.q_grid));
    double qsum = 0.0;
    for (double q : cfg.q_grid) qsum += std::pow(q, 2.0 + 2.0 * cfg.r);

    linalg::Matrix Z(static_cast<std::size_t>(K), static_cast<std::size_t>(cols));
    for (int i = 0; i < K; ++i) {
        const double q = cfg.q_grid[static_cast<std::size_t>(i)];
        Z(static_cast<std::size_t>(i), 0) = 1.0;
        if (!cfg.intercept_only) {
            for (int j = 1; j <= cfg.r; ++j)
                Z(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
                    std::pow(q, 2.0 * j);
            Z(static_cast<std::size_t>(i), static_cast<std::size_t>(cols - 1)) =
                std::pow(q, 2.0 + 2.0 * cfg.r) - delta * qsum;
        }
    }

    // Omega_{ij} = 1/max(q_i, q_j)
    linalg::Matrix Omega(static_cast<std::size_t>(K), static_cast<std::size_t>(K));
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j)
            Omega(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
                1.0 / std::max(cfg.q_grid[static_cast<std::size_t>(i)],
                               cfg.q_grid[static_cast<std::size_t>(j)]);

    // GLS: beta = (Z' Om^-1 Z)^-1 Z' Om^-1 dhat, column-by-column solves
    linalg::Matrix M(static_cast<std::size_t>(cols), static_cast<std::size_t>(cols));
    std::vector<double> rhs(static_cast<std::size_t>(cols), 0.0);
    std::vector<double> om_d = linalg::lu_solve(Omega, dhat);
    std::vector<std::vector<double>> om_z(static_cast<std::size_t>(cols));
    for (int c = 0; c < cols; ++c) {
        std::vector<double> zc(static_cast<std::size_t>(K));
        for (int i = 0; i < K; ++i)
            zc[static_cast<std::size_t>(i)] =
                Z(static_cast<std::size_t>(i), static_cast<std::size_t>(c));
        om_z[static_cast<std::size_t>(c)] = linalg::lu_solve(Omega, zc);
    }
    for (int a = 0; a < cols; ++a) {
        for (int b = 0; b < cols; ++b) {
            double acc = 0.0;
            for (int i = 0; i < K; ++i)
                acc += Z(static_cast<std::size_t>(i), static_cast<std::size_t>(a)) *
                       om_z[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)];
            M(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) = acc;
        }
        double acc = 0.0;
        for (int i = 0; i < K; ++i)
            acc += Z(static_cast<std::size_t>(i), static_cast<std::size_t>(a)) *
                   om_d[static_cast<std::size_t>(i)];
        rhs[static_cast<std::size_t>(a)] = acc;
    }
    std::vector<double> beta;
    try {
        beta = linalg::lu_solve(std::move(M), std::move(rhs));
    } catch (const numerical_error& e) {
        throw numerical_error(std::string("gs_estimate: rank-deficient design: ") + e.what());
    }
    return beta[0];
}

double mle_profile_loglik(const std::vector<double>& series, const MleParams& params) {
    const std::size_t n = series.size();
    if (n < params.ar.size() + params.ma.size() + 2)
        throw std::invalid_argument("mle_profile_loglik: series too short");
    arfima::ArfimaModel model;
    model.d = params.d;
    model.ar = params.ar;
    model.ma = params.ma;
    model.sigma2 = 1.0;  // profiled out
    model.validate();
    const auto gamma = arfima::autocovariances_exact(model, static_cast<int>(n) - 1);
    const auto w = arfima::dl_whiten(gamma, series);
    const double mu_hat = w.quad_y1 / w.quad_11;
    const double quad = w.quad_yy - mu_hat * w.quad_y1;
    if (!(quad > 0.0))
        throw numerical_error("mle_profile_loglik: non-positive quadratic form");
    return -0.5 * static_cast<double>(n) * std::log(quad) - 0.5 * w.log_det;
}

namespace {

// coarse grid scan followed by Brent on the bracketing subinterval
double minimize_1d(const std::function<double(double)>& f, double lo, double hi,
                   int grid_points = 25) {
    double best_x = lo, best_f = f(lo);
    for (int i = 1; i <= grid_points; ++i) {
        const double x = lo + (hi - lo) * i / grid_points;
        const double fx = f(x);
        if (fx < best_f) {
            best_f = fx;
            best_x = x;
        }
    }
    const double h = (hi - lo) / grid_points;
    const double a = std::max(lo, best_x - h), b = std::min(hi, best_x + h);
    auto res = optim::brent_min(f, a, b, 1e-9);
    return res.fx < best_f ? res.x[0] : best_x;
}

std::vector<double> pacf_to_poly_coeffs(const std::vector<double>& kappa) {
    std::vector<double> a;
    for (std::size_t j = 0; j < kappa.size(); ++j) {
        std::vector<double> next(j + 1);
        next[j] = kappa[j];
        for (std::size_t i = 0; i < j; ++i) next[i] = a[i] - kappa[j] * a[j - 1 - i];
        a = std::move(next);
    }
    for (double& v : a) v = -v;  // (1 + c B) convention
    return a;
}

} // namespace

MleParams fit_mle(const std::vector<double>& series, int p, int q,
                  const std::optional<MleParams>& fix_short) {
    if (p < 0 || q < 0) throw std::invalid_argument("fit_mle: negative order");
    if (series.size() < static_cast<std::size_t>(p + q + 2))
        throw std::invalid_argument("fit_mle: series too short");

    if (fix_short || (p == 0 && q == 0)) {
        MleParams params;
        if (fix_short) {
            params.ar = fix_short->ar;
            params.ma = fix_short->ma;
        }
        auto neg = [&](double d) {
            params.d = d;
            return -mle_profile_loglik(series, params);
        };
        params.d = minimize_1d(neg, -0.499, 0.499);
        return params;
    }

    const std::size_t dim = 1 + static_cast<std::size_t>(p + q);
    std::vector<double> lo(dim, -0.999), hi(dim, 0.999);
    lo[0] = -0.499;
    hi[0] = 0.499;

    auto unpack = [p, q](const std::vector<double>& x) {
        MleParams params;
        params.d = x[0];
        std::vector<double> kar(x.begin() + 1, x.begin() + 1 + p);
        std::vector<double> kma(x.begin() + 1 + p, x.end());
        params.ar = pacf_to_poly_coeffs(kar);
        params.ma = pacf_to_poly_coeffs(kma);
        return params;
    };
    auto neg = [&](const std::vector<double>& x) {
        return -mle_profile_loglik(series, unpack(x));
    };

    bool have_best = false;
    double best_f = 0.0;
    std::vector<double> best_x;
    std::string last_error = "no starts attempted";
    for (double d0 : {-0.3, 0.0, 0.3}) {
        std::vector<double> x0(dim, 0.0);
        x0[0] = d0;
        try {
            auto res = optim::nelder_mead(neg, x0, lo, hi, 1e-8);
            if (!have_best || res.fx < best_f) {
                have_best = true;
                best_f = res.fx;
                best_x = res.x;
            }
        } catch (const std::exception& e) {
            last_error = e.what();
        }
    }
    if (!have_best)
        throw numerical_error(std::string("fit_mle: all starts failed; last error: ") +
                              last_error);
    return unpack(best_x);
}

namespace {

// w = Theta(B)^{-1} Phi(B) y, computed recursively with zero pre-sample values
std::vector<double> arma_whiten(const std::vector<double>& y,
                                const std::vector<double>& phi,
                                const std::vector<double>& theta) {
    const std::size_t p = phi.size(), q = theta.size(), n = y.size();
    std::vector<double> w(n);
    for (std::size_t t = 0; t < n; ++t) {
        double v = y[t];
        for (std::size_t i = 1; i <= p && i <= t; ++i) v += phi[i - 1] * y[t - i];
        for (std::size_t j = 1; j <= q && j <= t; ++j) v -= theta[j - 1] * w[t - j];
        w[t] = v;
    }
    return w;
}

} // namespace

double fit_pw(const std::vector<double>& series, int p, int q,
              const std::optional<MleParams>& fix_short) {
    std::vector<double> phi, theta;
    if (fix_short) {
        phi = fix_short->ar;
        theta = fix_short->ma;
    } else if (p > 0 || q > 0) {
        jackknife::ArmaFit fit;
        try {
            fit = jackknife::fit_arma_css(series, p, q);
        } catch (const std::exception& e) {
            throw numerical_error(std::string("fit_pw: ARMA fit failed: ") + e.what());
        }
        phi = fit.ar;
        theta = fit.ma;
    }
    const std::vector<double> w =
        (phi.empty() && theta.empty()) ? series : arma_whiten(series, phi, theta);

    auto ssr = [&](double d) {
        const auto resid = jackknife::fractional_difference(w, d);
        double acc = 0.0;
        for (double v : resid) acc += v * v;
        return acc;
    };
    return minimize_1d(ssr, -0.99, 0.99);
}

} // namespace longmem::altest
