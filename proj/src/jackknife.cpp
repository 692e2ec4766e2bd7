#include "longmem/jackknife.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <stdexcept>

#include "longmem/altestimators.hpp"
#include "longmem/linalg.hpp"
#include "longmem/optim.hpp"

namespace longmem::jackknife {

namespace {
constexpr double kPiSq = 9.86960440108935861883449099988;
constexpr double kRhoCap = 1.0 - 1e-9;
} // namespace

const char* scheme_name(Scheme s) {
    return s == Scheme::non_overlapping ? "no" : "mb";
}

SubsamplePlan SubsamplePlan::make(int n, int m, Scheme scheme) {
    if (m < 2) throw std::invalid_argument("SubsamplePlan: m must be >= 2");
    if (n <= 0 || n % m != 0)
        throw std::invalid_argument("SubsamplePlan: n must be a positive multiple of m");
    SubsamplePlan p;
    p.scheme = scheme;
    p.m = m;
    p.l = n / m;
    return p;
}

std::vector<std::vector<double>> subsample(const std::vector<double>& series,
                                           const SubsamplePlan& plan) {
    const int n = static_cast<int>(series.size());
    if (plan.l * plan.m != n)
        throw std::invalid_argument("subsample: plan does not match series length");
    std::vector<std::vector<double>> blocks;
    blocks.reserve(static_cast<std::size_t>(plan.m));
    for (int i = 1; i <= plan.m; ++i) {
        const int start = plan.offset(i);
        blocks.emplace_back(series.begin() + start, series.begin() + start + plan.l);
    }
    return blocks;
}

double curvature_factor(SubsampleCurvature scale, int m) {
    return scale == SubsampleCurvature::stationary ? 1.0
                                                   : static_cast<double>(m) * m;
}

double JackknifeWeights::g1_residual() const {
    double s = 0.0;
    for (double w : w_sub) s += w;
    return w_n - s - 1.0;
}

double JackknifeWeights::g2_residual(int n, int N_n, int l, int N_l) const {
    const double a = static_cast<double>(N_n) * N_n / (static_cast<double>(n) * n);
    const double kappa = curvature_factor(curvature, static_cast<int>(w_sub.size()));
    const double b = kappa * static_cast<double>(N_l) * N_l / (static_cast<double>(l) * l);
    double s = 0.0;
    for (double w : w_sub) s += w;
    return a * w_n - b * s;
}

void JackknifeWeights::check(int n, int N_n, int l, int N_l) const {
    if (std::abs(g1_residual()) > 1e-10)
        throw numerical_error("JackknifeWeights: constraint g1 violated");
    if (std::abs(g2_residual(n, N_n, l, N_l)) > 1e-10)
        throw numerical_error("JackknifeWeights: constraint g2 violated");
}

JackknifeWeights JackknifeWeights::unchecked(double w_n, std::vector<double> w_sub) {
    JackknifeWeights w;
    w.w_n = w_n;
    w.w_sub = std::move(w_sub);
    return w;
}

JackknifeWeights chambers_weights(int n, int m, double alpha, SubsampleCurvature scale) {
    const SubsamplePlan plan = SubsamplePlan::make(n, m, Scheme::non_overlapping);
    const int N_n = spectral::bandwidth(n, alpha);
    const int N_l = spectral::bandwidth(plan.l, alpha);
    const double ratio = static_cast<double>(N_n) * plan.l /
                         (static_cast<double>(N_l) * static_cast<double>(n));
    const double denom = 1.0 - ratio * ratio / curvature_factor(scale, m);
    if (std::abs(denom) < 1e-14)
        throw numerical_error("chambers_weights: degenerate bandwidth ratio");
    JackknifeWeights w;
    w.provenance = WeightProvenance::chambers;
    w.curvature = scale;
    w.w_n = 1.0 / denom;
    w.w_sub.assign(static_cast<std::size_t>(m), (w.w_n - 1.0) / m);
    w.check(n, N_n, plan.l, N_l);
    return w;
}

double periodogram_correlation(const arfima::ArfimaModel& model, int l,
                               double lambda, double mu,
                               CovarianceDiagnostics* diag) {
    if (l < 2) throw std::invalid_argument("periodogram_correlation: l must be >= 2");
    const double inv_l = 1.0 / static_cast<double>(l);
    const double inv_l2 = inv_l * inv_l;
    const double cross = specfun::dirichlet_kernel_abs2(l, lambda - mu) +
                         specfun::dirichlet_kernel_abs2(l, lambda + mu);
    const double f_ratio = arfima::spectral_density(model, lambda) /
                           arfima::spectral_density(model, mu);
    const double num = 3.0 * inv_l + inv_l2 * cross * f_ratio;
    const double den_l = 1.0 + 3.0 * inv_l +
                         inv_l2 * specfun::dirichlet_kernel_abs2(l, 2.0 * lambda);
    const double den_m = 1.0 + 3.0 * inv_l +
                         inv_l2 * specfun::dirichlet_kernel_abs2(l, 2.0 * mu);
    double rho = num / std::sqrt(den_l * den_m);
    if (rho < 0.0 || rho > kRhoCap) {
        if (diag) ++diag->clip_events;
        rho = std::clamp(rho, 0.0, kRhoCap);
    }
    return rho;
}

namespace {

// Double sum (1 / (4 S_a S_b)) sum_j sum_k a_j b_k C(rho(la_j, mu_k)^2).
double covariance_double_sum(const arfima::ArfimaModel& model, int l,
                             const std::vector<double>& lam_a,
                             const std::vector<double>& a,
                             const std::vector<double>& lam_b,
                             const std::vector<double>& b, double s_a, double s_b,
                             CovarianceDiagnostics* diag) {
    double acc = 0.0;
    for (std::size_t j = 0; j < lam_a.size(); ++j) {
        double inner = 0.0;
        for (std::size_t k = 0; k < lam_b.size(); ++k) {
            const double rho = periodogram_correlation(model, l, lam_a[j], lam_b[k], diag);
            const auto series = specfun::log_periodogram_cov(rho * rho);
            if (series.truncated && diag) ++diag->truncated_series;
            inner += b[k] * series.value;
        }
        acc += a[j] * inner;
    }
    return acc / (4.0 * s_a * s_b);
}

std::string bundle_key(const arfima::ArfimaModel& model, int n,
                       const SubsamplePlan& plan, double alpha) {
    std::ostringstream os;
    os.precision(17);
    os << model.d << '|' << model.sigma2 << '|';
    for (double v : model.ar) os << v << ',';
    os << '|';
    for (double v : model.ma) os << v << ',';
    os << '|' << n << '|' << plan.m << '|' << scheme_name(plan.scheme) << '|' << alpha;
    return os.str();
}

std::shared_mutex bundle_cache_mutex;
std::map<std::string, CovarianceBundle>& bundle_cache() {
    static std::map<std::string, CovarianceBundle> cache;
    return cache;
}

} // namespace

CovarianceBundle estimator_covariances(const arfima::ArfimaModel& model, int n,
                                       const SubsamplePlan& plan, double alpha) {
    if (plan.l * plan.m != n)
        throw std::invalid_argument("estimator_covariances: plan does not match n");
    model.validate();

    const std::string key = bundle_key(model, n, plan, alpha);
    {
        std::shared_lock lock(bundle_cache_mutex);
        auto it = bundle_cache().find(key);
        if (it != bundle_cache().end()) return it->second;
    }

    const auto full_grid = spectral::SpectralGrid::make(n, alpha);
    const auto sub_grid = spectral::SpectralGrid::make(plan.l, alpha);
    const auto full_reg = spectral::lpr_regressors(full_grid);
    const auto sub_reg = spectral::lpr_regressors(sub_grid);

    CovarianceBundle bundle;
    bundle.model_used = model;
    bundle.plan = plan;
    bundle.alpha = alpha;

    // The printed correlation has no sub-sample index: one c* broadcast over
    // i, one off-diagonal c+ value.
    const double c_star = covariance_double_sum(
        model, plan.l, full_grid.lambdas, full_reg.a, sub_grid.lambdas, sub_reg.a,
        full_reg.sxx, sub_reg.sxx, &bundle.diagnostics);
    const double c_dag = covariance_double_sum(
        model, plan.l, sub_grid.lambdas, sub_reg.a, sub_grid.lambdas, sub_reg.a,
        sub_reg.sxx, sub_reg.sxx, &bundle.diagnostics);

    bundle.c_star.assign(static_cast<std::size_t>(plan.m), c_star);
    bundle.c_dagger.assign(static_cast<std::size_t>(plan.m),
                           std::vector<double>(static_cast<std::size_t>(plan.m), c_dag));
    for (int i = 0; i < plan.m; ++i)
        bundle.c_dagger[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 0.0;

    {
        std::unique_lock lock(bundle_cache_mutex);
        if (bundle_cache().size() > 512) bundle_cache().clear();
        bundle_cache().emplace(key, bundle);
    }
    return bundle;
}

JackknifeWeights optimal_weights(int n, const SubsamplePlan& plan, double alpha,
                                 const CovarianceBundle& cov, SubsampleCurvature scale) {
    const int m = plan.m;
    if (static_cast<int>(cov.c_star.size()) != m ||
        static_cast<int>(cov.c_dagger.size()) != m)
        throw std::invalid_argument("optimal_weights: covariance dimensions do not match plan");
    const int N_n = spectral::bandwidth(n, alpha);
    const int N_l = spectral::bandwidth(plan.l, alpha);
    const double a = static_cast<double>(N_n) * N_n / (static_cast<double>(n) * n);
    const double b = curvature_factor(scale, m) * static_cast<double>(N_l) * N_l /
                     (static_cast<double>(plan.l) * plan.l);

    const std::size_t dim = static_cast<std::size_t>(m) + 3;
    linalg::Matrix A(dim, dim);
    std::vector<double> rhs(dim, 0.0);
    rhs[0] = 1.0;

    // row 0: g1, row 1: g2
    A(0, 0) = 1.0;
    A(1, 0) = a;
    for (int i = 1; i <= m; ++i) {
        A(0, static_cast<std::size_t>(i)) = -1.0;
        A(1, static_cast<std::size_t>(i)) = -b;
    }
    // row 2: FOC w_n
    A(2, 0) = kPiSq / (12.0 * N_n);
    for (int i = 1; i <= m; ++i)
        A(2, static_cast<std::size_t>(i)) = -2.0 * cov.c_star[static_cast<std::size_t>(i - 1)];
    A(2, dim - 2) = 1.0;
    A(2, dim - 1) = a;
    // rows 3..m+2: FOC w_i
    for (int i = 1; i <= m; ++i) {
        const std::size_t r = static_cast<std::size_t>(i) + 2;
        A(r, 0) = -2.0 * cov.c_star[static_cast<std::size_t>(i - 1)];
        for (int j = 1; j <= m; ++j) {
            A(r, static_cast<std::size_t>(j)) =
                (i == j) ? kPiSq / (12.0 * N_l)
                         : 2.0 * cov.c_dagger[static_cast<std::size_t>(i - 1)]
                                             [static_cast<std::size_t>(j - 1)];
        }
        A(r, dim - 2) = -1.0;
        A(r, dim - 1) = -b;
    }

    std::vector<double> w = linalg::lu_solve(std::move(A), std::move(rhs));

    JackknifeWeights out;
    out.provenance = WeightProvenance::optimal;
    out.curvature = scale;
    out.w_n = w[0];
    out.w_sub.assign(w.begin() + 1, w.begin() + 1 + m);
    out.delta1 = w[dim - 2];
    out.delta2 = w[dim - 1];

    // closed form from the first two FOCs
    const double ratio = static_cast<double>(N_n) * plan.l /
                         (static_cast<double>(N_l) * static_cast<double>(n));
    const double w_n_closed = 1.0 / (1.0 - ratio * ratio / curvature_factor(scale, m));
    if (std::abs(out.w_n - w_n_closed) > 1e-8)
        throw numerical_error("optimal_weights: solved w_n disagrees with the closed form "
                              "(matrix assembly bug signal)");
    out.check(n, N_n, plan.l, N_l);
    return out;
}

std::vector<double> bordered_hessian_minors(int n, const SubsamplePlan& plan,
                                            double alpha,
                                            const CovarianceBundle& cov,
                                            SubsampleCurvature scale) {
    const int m = plan.m;
    const int N_n = spectral::bandwidth(n, alpha);
    const int N_l = spectral::bandwidth(plan.l, alpha);
    const double a = static_cast<double>(N_n) * N_n / (static_cast<double>(n) * n);
    const double b = curvature_factor(scale, m) * static_cast<double>(N_l) * N_l /
                     (static_cast<double>(plan.l) * plan.l);

    const std::size_t dim = static_cast<std::size_t>(m) + 3;
    linalg::Matrix H(dim, dim);
    H(0, 2) = 1.0;
    H(1, 2) = a;
    H(2, 0) = 1.0;
    H(2, 1) = a;
    H(2, 2) = kPiSq / (12.0 * N_n);
    for (int i = 1; i <= m; ++i) {
        const std::size_t c = static_cast<std::size_t>(i) + 2;
        H(0, c) = -1.0;
        H(1, c) = -b;
        H(c, 0) = -1.0;
        H(c, 1) = -b;
        H(2, c) = -2.0 * cov.c_star[static_cast<std::size_t>(i - 1)];
        H(c, 2) = -2.0 * cov.c_star[static_cast<std::size_t>(i - 1)];
        for (int j = 1; j <= m; ++j) {
            H(c, static_cast<std::size_t>(j) + 2) =
                (i == j) ? kPiSq / (12.0 * N_l)
                         : 2.0 * cov.c_dagger[static_cast<std::size_t>(i - 1)]
                                             [static_cast<std::size_t>(j - 1)];
        }
    }

    std::vector<double> minors;
    for (std::size_t order = 4; order <= dim; ++order) {
        linalg::Matrix sub(order, order);
        for (std::size_t i = 0; i < order; ++i)
            for (std::size_t j = 0; j < order; ++j) sub(i, j) = H(i, j);
        minors.push_back(linalg::determinant(std::move(sub)));
    }
    return minors;
}

double jackknife_estimate(const std::vector<double>& series,
                          const SubsamplePlan& plan,
                          const JackknifeWeights& weights, double alpha) {
    if (static_cast<int>(weights.w_sub.size()) != plan.m)
        throw std::invalid_argument("jackknife_estimate: weight count does not match plan");
    const double d_full = lpr::lpr_estimate(series, alpha).d;
    const auto blocks = subsample(series, plan);
    double acc = weights.w_n * d_full;
    for (int i = 0; i < plan.m; ++i) {
        double d_i;
        try {
            d_i = lpr::lpr_estimate(blocks[static_cast<std::size_t>(i)], alpha).d;
        } catch (const std::exception& e) {
            throw numerical_error("jackknife_estimate: sub-sample " + std::to_string(i + 1) +
                                  " failed: " + e.what());
        }
        acc -= weights.w_sub[static_cast<std::size_t>(i)] * d_i;
    }
    return acc;
}

std::vector<double> fractional_difference(const std::vector<double>& series, double d) {
    const std::size_t n = series.size();
    // binomial coefficients of (1-B)^d: pi_0 = 1, pi_j = pi_{j-1} (j-1-d)/j
    std::vector<double> pi(n);
    pi[0] = 1.0;
    for (std::size_t j = 1; j < n; ++j)
        pi[j] = pi[j - 1] * (static_cast<double>(j) - 1.0 - d) / static_cast<double>(j);
    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= t; ++j) acc += pi[j] * series[t - j];
        out[t] = acc;
    }
    return out;
}

namespace {

// Partial-autocorrelation parametrization of a stationary AR block: maps
// kappa in (-1,1)^p to coefficients a of x_t = sum a_i x_{t-i} + e.
std::vector<double> pacf_to_ar(const std::vector<double>& kappa) {
    std::vector<double> a;
    for (std::size_t j = 0; j < kappa.size(); ++j) {
        std::vector<double> next(j + 1);
        next[j] = kappa[j];
        for (std::size_t i = 0; i < j; ++i) next[i] = a[i] - kappa[j] * a[j - 1 - i];
        a = std::move(next);
    }
    return a;
}

// CSS residuals of (1 + phi B) w = (1 + theta B) e with zero pre-sample values.
double css_objective(const std::vector<double>& w, const std::vector<double>& phi,
                     const std::vector<double>& theta) {
    const std::size_t p = phi.size(), q = theta.size(), n = w.size();
    std::vector<double> e(n);
    double ssr = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        double v = w[t];
        for (std::size_t i = 1; i <= p && i <= t; ++i) v += phi[i - 1] * w[t - i];
        for (std::size_t j = 1; j <= q && j <= t; ++j) v -= theta[j - 1] * e[t - j];
        e[t] = v;
        ssr += v * v;
    }
    return ssr;
}

} // namespace

ArmaFit fit_arma_css(const std::vector<double>& series, int p, int q) {
    if (p < 0 || q < 0) throw std::invalid_argument("fit_arma_css: negative order");
    ArmaFit fit;
    if (p == 0 && q == 0) {
        fit.css = css_objective(series, {}, {});
        return fit;
    }
    if (series.size() < static_cast<std::size_t>(p + q + 2))
        throw std::invalid_argument("fit_arma_css: series too short for the requested order");

    const std::size_t dim = static_cast<std::size_t>(p + q);
    auto unpack = [p, q](const std::vector<double>& kappa) {
        std::vector<double> kar(kappa.begin(), kappa.begin() + p);
        std::vector<double> kma(kappa.begin() + p, kappa.end());
        // phi = -a for the (1 + phi B) convention; same mapping for theta
        std::vector<double> phi = pacf_to_ar(kar);
        for (double& v : phi) v = -v;
        std::vector<double> theta = pacf_to_ar(kma);
        for (double& v : theta) v = -v;
        return std::pair{phi, theta};
    };

    auto objective = [&](const std::vector<double>& kappa) {
        auto [phi, theta] = unpack(kappa);
        return css_objective(series, phi, theta);
    };

    const std::vector<double> lo(dim, -0.999), hi(dim, 0.999);
    auto res = optim::nelder_mead(objective, std::vector<double>(dim, 0.0), lo, hi, 1e-8);
    if (!res.converged && res.evals == 0)
        throw numerical_error("fit_arma_css: optimizer failed");
    auto [phi, theta] = unpack(res.x);
    fit.ar = std::move(phi);
    fit.ma = std::move(theta);
    fit.css = res.fx;
    return fit;
}

FeasibleResult feasible_jackknife(const std::vector<double>& series,
                                  const SubsamplePlan& plan, double alpha,
                                  int p, int q, const IterationConfig& cfg) {
    const int n = static_cast<int>(series.size());
    if (plan.l * plan.m != n)
        throw std::invalid_argument("feasible_jackknife: plan does not match series length");

    altest::GsConfig gs_cfg;
    gs_cfg.base_bandwidth_exponent = alpha;
    double d_prefilter = altest::gs_estimate(series, gs_cfg);

    FeasibleResult out;
    double previous = std::numeric_limits<double>::quiet_NaN();
    for (int k = 1; k <= cfg.max_iter; ++k) {
        FeasibleTraceEntry entry;
        entry.d_prefilter = d_prefilter;

        arfima::ArfimaModel model;
        model.d = std::clamp(d_prefilter, -0.499, 0.499);
        if (p > 0 || q > 0) {
            const auto filtered = fractional_difference(series, d_prefilter);
            ArmaFit fit;
            try {
                fit = fit_arma_css(filtered, p, q);
            } catch (const std::exception& e) {
                throw numerical_error(std::string("feasible_jackknife: ARMA fit failed in the "
                                                  "prerequisite step: ") + e.what());
            }
            model.ar = fit.ar;
            model.ma = fit.ma;
            entry.ar_fit = fit.ar;
            entry.ma_fit = fit.ma;
        }

        const auto cov = estimator_covariances(model, n, plan, alpha);
        JackknifeWeights weights = optimal_weights(n, plan, alpha, cov);
        weights.provenance = WeightProvenance::feasible_iteration;
        weights.iteration = k;

        const double d_k = jackknife_estimate(series, plan, weights, alpha);
        entry.d_jackknife = d_k;
        out.trace.push_back(std::move(entry));
        out.d = d_k;
        out.iterations = k;

        const double gate = (k == 1) ? cfg.tau0.value_or(cfg.tau) : cfg.tau;
        if (k == 1) {
            if (std::isinf(gate)) {  // tau^(0) = +inf accepts the first iterate
                out.converged = true;
                return out;
            }
        } else if (std::abs(d_k - previous) <= gate) {
            out.converged = true;
            return out;
        }
        previous = d_k;
        d_prefilter = d_k;
    }
    out.converged = false;
    return out;
}

} // namespace longmem::jackknife
