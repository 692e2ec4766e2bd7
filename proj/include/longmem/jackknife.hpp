#pragma once
// Sub-sampling schemes, the periodogram covariance engine, Chambers and
// optimal jackknife weights, the jackknife estimator, the bordered-Hessian
// diagnostic, and the iterative feasible procedure.

#include <optional>
#include <string>
#include <vector>

#include "longmem/arfima.hpp"
#include "longmem/lpr.hpp"
#include "longmem/specfun.hpp"

namespace longmem::jackknife {

enum class Scheme { non_overlapping, moving_block };

const char* scheme_name(Scheme s);

struct SubsamplePlan {
    Scheme scheme = Scheme::non_overlapping;
    int m = 2;  // sub-sample count
    int l = 0;  // sub-sample length, n/m

    // Requires n = m*l exactly.
    static SubsamplePlan make(int n, int m, Scheme scheme);

    // start offset i' of sub-sample i (1-based): (i-1)l non-overlapping, i-1
    // moving-block
    int offset(int i) const {
        return scheme == Scheme::non_overlapping ? (i - 1) * l : i - 1;
    }
};

// Blocks y_{i'+1} .. y_{i'+l} for i = 1..m.
std::vector<std::vector<double>> subsample(const std::vector<double>& series,
                                           const SubsamplePlan& plan);

enum class WeightProvenance { chambers, optimal, feasible_iteration };

// How the sub-sample short-memory curvature f*''(0) enters the
// bias-elimination constraint. A contiguous block of a stationary process
// has the same spectrum as the full sample, so its slope-estimator bias is
// -(2 pi^2/9)(f*''(0)/f*(0))(Nl/l)^2 with the unchanged curvature
// ("stationary", the default; this is the version under which the combined
// estimator's dominant bias actually cancels). "frequency_scaled" instead
// treats the sub-sample spectrum as a function of the full-sample frequency
// lambda = mu/m, which multiplies the curvature at zero by m^2 and shrinks
// the sub-sample weight mass accordingly; it is kept selectable because the
// closed-form weight expressions are usually quoted in that form.
enum class SubsampleCurvature { stationary, frequency_scaled };

// Constraint coefficient kappa multiplying (Nl/l)^2 in g2: 1 or m^2.
double curvature_factor(SubsampleCurvature scale, int m);

struct JackknifeWeights {
    double w_n = 0.0;
    std::vector<double> w_sub;
    std::optional<double> delta1, delta2;  // multipliers, optimal solve only
    WeightProvenance provenance = WeightProvenance::chambers;
    SubsampleCurvature curvature = SubsampleCurvature::stationary;
    int iteration = 0;  // populated for feasible iterates

    // g1 = w_n - sum w_i - 1,
    // g2 = (Nn^2/n^2) w_n - kappa (Nl^2/l^2) sum w_i with kappa from curvature
    double g1_residual() const;
    double g2_residual(int n, int N_n, int l, int N_l) const;

    // Throws unless |g1| <= 1e-10 and |g2| <= 1e-10.
    void check(int n, int N_n, int l, int N_l) const;

    // Test-only: bypasses the constraint check (degenerate-weight examples).
    static JackknifeWeights unchecked(double w_n, std::vector<double> w_sub);
};

// Closed-form bias-only weights from the two constraints alone:
// w_n = [1 - (Nn l / (Nl n))^2 / kappa]^{-1}, w_i = (w_n - 1)/m.
JackknifeWeights chambers_weights(int n, int m, double alpha,
                                  SubsampleCurvature scale = SubsampleCurvature::stationary);

struct CovarianceDiagnostics {
    long clip_events = 0;        // rho clipped into [0, 1-1e-9]
    long truncated_series = 0;   // covariance series hit max_terms
};

// Correlation between periodogram ordinates at lambda and mu for block
// length l:
//   [3/l + (1/l^2)(|D(l-m)|^2 + |D(l+m)|^2) f(lambda)/f(mu)] /
//   sqrt(1+3/l+|D(2l)|^2/l^2) sqrt(1+3/l+|D(2m)|^2/l^2)
// with |D(x)|^2 the squared-modulus Dirichlet products. The result is
// clipped to [0, 1-1e-9] before use in the log-covariance series; clips are
// counted through the optional diagnostics pointer.
double periodogram_correlation(const arfima::ArfimaModel& model, int l,
                               double lambda, double mu,
                               CovarianceDiagnostics* diag = nullptr);

struct CovarianceBundle {
    std::vector<double> c_star;            // c*_{n,i}, i = 1..m
    std::vector<std::vector<double>> c_dagger;  // m x m symmetric, zero diagonal
    arfima::ArfimaModel model_used;
    SubsamplePlan plan;
    double alpha = 0.0;
    CovarianceDiagnostics diagnostics;
};

// Covariances between the full-sample and sub-sample slope estimators and
// between distinct sub-sample estimators:
//   c*_{n,i} = (4 Sxx Sxx')^{-1} sum_j sum_k a_j a'_k C(rho(lambda_j, mu_k)^2)
//   c+_{i,j} = (4 Sxx'^2)^{-1}  sum_j sum_k a'_j a'_k C(rho(mu_j, mu_k)^2)
// The printed correlation carries no sub-sample index, so c* is computed once
// and replicated across i, and the off-diagonal c+ is a single value.
CovarianceBundle estimator_covariances(const arfima::ArfimaModel& model, int n,
                                       const SubsamplePlan& plan, double alpha);

// Variance-minimizing weights from the (m+3)x(m+3) first-order-condition
// system A w = e_1. The returned w_n is verified against the two-constraint
// closed form to 1e-8 and both constraints to 1e-10; violations throw
// (assembly bug signal).
JackknifeWeights optimal_weights(int n, const SubsamplePlan& plan, double alpha,
                                 const CovarianceBundle& cov,
                                 SubsampleCurvature scale = SubsampleCurvature::stationary);

// Determinants of the leading principal minors of the bordered Hessian, for
// orders 4..m+3 (the 4x4 head is the base case (Nn^2/n^2 - kappa Nl^2/l^2)^2;
// smaller leading minors vanish identically because of the zero
// constraint-constraint block). Positivity is reported, not assumed.
std::vector<double> bordered_hessian_minors(int n, const SubsamplePlan& plan,
                                            double alpha,
                                            const CovarianceBundle& cov,
                                            SubsampleCurvature scale = SubsampleCurvature::stationary);

// w_n d_n - sum_i w_i d_i with full-sample bandwidth floor(n^alpha) and
// sub-sample bandwidth floor(l^alpha).
double jackknife_estimate(const std::vector<double>& series,
                          const SubsamplePlan& plan,
                          const JackknifeWeights& weights, double alpha);

struct IterationConfig {
    double tau = 1e-4;      // constant tolerance schedule
    int max_iter = 20;
    std::optional<double> tau0;  // overrides tau for the first comparison
};

struct FeasibleTraceEntry {
    double d_prefilter = 0.0;
    std::vector<double> ar_fit, ma_fit;
    double d_jackknife = 0.0;
};

struct FeasibleResult {
    double d = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<FeasibleTraceEntry> trace;
};

// Iterative feasible jackknife: prefilter at the GS estimate, fit ARMA(p,q)
// by conditional sum of squares on the fractionally differenced series
// (skipped when p = q = 0), build the covariance bundle and optimal weights
// from the estimated model, and iterate the prefilter at the latest jackknife
// value until successive estimates move by less than tau.
FeasibleResult feasible_jackknife(const std::vector<double>& series,
                                  const SubsamplePlan& plan, double alpha,
                                  int p, int q, const IterationConfig& cfg = {});

// (1-B)^d with full-length truncated binomial coefficients.
std::vector<double> fractional_difference(const std::vector<double>& series, double d);

// Conditional-sum-of-squares ARMA(p,q) fit with stationarity/invertibility
// box constraints; returns coefficients of (1 + phi B), (1 + theta B).
struct ArmaFit {
    std::vector<double> ar, ma;
    double css = 0.0;
};
ArmaFit fit_arma_css(const std::vector<double>& series, int p, int q);

} // namespace longmem::jackknife
