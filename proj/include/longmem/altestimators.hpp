#pragma once
// Comparator estimators: the weighted-average (GS) estimator over a bandwidth
// family, the Gaussian profile MLE, and the pre-whitened CSS estimator.

#include <optional>
#include <vector>

#include "longmem/arfima.hpp"

namespace longmem::altest {

struct GsConfig {
    int r = 1;                        // bias-reduction order
    std::vector<double> q_grid;       // default 1.00, 1.05, ..., 2.00
    std::optional<double> delta;      // overrides gs_delta when set
    double base_bandwidth_exponent = 0.65;
    std::optional<int> bandwidth;     // externally supplied N_n (Opt-GS hook)
    bool intercept_only = false;      // diagnostic: GLS mean of the family

    GsConfig();
    void validate() const;
};

// tau*_r = -(2 pi)^{2r} r / ((2r)! (2r+1)^2), reading the printed definition
// as carrying index r. For r = 1 this is -2 pi^2 / 9.
double gs_tau_star(int r);

// delta = tau_r / (tau*_r sum_p q_p^{2+2r}). The source for tau_r is external
// to this project and unavailable; the default takes tau_r = tau*_r, giving
// 1 / sum_p q_p^{2+2r}, and GsConfig.delta overrides the value entirely.
double gs_delta(int r, const std::vector<double>& q_grid);

// Two-step weighted-average estimator: slope estimates at bandwidths
// floor(q_i N_n), combined by GLS with Omega_{ij} = 1/max(q_i, q_j) against
// the design z_i = (1, q_i^2, ..., q_i^{2r}, q_i^{2+2r} - delta sum_p q_p^{2+2r}).
// Returns the first GLS component.
double gs_estimate(const std::vector<double>& series, const GsConfig& cfg = {});

// Step 2 alone: the GLS combination of an externally supplied family of
// slope estimates (one per q grid point).
double gs_combine(const std::vector<double>& dhat_family, const GsConfig& cfg);

struct MleParams {
    double d = 0.0;
    std::vector<double> ar, ma;
};

// Profile log-likelihood
//   L = -(n/2) log[(y - mu 1)' Sigma^{-1} (y - mu 1)] - (1/2) log|Sigma|
// with Sigma built from unit-innovation-variance autocovariances and mu the
// GLS mean; the Toeplitz solve runs through the Durbin-Levinson whitening.
double mle_profile_loglik(const std::vector<double>& series, const MleParams& params);

// Maximizes the profile likelihood over d in (-0.499, 0.499) and, unless
// fix_short is given, over the ARMA coefficients within the stationarity/
// invertibility region (three starts over d).
MleParams fit_mle(const std::vector<double>& series, int p, int q,
                  const std::optional<MleParams>& fix_short = std::nullopt);

// Pre-whitened estimator: fit ARMA(p,q) by conditional sum of squares (or
// take fix_short), filter the series by the fitted ARMA inverse, then
// minimize over d the sum of squared residuals of the (1-B)^d filter applied
// to the whitened series.
double fit_pw(const std::vector<double>& series, int p, int q,
              const std::optional<MleParams>& fix_short = std::nullopt);

} // namespace longmem::altest
