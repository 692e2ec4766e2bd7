#pragma once
// The raw log-periodogram regression estimator and its theoretical bias and
// variance references.

#include <vector>

#include "longmem/arfima.hpp"
#include "longmem/spectral.hpp"

namespace longmem::lpr {

struct LprEstimate {
    double d = 0.0;
    int N = 0;  // frequencies used
};

// OLS slope transform d = -0.5 * sum a_j z_j / S_xx over the centered log
// ordinates z_j = log I(lambda_j). Throws on a zero periodogram ordinate
// (e.g. constant input). The estimate is not clamped to (-0.5, 0.5).
LprEstimate lpr_estimate(const std::vector<double>& series, double alpha);

// Same regression core applied to externally supplied log ordinates; used by
// the bandwidth-family estimators and the exact-fit tests.
double lpr_from_log_ordinates(const std::vector<double>& z,
                              const spectral::LprRegressors& reg);

// Regression core from a periodogram restricted to its first N ordinates.
double lpr_from_periodogram(const std::vector<double>& periodogram, int N,
                            const spectral::SpectralGrid& grid);

// pi^2 / (24 N)
double lpr_theoretical_variance(int N);

// Leading bias term -(2 pi^2 / 9) (f*''(0)/f*(0)) (N^2/n^2).
double lpr_theoretical_bias(const arfima::ArfimaModel& model, int n, int N);

} // namespace longmem::lpr
