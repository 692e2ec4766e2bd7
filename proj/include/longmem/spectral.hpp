#pragma once
// Fourier frequencies, periodograms, and the log-periodogram regressor set,
// for the full sample and for sub-samples (same construction with n replaced
// by the block length).

#include <vector>

#include "longmem/errors.hpp"

namespace longmem::spectral {

// The Euler constant enters the regression model only as an intercept shift
// absorbed by OLS; kept here as a documented named constant.
inline constexpr double kEulerC = 0.57721566490153286060651209008;

struct SpectralGrid {
    int n = 0;            // sample count
    double alpha = 0.0;   // bandwidth exponent
    int N = 0;            // floor(n^alpha)
    std::vector<double> lambdas;  // 2*pi*j/n, j = 1..N

    static SpectralGrid make(int n, double alpha);
};

// floor(n^alpha) with a guard against floating-point boundary error.
// Throws std::invalid_argument when the result is below 2 (the regression
// needs at least two points).
int bandwidth(int n, double alpha);

struct LprRegressors {
    std::vector<double> x;  // log(2 sin(lambda_j/2))
    double xbar = 0.0;
    std::vector<double> a;  // x_j - xbar
    double sxx = 0.0;       // sum a_j^2
};

LprRegressors lpr_regressors(const SpectralGrid& grid);

struct PeriodogramSet {
    std::vector<double> values;  // I(lambda_j), j = 1..N
    SpectralGrid grid;
};

// I(lambda_j) = |(2 pi n)^{-1/2} sum_t y_t e^{-i lambda_j t}|^2 via a fast
// transform of length n. The series is not mean-centered: a constant mean
// contributes exactly zero at the j >= 1 Fourier frequencies.
PeriodogramSet periodogram(const std::vector<double>& series, const SpectralGrid& grid);

// All ordinates j = 1..n-1 (used by the Parseval check and sub-sample tests).
std::vector<double> periodogram_all(const std::vector<double>& series);

// Direct O(nN) summation of the same quantity; the validation oracle for the
// fast path.
PeriodogramSet periodogram_direct(const std::vector<double>& series,
                                  const SpectralGrid& grid);

} // namespace longmem::spectral
