#include "longmem/lpr.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace longmem::lpr {

namespace {
constexpr double kPiSq = 9.86960440108935861883449099988;
} // namespace

double lpr_from_log_ordinates(const std::vector<double>& z,
                              const spectral::LprRegressors& reg) {
    if (z.size() != reg.a.size())
        throw std::invalid_argument("lpr_from_log_ordinates: dimension mismatch");
    double num = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) num += reg.a[j] * z[j];
    return -0.5 * num / reg.sxx;
}

double lpr_from_periodogram(const std::vector<double>& periodogram, int N,
                            const spectral::SpectralGrid& grid) {
    if (N < 2 || static_cast<std::size_t>(N) > periodogram.size() ||
        static_cast<std::size_t>(N) > grid.lambdas.size())
        throw std::invalid_argument("lpr_from_periodogram: invalid bandwidth");
    spectral::SpectralGrid sub = grid;
    sub.N = N;
    sub.lambdas.assign(grid.lambdas.begin(), grid.lambdas.begin() + N);
    const auto reg = spectral::lpr_regressors(sub);
    std::vector<double> z(static_cast<std::size_t>(N));
    for (int j = 0; j < N; ++j) {
        const double I = periodogram[static_cast<std::size_t>(j)];
        if (!(I > 0.0) || !std::isfinite(I))
            throw numerical_error("lpr_estimate: zero periodogram ordinate at frequency index " +
                                  std::to_string(j + 1));
        z[static_cast<std::size_t>(j)] = std::log(I);
    }
    return lpr_from_log_ordinates(z, reg);
}

LprEstimate lpr_estimate(const std::vector<double>& series, double alpha) {
    if (series.size() < 4) throw std::invalid_argument("lpr_estimate: series length must be >= 4");
    const auto grid = spectral::SpectralGrid::make(static_cast<int>(series.size()), alpha);
    const auto pgram = spectral::periodogram(series, grid);
    LprEstimate out;
    out.N = grid.N;
    out.d = lpr_from_periodogram(pgram.values, grid.N, grid);
    return out;
}

double lpr_theoretical_variance(int N) {
    if (N < 1) throw std::invalid_argument("lpr_theoretical_variance: N must be >= 1");
    return kPiSq / (24.0 * N);
}

double lpr_theoretical_bias(const arfima::ArfimaModel& model, int n, int N) {
    model.validate();
    const double ratio = arfima::fstar_second_derivative_at_zero(model) /
                         arfima::arma_spectral_factor(model, 0.0);
    const double nn = static_cast<double>(N) / static_cast<double>(n);
    return -(2.0 * kPiSq / 9.0) * ratio * nn * nn;
}

} // namespace longmem::lpr
