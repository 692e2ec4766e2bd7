#include "longmem/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>

namespace longmem::spectral {

namespace {

constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kTwoPi = 6.283185307179586476925286766559;

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// FFTW plans are not thread-safe to create; each thread keeps its own cache.
struct PlanEntry {
    fftw_plan plan = nullptr;
    double* in = nullptr;
    fftw_complex* out = nullptr;

    ~PlanEntry() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (plan) fftw_destroy_plan(plan);
        if (in) fftw_free(in);
        if (out) fftw_free(out);
    }
};

PlanEntry& plan_for(int n) {
    thread_local std::map<int, PlanEntry> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        PlanEntry& e = cache[n];
        e.in = fftw_alloc_real(static_cast<std::size_t>(n));
        e.out = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
        e.plan = fftw_plan_dft_r2c_1d(n, e.in, e.out, FFTW_ESTIMATE);
        if (!e.plan) throw numerical_error("periodogram: FFTW plan creation failed");
        return e;
    }
    return it->second;
}

// |DFT bin j|^2 for j = 0..n/2 of the 0-indexed series.
std::vector<double> fft_power(const std::vector<double>& series) {
    const int n = static_cast<int>(series.size());
    PlanEntry& e = plan_for(n);
    for (int t = 0; t < n; ++t) e.in[t] = series[static_cast<std::size_t>(t)];
    fftw_execute(e.plan);
    std::vector<double> power(static_cast<std::size_t>(n / 2 + 1));
    for (int j = 0; j <= n / 2; ++j)
        power[static_cast<std::size_t>(j)] =
            e.out[j][0] * e.out[j][0] + e.out[j][1] * e.out[j][1];
    return power;
}

} // namespace

int bandwidth(int n, double alpha) {
    if (n < 4) throw std::invalid_argument("bandwidth: n must be >= 4");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("bandwidth: alpha must lie in (0, 1)");
    const long double nl = static_cast<long double>(n);
    const long double al = static_cast<long double>(alpha);
    long long k = static_cast<long long>(std::floor(std::pow(nl, al)));
    // verify k^(1/alpha) <= n < (k+1)^(1/alpha)
    while (std::pow(static_cast<long double>(k + 1), 1.0L / al) <= nl) ++k;
    while (k > 0 && std::pow(static_cast<long double>(k), 1.0L / al) > nl) --k;
    if (k < 2)
        throw std::invalid_argument("bandwidth: floor(n^alpha) below 2; regression needs >= 2 points");
    return static_cast<int>(k);
}

SpectralGrid SpectralGrid::make(int n, double alpha) {
    SpectralGrid g;
    g.n = n;
    g.alpha = alpha;
    g.N = bandwidth(n, alpha);
    if (!(g.N >= 1 && g.N < n / 2.0))
        throw std::invalid_argument("SpectralGrid: bandwidth must satisfy 1 <= N < n/2");
    g.lambdas.resize(static_cast<std::size_t>(g.N));
    for (int j = 1; j <= g.N; ++j)
        g.lambdas[static_cast<std::size_t>(j - 1)] = kTwoPi * j / n;
    return g;
}

LprRegressors lpr_regressors(const SpectralGrid& grid) {
    LprRegressors r;
    const std::size_t N = grid.lambdas.size();
    r.x.resize(N);
    for (std::size_t j = 0; j < N; ++j)
        r.x[j] = std::log(2.0 * std::sin(0.5 * grid.lambdas[j]));
    double mean = 0.0;
    for (double v : r.x) mean += v;
    mean /= static_cast<double>(N);
    r.xbar = mean;
    r.a.resize(N);
    r.sxx = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
        r.a[j] = r.x[j] - mean;
        r.sxx += r.a[j] * r.a[j];
    }
    return r;
}

PeriodogramSet periodogram(const std::vector<double>& series, const SpectralGrid& grid) {
    if (static_cast<int>(series.size()) != grid.n)
        throw std::invalid_argument("periodogram: series length does not match grid");
    const int n = grid.n;
    const std::vector<double> power = fft_power(series);
    PeriodogramSet out;
    out.grid = grid;
    out.values.resize(static_cast<std::size_t>(grid.N));
    const double scale = 1.0 / (kTwoPi * n);
    for (int j = 1; j <= grid.N; ++j)
        out.values[static_cast<std::size_t>(j - 1)] = power[static_cast<std::size_t>(j)] * scale;
    return out;
}

std::vector<double> periodogram_all(const std::vector<double>& series) {
    const int n = static_cast<int>(series.size());
    if (n < 2) throw std::invalid_argument("periodogram_all: series too short");
    const std::vector<double> power = fft_power(series);
    std::vector<double> out(static_cast<std::size_t>(n - 1));
    const double scale = 1.0 / (kTwoPi * n);
    for (int j = 1; j < n; ++j) {
        const int jj = (j <= n / 2) ? j : n - j;  // real input: I(n-j) = I(j)
        out[static_cast<std::size_t>(j - 1)] = power[static_cast<std::size_t>(jj)] * scale;
    }
    return out;
}

PeriodogramSet periodogram_direct(const std::vector<double>& series,
                                  const SpectralGrid& grid) {
    if (static_cast<int>(series.size()) != grid.n)
        throw std::invalid_argument("periodogram_direct: series length does not match grid");
    PeriodogramSet out;
    out.grid = grid;
    out.values.resize(static_cast<std::size_t>(grid.N));
    const double scale = 1.0 / (kTwoPi * grid.n);
    for (int j = 0; j < grid.N; ++j) {
        const double lambda = grid.lambdas[static_cast<std::size_t>(j)];
        double re = 0.0, im = 0.0;
        for (std::size_t t = 0; t < series.size(); ++t) {
            const double angle = -lambda * static_cast<double>(t + 1);
            re += series[t] * std::cos(angle);
            im += series[t] * std::sin(angle);
        }
        out.values[static_cast<std::size_t>(j)] = (re * re + im * im) * scale;
    }
    return out;
}

} // namespace longmem::spectral
