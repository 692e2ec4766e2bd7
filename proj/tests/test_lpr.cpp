#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "longmem/lpr.hpp"
#include "longmem/rng.hpp"

#include <cmath>
#include <vector>

using namespace longmem;

namespace {
constexpr double kPiSq = 9.86960440108935861883449099988;
} // namespace

TEST_CASE("exact-fit regression: synthetic log-linear periodogram recovers d to 1e-12") {
    const auto grid = spectral::SpectralGrid::make(576, 0.65);
    const auto reg = spectral::lpr_regressors(grid);
    const double c = 0.3, d = 0.2;
    std::vector<double> z(reg.x.size());
    for (std::size_t j = 0; j < z.size(); ++j) z[j] = c - 2.0 * d * reg.x[j];
    CHECK(lpr::lpr_from_log_ordinates(z, reg) == doctest::Approx(d).epsilon(1e-13));

    // through the periodogram entry point: I = exp(c - 2 d x_j)
    std::vector<double> I(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) I[j] = std::exp(z[j]);
    CHECK(lpr::lpr_from_periodogram(I, grid.N, grid) == doctest::Approx(d).epsilon(1e-13));
}

TEST_CASE("degenerate input: constant series raises the zero-ordinate error") {
    std::vector<double> y(96, 2.0);
    CHECK_THROWS_WITH_AS(lpr::lpr_estimate(y, 0.65).d,
                         doctest::Contains("zero periodogram ordinate"),
                         longmem::numerical_error);
}

TEST_CASE("location and scale invariance") {
    RngStream rng(31, 4);
    std::vector<double> y(576);
    for (auto& v : y) v = rng.next_normal();
    const double base = lpr::lpr_estimate(y, 0.65).d;

    for (double c : {1.0, -3.5, 10.0}) {
        auto shifted = y;
        for (auto& v : shifted) v += c;
        CHECK(std::abs(lpr::lpr_estimate(shifted, 0.65).d - base) <= 1e-12);
    }
    for (double s : {2.0, 0.001, 1e6}) {
        auto scaled = y;
        for (auto& v : scaled) v *= s;
        CHECK(std::abs(lpr::lpr_estimate(scaled, 0.65).d - base) <= 1e-12);
    }
}

TEST_CASE("returned bandwidth and basic preconditions") {
    RngStream rng(3, 3);
    std::vector<double> y(96);
    for (auto& v : y) v = rng.next_normal();
    const auto est = lpr::lpr_estimate(y, 0.65);
    CHECK(est.N == 19);
    std::vector<double> tiny(3, 1.0);
    CHECK_THROWS(lpr::lpr_estimate(tiny, 0.65));
}

TEST_CASE("theoretical variance pi^2/(24N)") {
    CHECK(lpr::lpr_theoretical_variance(62) == doctest::Approx(kPiSq / (24.0 * 62)));
    CHECK(lpr::lpr_theoretical_variance(62) == doctest::Approx(0.0066328).epsilon(1e-4));
    CHECK(lpr::lpr_theoretical_variance(24) == doctest::Approx(kPiSq / 576.0));
    CHECK(lpr::lpr_theoretical_variance(1) == doctest::Approx(kPiSq / 24.0));
    CHECK_THROWS(lpr::lpr_theoretical_variance(0));
}

TEST_CASE("theoretical bias: white noise zero, AR(1) sign and n-scaling") {
    arfima::ArfimaModel wn;
    CHECK(lpr::lpr_theoretical_bias(wn, 576, 62) == doctest::Approx(0.0).epsilon(1e-9));

    arfima::ArfimaModel m;
    m.ar = {0.4};  // positive f*''/f*(0) -> negative bias, as in the phi0=0.4 rows
    const double bias = lpr::lpr_theoretical_bias(m, 576, 62);
    CHECK(bias < 0.0);
    // analytic ratio 2 phi/(1+phi)^2 = 0.40816...
    const double expected = -(2.0 * kPiSq / 9.0) * (2.0 * 0.4 / (1.4 * 1.4)) *
                            (62.0 * 62.0) / (576.0 * 576.0);
    CHECK(bias == doctest::Approx(expected).epsilon(1e-5));

    // quadrupling n at fixed N divides by 16
    CHECK(lpr::lpr_theoretical_bias(m, 4 * 576, 62) ==
          doctest::Approx(bias / 16.0).epsilon(1e-9));
}
