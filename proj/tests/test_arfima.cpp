#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "longmem/arfima.hpp"
#include "longmem/rng.hpp"

#include <cmath>
#include <numeric>
#include <vector>

using namespace longmem;
using arfima::ArfimaModel;

namespace {

constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kTwoPi = 6.283185307179586476925286766559;

ArfimaModel white_noise() { return {}; }

ArfimaModel ar1(double phi, double d = 0.0) {
    ArfimaModel m;
    m.d = d;
    m.ar = {phi};
    return m;
}

ArfimaModel ma1(double theta, double d = 0.0) {
    ArfimaModel m;
    m.d = d;
    m.ma = {theta};
    return m;
}

// polynomial evaluation oracle for |1 + sum c_k e^{-ikl}|^2
double poly_abs2_oracle(const std::vector<double>& c, double lambda) {
    double re = 1.0, im = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        re += c[k] * std::cos(-lambda * (k + 1));
        im += c[k] * std::sin(-lambda * (k + 1));
    }
    return re * re + im * im;
}

} // namespace

TEST_CASE("model validation") {
    CHECK_NOTHROW(white_noise().validate());
    CHECK_NOTHROW(ar1(0.9).validate());
    CHECK_NOTHROW(ar1(-0.9, 0.45).validate());
    ArfimaModel bad_d;
    bad_d.d = 0.5;
    CHECK_THROWS(bad_d.validate());
    CHECK_THROWS(ar1(1.0).validate());
    CHECK_THROWS(ar1(-1.3).validate());
    ArfimaModel bad_sigma;
    bad_sigma.sigma2 = 0.0;
    CHECK_THROWS(bad_sigma.validate());
    ArfimaModel ar2;
    ar2.ar = {-1.5, 0.56};  // roots 1/0.7, 1/0.8 outside the unit circle
    CHECK_NOTHROW(ar2.validate());
    ar2.ar = {-1.8, 0.81};  // root on 1/0.9 double; still outside
    CHECK_NOTHROW(ar2.validate());
    ar2.ar = {-2.0, 1.0};  // unit root
    CHECK_THROWS(ar2.validate());
}

TEST_CASE("arma_spectral_factor: white noise, AR and MA polynomial oracles") {
    CHECK(arfima::arma_spectral_factor(white_noise(), 1.0) ==
          doctest::Approx(1.0 / kTwoPi).epsilon(1e-14));

    auto m = ar1(0.4);
    CHECK(arfima::arma_spectral_factor(m, 0.0) ==
          doctest::Approx((1.0 / kTwoPi) / (1.4 * 1.4)).epsilon(1e-14));
    for (double lambda : {0.1, 0.7, 2.2, kPi})
        CHECK(arfima::arma_spectral_factor(m, lambda) ==
              doctest::Approx((1.0 / kTwoPi) / poly_abs2_oracle(m.ar, lambda)).epsilon(1e-13));

    auto mm = ma1(0.9);
    CHECK(arfima::arma_spectral_factor(mm, kPi) ==
          doctest::Approx((1.0 / kTwoPi) * 0.1 * 0.1).epsilon(1e-12));
}

TEST_CASE("spectral_density: values, evenness, positivity, pole handling") {
    ArfimaModel wn;
    CHECK(arfima::spectral_density(wn, 0.3) == doctest::Approx(1.0 / kTwoPi));

    ArfimaModel fd;  // d = 0.25 pure fractional
    fd.d = 0.25;
    CHECK(arfima::spectral_density(fd, kPi) ==
          doctest::Approx(std::pow(2.0, -0.5) / kTwoPi).epsilon(1e-14));

    auto m = ar1(-0.4, 0.25);
    const double direct = std::pow(2.0 * std::sin(0.05), -0.5) *
                          arfima::arma_spectral_factor(m, 0.1);
    CHECK(arfima::spectral_density(m, 0.1) == doctest::Approx(direct).epsilon(1e-14));

    // even in lambda via the ARMA factor and strictly positive on (0, pi]
    for (double lambda = 0.05; lambda <= kPi; lambda += 0.3) {
        CHECK(arfima::arma_spectral_factor(m, lambda) ==
              doctest::Approx(arfima::arma_spectral_factor(m, -lambda)).epsilon(1e-13));
        CHECK(arfima::spectral_density(m, lambda) > 0.0);
    }

    CHECK_THROWS(arfima::spectral_density(fd, 0.0));   // pole for d > 0
    CHECK_THROWS(arfima::spectral_density(fd, -0.1));
    CHECK_THROWS(arfima::spectral_density(fd, 4.0));
}

TEST_CASE("fstar second derivative: white noise, AR(1) symbolic oracle, m^2 scaling") {
    CHECK(arfima::fstar_second_derivative_at_zero(white_noise()) ==
          doctest::Approx(0.0).epsilon(1e-10));

    // f* = (1/2pi)/(1 + phi^2 + 2 phi cos l); f*''(0) = (1/2pi) 2 phi/(1+phi)^4
    const double phi = 0.4;
    auto m = ar1(phi);
    const double analytic = (1.0 / kTwoPi) * 2.0 * phi / std::pow(1.0 + phi, 4.0);
    CHECK(arfima::fstar_second_derivative_at_zero(m) ==
          doctest::Approx(analytic).epsilon(1e-6));

    // sub-sample scaling: same stencil on lambda -> s*lambda multiplies by s^2
    const int s = 3;
    const double h = 1e-3;
    auto f = [&](double lambda) { return arfima::arma_spectral_factor(m, s * lambda); };
    const double scaled =
        (-2.0 * f(2.0 * h) + 32.0 * f(h) - 30.0 * f(0.0)) / (12.0 * h * h);
    CHECK(scaled == doctest::Approx(s * s * arfima::fstar_second_derivative_at_zero(m))
                        .epsilon(1e-5));
}

TEST_CASE("autocovariances: quadrature vs closed forms") {
    // white noise
    auto g = arfima::autocovariances(white_noise(), 3);
    CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(g[1]) < 1e-9);
    CHECK(std::abs(g[3]) < 1e-9);

    // fractional noise closed form gamma_0 = Gamma(1-2d)/Gamma(1-d)^2
    ArfimaModel fd;
    fd.d = 0.25;
    const double gamma0 =
        std::exp(std::lgamma(1.0 - 2.0 * fd.d) - 2.0 * std::lgamma(1.0 - fd.d));
    auto gq = arfima::autocovariances(fd, 8);
    CHECK(gq[0] == doctest::Approx(gamma0).epsilon(1e-8));

    // AR(1) with conventional coefficient a = -phi = 0.4: gamma_k = a^k/(1-a^2)
    auto m = ar1(-0.4);
    auto ga = arfima::autocovariances(m, 6);
    for (int k = 0; k <= 6; ++k)
        CHECK(ga[static_cast<std::size_t>(k)] ==
              doctest::Approx(std::pow(0.4, k) / (1.0 - 0.16)).epsilon(1e-8));
}

TEST_CASE("autocovariances: exact path agrees with quadrature across models") {
    std::vector<ArfimaModel> models = {white_noise(), ar1(0.4), ar1(-0.9),
                                       ma1(0.9), ar1(-0.4, 0.25), ma1(0.4, -0.25)};
    ArfimaModel arma11;
    arma11.d = 0.45;
    arma11.ar = {0.4};
    arma11.ma = {-0.4};
    models.push_back(arma11);
    ArfimaModel ar2;  // complex-root AR(2)
    ar2.d = 0.2;
    ar2.ar = {-1.2, 0.72};
    models.push_back(ar2);
    for (const auto& m : models) {
        const auto exact = arfima::autocovariances_exact(m, 16);
        const auto quad = arfima::autocovariances(m, 16);
        for (int k = 0; k <= 16; ++k)
            CHECK(exact[static_cast<std::size_t>(k)] ==
                  doctest::Approx(quad[static_cast<std::size_t>(k)])
                      .epsilon(1e-8)
                      .scale(std::max(1.0, exact[0])));
    }
}

TEST_CASE("autocovariances define a positive-definite Toeplitz matrix (Cholesky via DL)") {
    std::vector<ArfimaModel> models = {ar1(0.9, 0.45), ar1(-0.9, -0.25), ma1(-0.9, 0.25),
                                       ma1(0.9, 0.45)};
    for (const auto& m : models) {
        const auto g = arfima::autocovariances_exact(m, 64);
        // DL whitening walks the Cholesky; it throws if any pivot fails
        std::vector<double> probe(65, 0.1);
        CHECK_NOTHROW(arfima::dl_whiten(g, probe));
    }
}

TEST_CASE("simulate: determinism, moments, d=0 exactness") {
    auto m = white_noise();
    RngStream r1(77, 5), r2(77, 5);
    const auto y1 = arfima::simulate(m, 512, r1);
    const auto y2 = arfima::simulate(m, 512, r2);
    CHECK(y1 == y2);  // bitwise

    RngStream r3(1234, 0);
    const int n = 100000;
    const auto y = arfima::simulate(m, n, r3);
    double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    var /= n;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("simulate: mean parameter shifts the draw") {
    ArfimaModel m;
    m.mu = 3.5;
    RngStream r1(9, 9), r2(9, 9);
    const auto y = arfima::simulate(m, 256, r1);
    ArfimaModel m0;
    const auto y0 = arfima::simulate(m0, 256, r2);
    for (std::size_t i = 0; i < y.size(); ++i)
        CHECK(y[i] == doctest::Approx(y0[i] + 3.5).epsilon(1e-12));
}
