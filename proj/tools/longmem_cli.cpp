// longmem: simulate ARFIMA series, estimate the fractional parameter, and
// run Monte Carlo bias/RMSE experiments.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "longmem/altestimators.hpp"
#include "longmem/harness.hpp"
#include "longmem/lpr.hpp"
#include "longmem/rng.hpp"

namespace {

std::vector<double> read_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open input file: " + path);
    std::vector<double> out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        // strip a trailing comma/whitespace so simple csv columns also work
        while (!line.empty() && (line.back() == ',' || line.back() == '\r' ||
                                 line.back() == ' '))
            line.pop_back();
        if (line.empty()) continue;
        try {
            std::size_t pos = 0;
            const double v = std::stod(line, &pos);
            out.push_back(v);
        } catch (const std::exception&) {
            if (first) {  // optional header
                first = false;
                continue;
            }
            throw std::invalid_argument("input line is not a number: " + line);
        }
        first = false;
    }
    if (out.empty()) throw std::invalid_argument("input file holds no data: " + path);
    return out;
}

void write_or_print(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "longmem: jackknife bias-corrected log-periodogram estimation of the "
        "fractional-differencing parameter of ARFIMA processes.\n"
        "Model convention: (1 + phi_1 B + ...)(1-B)^d (Y - mu) = "
        "(1 + theta_1 B + ...) eps; a conventional AR coefficient a maps to "
        "phi = -a."};
    app.require_subcommand(1);

    // ---- simulate
    auto* sim = app.add_subcommand("simulate", "draw one exact Gaussian ARFIMA sample");
    double sim_d = 0.0, sim_sigma2 = 1.0, sim_mu = 0.0;
    std::vector<double> sim_phi, sim_theta;
    int sim_n = 0;
    std::uint64_t sim_seed = 0;
    std::string sim_out;
    sim->add_option("--d", sim_d, "fractional parameter in (-0.5, 0.5)")->required();
    sim->add_option("--phi", sim_phi, "AR coefficients of (1 + phi B + ...)");
    sim->add_option("--theta", sim_theta, "MA coefficients of (1 + theta B + ...)");
    sim->add_option("--sigma2", sim_sigma2, "innovation variance (default 1)");
    sim->add_option("--mu", sim_mu, "process mean (default 0)");
    sim->add_option("--n", sim_n, "sample size")->required();
    sim->add_option("--seed", sim_seed, "RNG seed")->required();
    sim->add_option("--out", sim_out, "output path (default stdout)");

    // ---- estimate
    auto* est = app.add_subcommand("estimate", "estimate d from a series file");
    std::string est_input, est_name = "lpr", est_scheme = "no";
    double est_alpha = 0.65;
    int est_m = 2, est_p = 0, est_q = 0;
    double est_model_d = 0.0;
    std::vector<double> est_model_phi, est_model_theta;
    bool est_have_model = false;
    est->add_option("--input", est_input, "one float per line, optional header")->required();
    est->add_option("--estimator", est_name,
                    "lpr | gs | mle | pw | jack-opt | jack-chambers | jack-feasible");
    est->add_option("--alpha", est_alpha, "bandwidth exponent (default 0.65)");
    est->add_option("--m", est_m, "sub-sample count (jackknife)");
    est->add_option("--scheme", est_scheme, "no | mb (jackknife)");
    est->add_option("--p", est_p, "assumed AR order");
    est->add_option("--q", est_q, "assumed MA order");
    est->add_option("--model-d", est_model_d,
                    "true/assumed d for jack-opt weight covariances");
    est->add_option("--model-phi", est_model_phi, "AR coefficients for jack-opt weights");
    est->add_option("--model-theta", est_model_theta, "MA coefficients for jack-opt weights");
    est->callback([&] { est_have_model = est->count("--model-d") > 0; });

    // ---- mc
    auto* mc = app.add_subcommand("mc", "run a Monte Carlo experiment from a JSON config");
    std::string mc_config;
    int mc_threads = 0;
    mc->add_option("--config", mc_config, "JSON config path")->required();
    mc->add_option("--threads", mc_threads, "worker threads (overrides config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) {
            longmem::arfima::ArfimaModel model;
            model.d = sim_d;
            model.ar = sim_phi;
            model.ma = sim_theta;
            model.sigma2 = sim_sigma2;
            model.mu = sim_mu;
            model.validate();
            longmem::RngStream rng(sim_seed, 0);
            const auto y = longmem::arfima::simulate(model, sim_n, rng);
            std::ostringstream os;
            os.precision(17);
            for (double v : y) os << v << '\n';
            write_or_print(sim_out, os.str());
            return 0;
        }

        if (est->parsed()) {
            const auto y = read_series(est_input);
            double d = 0.0;
            if (est_name == "lpr") {
                d = longmem::lpr::lpr_estimate(y, est_alpha).d;
            } else if (est_name == "gs") {
                longmem::altest::GsConfig cfg;
                cfg.base_bandwidth_exponent = est_alpha;
                d = longmem::altest::gs_estimate(y, cfg);
            } else if (est_name == "mle") {
                d = longmem::altest::fit_mle(y, est_p, est_q).d;
            } else if (est_name == "pw") {
                d = longmem::altest::fit_pw(y, est_p, est_q);
            } else if (est_name == "jack-chambers" || est_name == "jack-feasible" ||
                       est_name == "jack-opt") {
                const auto scheme = est_scheme == "mb"
                                        ? longmem::jackknife::Scheme::moving_block
                                        : longmem::jackknife::Scheme::non_overlapping;
                const auto plan = longmem::jackknife::SubsamplePlan::make(
                    static_cast<int>(y.size()), est_m, scheme);
                if (est_name == "jack-chambers") {
                    const auto w = longmem::jackknife::chambers_weights(
                        static_cast<int>(y.size()), est_m, est_alpha);
                    d = longmem::jackknife::jackknife_estimate(y, plan, w, est_alpha);
                } else if (est_name == "jack-feasible") {
                    d = longmem::jackknife::feasible_jackknife(y, plan, est_alpha, est_p,
                                                               est_q)
                            .d;
                } else {
                    if (!est_have_model)
                        throw std::invalid_argument(
                            "jack-opt needs --model-d (plus --model-phi/--model-theta) "
                            "for the weight covariances");
                    longmem::arfima::ArfimaModel model;
                    model.d = est_model_d;
                    model.ar = est_model_phi;
                    model.ma = est_model_theta;
                    model.validate();
                    const auto cov = longmem::jackknife::estimator_covariances(
                        model, static_cast<int>(y.size()), plan, est_alpha);
                    const auto w = longmem::jackknife::optimal_weights(
                        static_cast<int>(y.size()), plan, est_alpha, cov);
                    d = longmem::jackknife::jackknife_estimate(y, plan, w, est_alpha);
                }
            } else {
                throw std::invalid_argument("unknown estimator: " + est_name);
            }
            std::printf("%.10g\n", d);
            return 0;
        }

        if (mc->parsed()) {
            std::ifstream in(mc_config);
            if (!in) throw std::invalid_argument("cannot open config: " + mc_config);
            std::ostringstream buf;
            buf << in.rdbuf();
            auto cfg = longmem::mc::parse_config_json(buf.str());
            if (mc_threads > 0) cfg.threads = mc_threads;
            const auto summary = longmem::mc::run_experiment(cfg);
            const std::string text = cfg.output_format == "json"
                                         ? longmem::mc::emit_json(summary)
                                         : longmem::mc::emit_csv(summary);
            write_or_print(cfg.output_path, text);
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
    return 0;
}
