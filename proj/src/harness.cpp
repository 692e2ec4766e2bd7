#include "longmem/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "longmem/altestimators.hpp"
#include "longmem/lpr.hpp"
#include "longmem/rng.hpp"

namespace longmem::mc {

namespace {

const std::set<std::string> kEstimators = {
    "lpr", "jack-opt", "jack-chambers", "jack-feasible", "gs", "mle", "pw"};

bool is_jackknife(const std::string& name) { return name.rfind("jack", 0) == 0; }

} // namespace

const char* knowledge_name(Knowledge k) {
    switch (k) {
        case Knowledge::true_params: return "true-params";
        case Knowledge::estimated: return "estimated";
        case Knowledge::misspecified: return "misspecified";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    model.validate();
    if (n < 8) throw std::invalid_argument("ExperimentConfig: n too small");
    if (reps < 1) throw std::invalid_argument("ExperimentConfig: reps must be >= 1");
    if (estimators.empty())
        throw std::invalid_argument("ExperimentConfig: estimator list must be nonempty");
    for (const auto& e : estimators) {
        if (!kEstimators.count(e))
            throw std::invalid_argument("ExperimentConfig: unknown estimator '" + e + "'");
        if (is_jackknife(e) && (m_values.empty() || schemes.empty()))
            throw std::invalid_argument(
                "ExperimentConfig: jackknife estimators need m_values and schemes");
    }
    for (int m : m_values) {
        if (m < 2 || n % m != 0)
            throw std::invalid_argument(
                "ExperimentConfig: every m must be >= 2 and divide n");
    }
    if (threads < 1) throw std::invalid_argument("ExperimentConfig: threads must be >= 1");
    if (output_format != "csv" && output_format != "json")
        throw std::invalid_argument("ExperimentConfig: format must be csv or json");
    if (knowledge == Knowledge::misspecified && (mis_p < 0 || mis_q < 0))
        throw std::invalid_argument("ExperimentConfig: negative misspecified order");
}

std::vector<Cell> experiment_cells(const ExperimentConfig& cfg) {
    std::vector<Cell> cells;
    for (const auto& e : cfg.estimators) {
        if (is_jackknife(e)) {
            for (auto scheme : cfg.schemes)
                for (int m : cfg.m_values) cells.push_back({e, scheme, m});
        } else {
            cells.push_back({e, std::nullopt, 0});
        }
    }
    return cells;
}

namespace {

// Assumed short-memory orders used by the model-dependent estimators.
std::pair<int, int> assumed_orders(const ExperimentConfig& cfg) {
    if (cfg.knowledge == Knowledge::misspecified) return {cfg.mis_p, cfg.mis_q};
    return {static_cast<int>(cfg.model.ar.size()), static_cast<int>(cfg.model.ma.size())};
}

// One-pass model estimate for the weight covariances when the truth is not
// used: GS prefilter value plus a CSS ARMA fit on the differenced series.
arfima::ArfimaModel estimate_weight_model(const std::vector<double>& y,
                                          const ExperimentConfig& cfg) {
    auto [p, q] = assumed_orders(cfg);
    altest::GsConfig gs_cfg;
    gs_cfg.base_bandwidth_exponent = cfg.alpha;
    const double d_f = altest::gs_estimate(y, gs_cfg);
    arfima::ArfimaModel model;
    model.d = std::clamp(d_f, -0.499, 0.499);
    if (p > 0 || q > 0) {
        const auto filtered = jackknife::fractional_difference(y, d_f);
        const auto fit = jackknife::fit_arma_css(filtered, p, q);
        model.ar = fit.ar;
        model.ma = fit.ma;
    }
    return model;
}

double run_cell(const ExperimentConfig& cfg, const Cell& cell,
                const std::vector<double>& y,
                const std::optional<arfima::ArfimaModel>& weight_model) {
    auto [p, q] = assumed_orders(cfg);
    const auto truth = [&] {
        altest::MleParams t;
        t.d = cfg.model.d;
        t.ar = cfg.model.ar;
        t.ma = cfg.model.ma;
        return t;
    };

    if (cell.estimator == "lpr") return lpr::lpr_estimate(y, cfg.alpha).d;
    if (cell.estimator == "gs") {
        altest::GsConfig gs_cfg;
        gs_cfg.base_bandwidth_exponent = cfg.alpha;
        return altest::gs_estimate(y, gs_cfg);
    }
    if (cell.estimator == "mle") {
        if (cfg.knowledge == Knowledge::true_params)
            return altest::fit_mle(y, p, q, truth()).d;
        return altest::fit_mle(y, p, q).d;
    }
    if (cell.estimator == "pw") {
        if (cfg.knowledge == Knowledge::true_params) return altest::fit_pw(y, p, q, truth());
        return altest::fit_pw(y, p, q);
    }

    const auto plan = jackknife::SubsamplePlan::make(cfg.n, cell.m, *cell.scheme);
    if (cell.estimator == "jack-chambers") {
        const auto w = jackknife::chambers_weights(cfg.n, cell.m, cfg.alpha);
        return jackknife::jackknife_estimate(y, plan, w, cfg.alpha);
    }
    if (cell.estimator == "jack-opt") {
        const arfima::ArfimaModel& m =
            cfg.knowledge == Knowledge::true_params ? cfg.model : *weight_model;
        const auto cov = jackknife::estimator_covariances(m, cfg.n, plan, cfg.alpha);
        const auto w = jackknife::optimal_weights(cfg.n, plan, cfg.alpha, cov);
        return jackknife::jackknife_estimate(y, plan, w, cfg.alpha);
    }
    // jack-feasible
    return jackknife::feasible_jackknife(y, plan, cfg.alpha, p, q).d;
}

} // namespace

RepRecord run_replication(const ExperimentConfig& cfg, int rep_index) {
    RngStream rng(cfg.seed, static_cast<std::uint64_t>(rep_index));
    const std::vector<double> y = arfima::simulate(cfg.model, cfg.n, rng);

    const auto cells = experiment_cells(cfg);

    // A per-replication model estimate is shared by all jack-opt cells when
    // the true parameters are not assumed known.
    std::optional<arfima::ArfimaModel> weight_model;
    if (cfg.knowledge != Knowledge::true_params) {
        for (const auto& c : cells) {
            if (c.estimator == "jack-opt") {
                try {
                    weight_model = estimate_weight_model(y, cfg);
                } catch (const std::exception&) {
                    weight_model.reset();
                }
                break;
            }
        }
    }

    RepRecord rec;
    rec.estimates.resize(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        try {
            if (cells[c].estimator == "jack-opt" &&
                cfg.knowledge != Knowledge::true_params && !weight_model)
                continue;  // prerequisite model estimate failed
            rec.estimates[c] = run_cell(cfg, cells[c], y, weight_model);
        } catch (const std::exception&) {
            // failure recorded per cell; the replication continues
        }
    }
    return rec;
}

double pairwise_sum(const double* data, std::size_t n) {
    if (n == 0) return 0.0;
    if (n <= 8) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += data[i];
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

McSummary run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto cells = experiment_cells(cfg);
    std::vector<RepRecord> records(static_cast<std::size_t>(cfg.reps));

    const auto t0 = std::chrono::steady_clock::now();
    std::atomic<int> next_rep{0};
    auto worker = [&]() {
        while (true) {
            const int r = next_rep.fetch_add(1);
            if (r >= cfg.reps) break;
            records[static_cast<std::size_t>(r)] = run_replication(cfg, r);
        }
    };
    if (cfg.threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < cfg.threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    McSummary out;
    out.config = cfg;
    out.cells.resize(cells.size());
    const double d0 = cfg.model.d;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        CellSummary& s = out.cells[c];
        s.cell = cells[c];
        s.reps = cfg.reps;
        s.wall_time = elapsed;

        std::vector<double> err;  // d_hat - d0, in replication order
        err.reserve(static_cast<std::size_t>(cfg.reps));
        for (int r = 0; r < cfg.reps; ++r) {
            const auto& est = records[static_cast<std::size_t>(r)].estimates[c];
            if (est)
                err.push_back(*est - d0);
            else
                ++s.failures;
        }
        const std::size_t used = err.size();
        if (used == 0) continue;
        const double mean = pairwise_sum(err.data(), used) / static_cast<double>(used);
        std::vector<double> sq(used), dev(used);
        for (std::size_t i = 0; i < used; ++i) {
            sq[i] = err[i] * err[i];
            dev[i] = (err[i] - mean) * (err[i] - mean);
        }
        const double msq = pairwise_sum(sq.data(), used) / static_cast<double>(used);
        const double var =
            used > 1 ? pairwise_sum(dev.data(), used) / static_cast<double>(used - 1) : 0.0;
        s.bias = mean;
        s.rmse = std::sqrt(msq);
        s.bias_mc_se = std::sqrt(var / static_cast<double>(used));
    }
    return out;
}

namespace {

std::string join_coeffs(const std::vector<double>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ';';
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", v[i]);
        os << buf;
    }
    return os.str();
}

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string knowledge_field(const ExperimentConfig& cfg) {
    if (cfg.knowledge != Knowledge::misspecified) return knowledge_name(cfg.knowledge);
    return "misspecified(" + std::to_string(cfg.mis_p) + "," + std::to_string(cfg.mis_q) + ")";
}

// standard CSV quoting for fields that may hold commas (labels, knowledge)
std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

std::string emit_csv(const McSummary& summary) {
    std::ostringstream os;
    os << "model_label,phi,theta,d0,n,alpha,scheme,m,estimator,knowledge,reps,"
          "bias,bias_mc_se,rmse,failures,seed\n";
    const auto& cfg = summary.config;
    for (const auto& s : summary.cells) {
        os << csv_escape(cfg.model_label) << ',' << join_coeffs(cfg.model.ar) << ','
           << join_coeffs(cfg.model.ma) << ',' << fmt6(cfg.model.d) << ',' << cfg.n << ','
           << fmt6(cfg.alpha) << ','
           << (s.cell.scheme ? jackknife::scheme_name(*s.cell.scheme) : "") << ','
           << s.cell.m << ',' << s.cell.estimator << ','
           << csv_escape(knowledge_field(cfg)) << ',' << s.reps << ',' << fmt6(s.bias)
           << ',' << fmt6(s.bias_mc_se) << ',' << fmt6(s.rmse) << ',' << s.failures << ','
           << cfg.seed << '\n';
    }
    return os.str();
}

std::string emit_json(const McSummary& summary) {
    nlohmann::json rows = nlohmann::json::array();
    const auto& cfg = summary.config;
    for (const auto& s : summary.cells) {
        nlohmann::json row;
        row["model_label"] = cfg.model_label;
        row["phi"] = join_coeffs(cfg.model.ar);
        row["theta"] = join_coeffs(cfg.model.ma);
        row["d0"] = fmt6(cfg.model.d);
        row["n"] = cfg.n;
        row["alpha"] = fmt6(cfg.alpha);
        row["scheme"] = s.cell.scheme ? jackknife::scheme_name(*s.cell.scheme) : "";
        row["m"] = s.cell.m;
        row["estimator"] = s.cell.estimator;
        row["knowledge"] = knowledge_field(cfg);
        row["reps"] = s.reps;
        row["bias"] = fmt6(s.bias);
        row["bias_mc_se"] = fmt6(s.bias_mc_se);
        row["rmse"] = fmt6(s.rmse);
        row["failures"] = s.failures;
        row["seed"] = cfg.seed;
        rows.push_back(row);
    }
    return rows.dump(2) + "\n";
}

ExperimentConfig parse_config_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    try {
        const auto& m = j.at("model");
        cfg.model.d = m.at("d").get<double>();
        if (m.contains("phi")) cfg.model.ar = m["phi"].get<std::vector<double>>();
        if (m.contains("theta")) cfg.model.ma = m["theta"].get<std::vector<double>>();
        if (m.contains("sigma2")) cfg.model.sigma2 = m["sigma2"].get<double>();
        if (m.contains("mu")) cfg.model.mu = m["mu"].get<double>();
        if (m.contains("label")) cfg.model_label = m["label"].get<std::string>();
        cfg.n = j.at("n").get<int>();
        if (j.contains("alpha")) cfg.alpha = j["alpha"].get<double>();
        if (j.contains("m_values")) cfg.m_values = j["m_values"].get<std::vector<int>>();
        if (j.contains("schemes")) {
            for (const auto& s : j["schemes"]) {
                const std::string name = s.get<std::string>();
                if (name == "no")
                    cfg.schemes.push_back(jackknife::Scheme::non_overlapping);
                else if (name == "mb")
                    cfg.schemes.push_back(jackknife::Scheme::moving_block);
                else
                    throw std::invalid_argument("config: scheme must be 'no' or 'mb'");
            }
        }
        cfg.estimators = j.at("estimators").get<std::vector<std::string>>();
        if (j.contains("knowledge")) {
            const std::string k = j["knowledge"].get<std::string>();
            if (k == "true-params")
                cfg.knowledge = Knowledge::true_params;
            else if (k == "estimated")
                cfg.knowledge = Knowledge::estimated;
            else if (k == "misspecified")
                cfg.knowledge = Knowledge::misspecified;
            else
                throw std::invalid_argument("config: unknown knowledge '" + k + "'");
        }
        if (j.contains("misspecified_p")) cfg.mis_p = j["misspecified_p"].get<int>();
        if (j.contains("misspecified_q")) cfg.mis_q = j["misspecified_q"].get<int>();
        cfg.reps = j.at("reps").get<int>();
        cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("output")) {
            const auto& o = j["output"];
            if (o.contains("path")) cfg.output_path = o["path"].get<std::string>();
            if (o.contains("format")) cfg.output_format = o["format"].get<std::string>();
        }
        if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

} // namespace longmem::mc
