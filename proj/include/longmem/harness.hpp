#pragma once
// Monte Carlo experiment engine: per-replication estimator records, threaded
// experiment runs with deterministic per-replication RNG streams, and
// CSV/JSON emission.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "longmem/arfima.hpp"
#include "longmem/jackknife.hpp"

namespace longmem::mc {

enum class Knowledge { true_params, estimated, misspecified };

const char* knowledge_name(Knowledge k);

struct ExperimentConfig {
    arfima::ArfimaModel model;
    std::string model_label = "arfima";
    int n = 0;
    double alpha = 0.65;
    std::vector<int> m_values;
    std::vector<jackknife::Scheme> schemes;
    std::vector<std::string> estimators;  // {lpr, jack-opt, jack-chambers,
                                          //  jack-feasible, gs, mle, pw}
    Knowledge knowledge = Knowledge::true_params;
    int mis_p = 0, mis_q = 0;  // assumed orders when knowledge = misspecified
    int reps = 1;
    std::uint64_t seed = 0;
    std::string output_path;              // empty -> stdout
    std::string output_format = "csv";
    int threads = 1;

    void validate() const;
};

// One output cell: an estimator, optionally specialized by sub-sampling
// scheme and m (jackknife estimators only).
struct Cell {
    std::string estimator;
    std::optional<jackknife::Scheme> scheme;
    int m = 0;
};

std::vector<Cell> experiment_cells(const ExperimentConfig& cfg);

// Estimates for one replication, aligned with experiment_cells(cfg); a cell
// holds nullopt when the estimator failed on this draw.
struct RepRecord {
    std::vector<std::optional<double>> estimates;
};

RepRecord run_replication(const ExperimentConfig& cfg, int rep_index);

struct CellSummary {
    Cell cell;
    double bias = 0.0;
    double bias_mc_se = 0.0;
    double rmse = 0.0;
    int reps = 0;      // configured replication count
    int failures = 0;  // excluded from the moments
    double wall_time = 0.0;  // seconds, not emitted
};

struct McSummary {
    ExperimentConfig config;
    std::vector<CellSummary> cells;
};

// Executes all replications (cfg.threads workers) and aggregates with
// order-independent pairwise summation, so the numbers do not depend on the
// parallelism degree.
McSummary run_experiment(const ExperimentConfig& cfg);

// CSV columns: model_label, phi, theta, d0, n, alpha, scheme, m, estimator,
// knowledge, reps, bias, bias_mc_se, rmse, failures, seed. Numbers carry six
// significant digits. JSON mirrors the same fields.
std::string emit_csv(const McSummary& summary);
std::string emit_json(const McSummary& summary);

// Parses a config file (flat JSON document mirroring ExperimentConfig).
ExperimentConfig parse_config_json(const std::string& text);

// Pairwise (tree) summation over a fixed-order array.
double pairwise_sum(const double* data, std::size_t n);

} // namespace longmem::mc
