#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ktop/coupled_tops.hpp"
#include "ktop/rmt.hpp"
#include "ktop/spacing_stats.hpp"

namespace ktop {

extern const char* kVersion;

enum class ExperimentKind {
    Spacing,
    Entanglement,
    SchmidtDistribution,
    LambdaScan,
    OmegaDistribution,
    RmtValidation,
};

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);
std::string to_string(Symmetry s);
std::string to_string(CouplingKind c);

struct BinSpec {
    double lo = 0.0;
    double hi = 4.0;
    int count = 40;
};

// One experiment: which pipeline to run, on which system, over which grid.
// Exactly one of lambda_grid / epsilon_grid must be set for the coupled-top
// experiments; the grid must be ascending.
struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::Spacing;

    // coupled kicked tops (spacing/entanglement/schmidt/lambda experiments)
    int j1 = 20, j2 = 20;
    double k1 = 12.0, k2 = 15.0;
    double alpha1 = 0.35, alpha2 = 0.4;

    // random-matrix ensemble (omega/rmt experiments)
    EnsembleSpec ensemble;
    int pairs_per_realization = 1;
    bool full_pairs = false;

    std::vector<double> lambda_grid;
    std::vector<double> epsilon_grid;
    std::vector<double> alphas{1.0, 2.0, 3.0, 4.0};
    BinSpec bins;
    int realizations = 1;
    std::uint64_t base_seed = 1;
    int threads = 0;      // 0 = hardware
    int dim_cap = 6000;   // dense eigensolves are O(N^3); abort above this
    std::string out;      // output path stem ("" = no files)
    std::string format = "csv"; // csv | json | both

    void validate() const;
    nlohmann::ordered_json to_json() const;
    static ExperimentConfig from_json(const nlohmann::ordered_json& j);
};

struct GridPointResult {
    double lambda = 0.0;
    double epsilon = 0.0;
    std::map<std::string, double> observables; // sorted keys = stable columns
};

struct HistogramResult {
    std::string label;
    double lambda = 0.0;
    Histogram hist;
};

struct ResultRecord {
    nlohmann::ordered_json config_echo;
    std::string library_version;
    std::uint64_t base_seed = 0;
    double wall_time_seconds = 0.0;
    std::vector<GridPointResult> points;
    std::vector<HistogramResult> histograms;

    /// include_timing=false gives the canonical form used by determinism
    /// comparisons (wall time is the only field allowed to differ).
    nlohmann::ordered_json to_json(bool include_timing = true) const;
    static ResultRecord from_json(const nlohmann::ordered_json& j);
};

/// Executes the configured pipeline: build -> diagonalize -> measure ->
/// reduce.  Stage failures abort with an error naming the stage and params.
ResultRecord run_experiment(const ExperimentConfig& config);

/// Writes <out>.json / <out>.csv (points) and <out>_hist_<label>.csv.
std::vector<std::string> emit(const ResultRecord& record, const std::string& out_stem,
                              const std::string& format);

// Shared building blocks (also used by the acceptance suite).

/// Pooled rescaled spacings at fixed coupling; realization r shifts the
/// parity-breaking phases so spectra decorrelate while Lambda is unchanged.
std::vector<double> pooled_spacings(const ExperimentConfig& cfg, double epsilon);

struct EigenstateMeasurement {
    std::vector<double> schmidt_means;           // <lambda_i>, i = 1..n_track
    std::map<double, double> entropy_mean;       // alpha -> <S_alpha>
    std::map<double, double> entropy_se;
    std::vector<double> rescaled_schmidt_pool;   // x = lambda_i * N1 over all states
    std::size_t states = 0;
};

EigenstateMeasurement measure_eigenstates(const ExperimentConfig& cfg, double epsilon,
                                          int n_track = 6);

/// Deterministic parity-phase offsets used for realization pooling.
std::pair<double, double> pooled_alphas(const ExperimentConfig& cfg, int realization);

} // namespace ktop
