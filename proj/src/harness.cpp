#include "ktop/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "ktop/entanglement.hpp"
#include "ktop/linalg.hpp"
#include "ktop/thread_pool.hpp"

namespace ktop {

const char* kVersion = "0.1.0";

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Spacing: return "spacing";
        case ExperimentKind::Entanglement: return "entanglement";
        case ExperimentKind::SchmidtDistribution: return "schmidt_distribution";
        case ExperimentKind::LambdaScan: return "lambda_scan";
        case ExperimentKind::OmegaDistribution: return "omega_distribution";
        case ExperimentKind::RmtValidation: return "rmt_validation";
    }
    throw std::logic_error("to_string: unknown experiment kind");
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
    if (s == "spacing") return ExperimentKind::Spacing;
    if (s == "entanglement") return ExperimentKind::Entanglement;
    if (s == "schmidt_distribution") return ExperimentKind::SchmidtDistribution;
    if (s == "lambda_scan") return ExperimentKind::LambdaScan;
    if (s == "omega_distribution") return ExperimentKind::OmegaDistribution;
    if (s == "rmt_validation") return ExperimentKind::RmtValidation;
    throw std::invalid_argument("unknown experiment kind: " + s);
}

std::string to_string(Symmetry s) { return s == Symmetry::COE ? "COE" : "CUE"; }

std::string to_string(CouplingKind c) {
    switch (c) {
        case CouplingKind::DiagonalPhases: return "diagonal";
        case CouplingKind::ProductPhases: return "product";
        case CouplingKind::KickedTopV12: return "kicked_top";
    }
    throw std::logic_error("to_string: unknown coupling kind");
}

namespace {

Symmetry symmetry_from_string(const std::string& s) {
    if (s == "COE") return Symmetry::COE;
    if (s == "CUE") return Symmetry::CUE;
    throw std::invalid_argument("unknown symmetry: " + s);
}

CouplingKind coupling_from_string(const std::string& s) {
    if (s == "diagonal") return CouplingKind::DiagonalPhases;
    if (s == "product") return CouplingKind::ProductPhases;
    if (s == "kicked_top") return CouplingKind::KickedTopV12;
    throw std::invalid_argument("unknown coupling: " + s);
}

std::string format_double_key(double a) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", a);
    return buf;
}

} // namespace

void ExperimentConfig::validate() const {
    if (!lambda_grid.empty() && !epsilon_grid.empty())
        throw std::invalid_argument("config: lambda_grid and epsilon_grid are exclusive");
    const bool rmt_kind = experiment == ExperimentKind::OmegaDistribution ||
                          experiment == ExperimentKind::RmtValidation;
    if (!rmt_kind && lambda_grid.empty() && epsilon_grid.empty())
        throw std::invalid_argument("config: one of lambda_grid/epsilon_grid is required");
    for (const auto* g : {&lambda_grid, &epsilon_grid})
        if (!std::is_sorted(g->begin(), g->end()))
            throw std::invalid_argument("config: grids must be ascending");
    if (j1 < 1 || j2 < 1) throw std::invalid_argument("config: j1, j2 >= 1 required");
    if (realizations < 1) throw std::invalid_argument("config: realizations >= 1");
    if (bins.count < 1 || !(bins.hi > bins.lo))
        throw std::invalid_argument("config: bad histogram bins");
    if (format != "csv" && format != "json" && format != "both")
        throw std::invalid_argument("config: format must be csv|json|both");
    if (rmt_kind) ensemble.validate();
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
    nlohmann::ordered_json j;
    j["experiment"] = to_string(experiment);
    j["system"] = {{"j1", j1}, {"j2", j2}, {"k1", k1}, {"k2", k2},
                   {"alpha1", alpha1}, {"alpha2", alpha2}};
    j["ensemble"] = {{"symmetry", to_string(ensemble.symmetry)},
                     {"coupling", to_string(ensemble.coupling)},
                     {"n1", ensemble.n1},
                     {"n2", ensemble.n2},
                     {"epsilon", ensemble.epsilon}};
    j["pairs_per_realization"] = pairs_per_realization;
    j["full_pairs"] = full_pairs;
    j["lambda_grid"] = lambda_grid;
    j["epsilon_grid"] = epsilon_grid;
    j["alphas"] = alphas;
    j["bins"] = {{"lo", bins.lo}, {"hi", bins.hi}, {"count", bins.count}};
    j["realizations"] = realizations;
    j["base_seed"] = base_seed;
    j["threads"] = threads;
    j["dim_cap"] = dim_cap;
    j["out"] = out;
    j["format"] = format;
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::ordered_json& j) {
    ExperimentConfig c;
    c.experiment = experiment_kind_from_string(j.at("experiment").get<std::string>());
    if (j.contains("system")) {
        const auto& s = j.at("system");
        c.j1 = s.value("j1", c.j1);
        c.j2 = s.value("j2", c.j2);
        c.k1 = s.value("k1", c.k1);
        c.k2 = s.value("k2", c.k2);
        c.alpha1 = s.value("alpha1", c.alpha1);
        c.alpha2 = s.value("alpha2", c.alpha2);
    }
    if (j.contains("ensemble")) {
        const auto& e = j.at("ensemble");
        if (e.contains("symmetry"))
            c.ensemble.symmetry = symmetry_from_string(e.at("symmetry").get<std::string>());
        if (e.contains("coupling"))
            c.ensemble.coupling = coupling_from_string(e.at("coupling").get<std::string>());
        c.ensemble.n1 = e.value("n1", c.ensemble.n1);
        c.ensemble.n2 = e.value("n2", c.ensemble.n2);
        c.ensemble.epsilon = e.value("epsilon", c.ensemble.epsilon);
    }
    c.pairs_per_realization = j.value("pairs_per_realization", c.pairs_per_realization);
    c.full_pairs = j.value("full_pairs", c.full_pairs);
    c.lambda_grid = j.value("lambda_grid", c.lambda_grid);
    c.epsilon_grid = j.value("epsilon_grid", c.epsilon_grid);
    c.alphas = j.value("alphas", c.alphas);
    if (j.contains("bins")) {
        const auto& b = j.at("bins");
        c.bins.lo = b.value("lo", c.bins.lo);
        c.bins.hi = b.value("hi", c.bins.hi);
        c.bins.count = b.value("count", c.bins.count);
    }
    c.realizations = j.value("realizations", c.realizations);
    c.base_seed = j.value("base_seed", c.base_seed);
    c.threads = j.value("threads", c.threads);
    c.dim_cap = j.value("dim_cap", c.dim_cap);
    c.out = j.value("out", c.out);
    c.format = j.value("format", c.format);
    c.validate();
    return c;
}

nlohmann::ordered_json ResultRecord::to_json(bool include_timing) const {
    nlohmann::ordered_json j;
    j["config"] = config_echo;
    j["library_version"] = library_version;
    j["base_seed"] = base_seed;
    if (include_timing) j["wall_time_seconds"] = wall_time_seconds;
    j["points"] = nlohmann::ordered_json::array();
    for (const auto& p : points) {
        nlohmann::ordered_json jp;
        jp["lambda"] = p.lambda;
        jp["epsilon"] = p.epsilon;
        jp["observables"] = nlohmann::ordered_json::object();
        for (const auto& [k, v] : p.observables) jp["observables"][k] = v;
        j["points"].push_back(jp);
    }
    j["histograms"] = nlohmann::ordered_json::array();
    for (const auto& h : histograms) {
        nlohmann::ordered_json jh;
        jh["label"] = h.label;
        jh["lambda"] = h.lambda;
        jh["edges"] = h.hist.edges;
        jh["density"] = h.hist.density;
        jh["count"] = h.hist.count;
        jh["outside"] = h.hist.outside;
        j["histograms"].push_back(jh);
    }
    return j;
}

ResultRecord ResultRecord::from_json(const nlohmann::ordered_json& j) {
    ResultRecord r;
    r.config_echo = j.at("config");
    r.library_version = j.at("library_version").get<std::string>();
    r.base_seed = j.at("base_seed").get<std::uint64_t>();
    r.wall_time_seconds = j.value("wall_time_seconds", 0.0);
    for (const auto& jp : j.at("points")) {
        GridPointResult p;
        p.lambda = jp.at("lambda").get<double>();
        p.epsilon = jp.at("epsilon").get<double>();
        for (const auto& [k, v] : jp.at("observables").items())
            p.observables[k] = v.get<double>();
        r.points.push_back(std::move(p));
    }
    for (const auto& jh : j.at("histograms")) {
        HistogramResult h;
        h.label = jh.at("label").get<std::string>();
        h.lambda = jh.at("lambda").get<double>();
        h.hist.edges = jh.at("edges").get<std::vector<double>>();
        h.hist.density = jh.at("density").get<std::vector<double>>();
        h.hist.count = jh.at("count").get<std::size_t>();
        h.hist.outside = jh.at("outside").get<std::size_t>();
        r.histograms.push_back(std::move(h));
    }
    return r;
}

// --- shared measurement pipelines -------------------------------------------

std::pair<double, double> pooled_alphas(const ExperimentConfig& cfg, int realization) {
    // Small deterministic shifts of the parity-breaking phases decorrelate
    // the pooled spectra without touching Lambda (the coupling has no alpha
    // dependence).
    return {cfg.alpha1 + 0.0291 * realization, cfg.alpha2 + 0.0233 * realization};
}

namespace {

void check_dim_cap(const ExperimentConfig& cfg) {
    const long n = static_cast<long>(2 * cfg.j1 + 1) * (2 * cfg.j2 + 1);
    if (n > cfg.dim_cap)
        throw std::runtime_error("experiment aborted: N1*N2 = " + std::to_string(n) +
                                 " exceeds dim_cap = " + std::to_string(cfg.dim_cap) +
                                 " (dense eigensolve is O(N^3); raise dim_cap to override)");
}

CoupledTopParams tops_for_realization(const ExperimentConfig& cfg, double epsilon, int r) {
    const auto [a1, a2] = pooled_alphas(cfg, r);
    return {{cfg.j1, cfg.k1, a1}, {cfg.j2, cfg.k2, a2}, epsilon};
}

int effective_threads(const ExperimentConfig& cfg) {
    return cfg.threads > 0 ? cfg.threads : hardware_threads();
}

} // namespace

std::vector<double> pooled_spacings(const ExperimentConfig& cfg, double epsilon) {
    if (epsilon != 0.0) check_dim_cap(cfg);
    auto task = [&](int r) -> std::vector<double> {
        const CoupledTopParams p = tops_for_realization(cfg, epsilon, r);
        const RVector phases = epsilon == 0.0 ? uncoupled_phases(p.top1, p.top2)
                                              : eig_unitary_phases(full_floquet(p));
        return spacings_from_phases(phases).spacings;
    };
    const auto parts = parallel_map<std::vector<double>>(cfg.realizations,
                                                         effective_threads(cfg), task);
    std::vector<double> pooled;
    for (const auto& part : parts) pooled.insert(pooled.end(), part.begin(), part.end());
    return pooled;
}

EigenstateMeasurement measure_eigenstates(const ExperimentConfig& cfg, double epsilon,
                                          int n_track) {
    if (epsilon != 0.0) check_dim_cap(cfg);
    const int n1 = 2 * cfg.j1 + 1, n2 = 2 * cfg.j2 + 1;
    const int n_min = std::min(n1, n2);
    n_track = std::min(n_track, n_min);

    struct PerRealization {
        std::vector<double> schmidt_sums;
        std::map<double, double> s_sum;
        std::map<double, double> s_sq_sum;
        std::vector<double> x_pool;
        std::size_t states = 0;
    };

    auto task = [&](int r) -> PerRealization {
        PerRealization acc;
        acc.schmidt_sums.assign(static_cast<std::size_t>(n_track), 0.0);
        for (double a : cfg.alphas) {
            acc.s_sum[a] = 0.0;
            acc.s_sq_sum[a] = 0.0;
        }
        const CoupledTopParams p = tops_for_realization(cfg, epsilon, r);
        const Eigen::Index nn = p.dim();
        acc.x_pool.reserve(static_cast<std::size_t>(nn) * n_min);

        if (epsilon == 0.0) {
            // Product eigenstates: lambda = (1, 0, ...), all entropies zero.
            acc.states = static_cast<std::size_t>(nn);
            acc.schmidt_sums[0] = static_cast<double>(nn);
            for (Eigen::Index s = 0; s < nn; ++s) {
                acc.x_pool.push_back(static_cast<double>(n_min));
                for (int i = 1; i < n_min; ++i) acc.x_pool.push_back(0.0);
            }
            return acc;
        }

        const SpectralDecomposition sd = eig_unitary(full_floquet(p));
        for (Eigen::Index col = 0; col < nn; ++col) {
            const SchmidtSpectrum sp = schmidt_spectrum(sd.vectors.col(col), n1, n2);
            ++acc.states;
            for (int i = 0; i < n_track; ++i) acc.schmidt_sums[i] += sp.values[i];
            for (double a : cfg.alphas) {
                const double s = hct_entropy(sp, a);
                acc.s_sum[a] += s;
                acc.s_sq_sum[a] += s * s;
            }
            for (Eigen::Index i = 0; i < sp.values.size(); ++i)
                acc.x_pool.push_back(sp.values[i] * n_min);
        }
        return acc;
    };

    const auto parts =
        parallel_map<PerRealization>(cfg.realizations, effective_threads(cfg), task);

    EigenstateMeasurement out;
    out.schmidt_means.assign(static_cast<std::size_t>(n_track), 0.0);
    std::map<double, double> s_sum, s_sq;
    for (const auto& part : parts) {
        out.states += part.states;
        for (int i = 0; i < n_track; ++i) out.schmidt_means[i] += part.schmidt_sums[i];
        for (double a : cfg.alphas) {
            s_sum[a] += part.s_sum.at(a);
            s_sq[a] += part.s_sq_sum.at(a);
        }
        out.rescaled_schmidt_pool.insert(out.rescaled_schmidt_pool.end(),
                                         part.x_pool.begin(), part.x_pool.end());
    }
    const double n = static_cast<double>(out.states);
    for (auto& m : out.schmidt_means) m /= n;
    for (double a : cfg.alphas) {
        const double mean = s_sum[a] / n;
        out.entropy_mean[a] = mean;
        const double var = std::max(0.0, s_sq[a] / n - mean * mean);
        out.entropy_se[a] = std::sqrt(var / n);
    }
    return out;
}

// --- experiments -------------------------------------------------------------

namespace {

struct GridEntry {
    double lambda, epsilon;
};

std::vector<GridEntry> resolve_grid(const ExperimentConfig& cfg) {
    std::vector<GridEntry> grid;
    if (!cfg.lambda_grid.empty()) {
        for (double l : cfg.lambda_grid)
            grid.push_back({l, epsilon_for_lambda(cfg.j1, cfg.j2, l)});
    } else {
        for (double e : cfg.epsilon_grid) {
            const CoupledTopParams p{{cfg.j1, cfg.k1, cfg.alpha1},
                                     {cfg.j2, cfg.k2, cfg.alpha2}, e};
            grid.push_back({lambda_kicked_tops(p).lambda, e});
        }
    }
    return grid;
}

std::vector<double> histogram_edges(const BinSpec& b) {
    return uniform_edges(b.lo, b.hi, b.count);
}

void run_spacing(const ExperimentConfig& cfg, ResultRecord& rec) {
    for (const GridEntry& g : resolve_grid(cfg)) {
        const std::vector<double> s = pooled_spacings(cfg, g.epsilon);
        GridPointResult pt;
        pt.lambda = g.lambda;
        pt.epsilon = g.epsilon;
        pt.observables["count"] = static_cast<double>(s.size());
        pt.observables["ks_poisson"] = ks_distance(
            s, [](double x) { return reference_cdf(SpacingLaw::Poisson, x); });
        pt.observables["ks_wigner"] = ks_distance(
            s, [](double x) { return reference_cdf(SpacingLaw::WignerCoe, x); });
        const int n1 = std::min(2 * cfg.j1 + 1, 2 * cfg.j2 + 1);
        pt.observables["ks_n1coe"] = ks_distance(
            s, [n1](double x) { return reference_cdf(SpacingLaw::N1Coe, x, n1); });
        if (g.lambda > 0.0 && g.lambda <= 0.25) {
            PerturbativeSpacing curve(g.lambda, Symmetry::COE, CouplingKind::ProductPhases);
            pt.observables["ks_perturbative"] =
                ks_distance(s, [&](double x) { return curve.cdf(x); });
        }
        double total = 0.0;
        for (double v : s) total += v;
        pt.observables["mean_spacing"] = total / static_cast<double>(s.size());
        rec.points.push_back(std::move(pt));
        rec.histograms.push_back(
            {"spacing_lambda=" + format_double_key(g.lambda), g.lambda,
             histogram(s, histogram_edges(cfg.bins))});
    }
}

void run_entanglement(const ExperimentConfig& cfg, ResultRecord& rec) {
    const int n1 = 2 * cfg.j1 + 1, n2 = 2 * cfg.j2 + 1;
    for (const GridEntry& g : resolve_grid(cfg)) {
        const EigenstateMeasurement m = measure_eigenstates(cfg, g.epsilon);
        GridPointResult pt;
        pt.lambda = g.lambda;
        pt.epsilon = g.epsilon;
        pt.observables["states"] = static_cast<double>(m.states);
        for (std::size_t i = 0; i < m.schmidt_means.size(); ++i)
            pt.observables["schmidt" + std::to_string(i + 1) + "_mean"] =
                m.schmidt_means[i];
        const Lambda12Prediction pred =
            predicted_lambda12(g.lambda, CouplingKind::ProductPhases);
        pt.observables["schmidt1_pred"] = pred.lambda1;
        pt.observables["schmidt2_pred"] = pred.lambda2;
        for (double a : cfg.alphas) {
            const std::string key = format_double_key(a);
            pt.observables["S" + key + "_mean"] = m.entropy_mean.at(a);
            pt.observables["S" + key + "_se"] = m.entropy_se.at(a);
            pt.observables["S" + key + "_perturbative"] =
                predicted_entropy(a, g.lambda, EntropyRegime::Perturbative, n1, n2);
            try {
                pt.observables["S" + key + "_inf"] = saturation_entropy(a, n1, n2);
                pt.observables["S" + key + "_recursive"] =
                    predicted_entropy(a, g.lambda, EntropyRegime::Recursive, n1, n2);
            } catch (const std::invalid_argument&) {
                // no saturation formula for this (alpha, n1, n2); skip
            }
        }
        rec.points.push_back(std::move(pt));
    }
}

void run_schmidt_distribution(const ExperimentConfig& cfg, ResultRecord& rec) {
    const int n1 = 2 * cfg.j1 + 1, n2 = 2 * cfg.j2 + 1;
    const double q = static_cast<double>(std::max(n1, n2)) / std::min(n1, n2);
    for (const GridEntry& g : resolve_grid(cfg)) {
        const EigenstateMeasurement m = measure_eigenstates(cfg, g.epsilon);
        GridPointResult pt;
        pt.lambda = g.lambda;
        pt.epsilon = g.epsilon;
        pt.observables["states"] = static_cast<double>(m.states);
        pt.observables["q_ratio"] = q;
        double mean_x = 0.0;
        for (double x : m.rescaled_schmidt_pool) mean_x += x;
        mean_x /= static_cast<double>(m.rescaled_schmidt_pool.size());
        pt.observables["mean_x"] = mean_x;
        pt.observables["ks_marcenko_pastur"] = ks_distance(
            m.rescaled_schmidt_pool, [q](double x) { return marcenko_pastur_cdf(q, x); });
        rec.points.push_back(std::move(pt));
        rec.histograms.push_back(
            {"schmidt_x_lambda=" + format_double_key(g.lambda), g.lambda,
             histogram(m.rescaled_schmidt_pool, histogram_edges(cfg.bins))});
    }
}

void run_lambda_scan(const ExperimentConfig& cfg, ResultRecord& rec) {
    for (const GridEntry& g : resolve_grid(cfg)) {
        const CoupledTopParams p{{cfg.j1, cfg.k1, cfg.alpha1},
                                 {cfg.j2, cfg.k2, cfg.alpha2}, g.epsilon};
        const LambdaReport exact = lambda_kicked_tops(p, LambdaMethod::ExactSum);
        const LambdaReport asym = lambda_kicked_tops(p, LambdaMethod::Asymptotic);
        GridPointResult pt;
        pt.lambda = exact.lambda;
        pt.epsilon = g.epsilon;
        pt.observables["lambda_exact"] = exact.lambda;
        pt.observables["lambda_asymptotic"] = asym.lambda;
        pt.observables["trace_sq"] = exact.trace_sq;
        pt.observables["norm1_sq"] = exact.norm1_sq;
        pt.observables["norm2_sq"] = exact.norm2_sq;
        pt.observables["lambda_max"] = lambda_max(2 * cfg.j1 + 1, 2 * cfg.j2 + 1);
        rec.points.push_back(std::move(pt));
    }
}

void run_omega_distribution(const ExperimentConfig& cfg, ResultRecord& rec) {
    EnsembleSpec spec = cfg.ensemble;
    spec.realizations = cfg.realizations;
    spec.base_seed = cfg.base_seed;
    const std::vector<double> w =
        offdiag_element_samples(spec, cfg.pairs_per_realization, cfg.full_pairs);
    GridPointResult pt;
    pt.lambda = 0.0;
    pt.epsilon = spec.epsilon;
    pt.observables["samples"] = static_cast<double>(w.size());
    double mean = 0.0;
    for (double x : w) mean += x;
    pt.observables["mean_omega"] = mean / static_cast<double>(w.size());
    pt.observables["ks_coe_diagonal"] =
        ks_distance(w, omega_cdf(Symmetry::COE, CouplingKind::DiagonalPhases));
    pt.observables["ks_cue_diagonal"] =
        ks_distance(w, omega_cdf(Symmetry::CUE, CouplingKind::DiagonalPhases));
    pt.observables["ks_coe_product"] =
        ks_distance(w, omega_cdf(Symmetry::COE, CouplingKind::ProductPhases));
    pt.observables["ks_cue_product"] =
        ks_distance(w, omega_cdf(Symmetry::CUE, CouplingKind::ProductPhases));
    rec.points.push_back(std::move(pt));
    rec.histograms.push_back({"omega", 0.0, histogram(w, histogram_edges(cfg.bins))});
}

// Fixed deterministic diagonal coupling for the Monte-Carlo Lambda check:
// golden-angle phases give a generic unitary diagonal.
CVector golden_diagonal(Eigen::Index n) {
    CVector d(n);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double frac = std::fmod(static_cast<double>(k + 1) * phi, 1.0);
        d[k] = std::polar(1.0, kTwoPi * frac);
    }
    return d;
}

void run_rmt_validation(const ExperimentConfig& cfg, ResultRecord& rec) {
    const EnsembleSpec& es = cfg.ensemble;
    const int n1 = es.n1, n2 = es.n2;
    const Eigen::Index nn = static_cast<Eigen::Index>(n1) * n2;
    const CVector u12 = golden_diagonal(nn);
    const double lambda_pred = lambda_general(es.symmetry, u12, n1, n2);
    const double d_level = kTwoPi / static_cast<double>(nn);

    Eigen::MatrixXcd table(n1, n2);
    for (int a = 0; a < n1; ++a)
        for (int b = 0; b < n2; ++b) table(a, b) = u12[composite_index(a, b, n2)];

    auto task = [&](int r) -> double {
        RngStream stream(cfg.base_seed, static_cast<std::uint64_t>(r));
        const CMatrix s1 = es.symmetry == Symmetry::COE ? sample_coe(n1, stream)
                                                        : sample_cue(n1, stream);
        const CMatrix s2 = es.symmetry == Symmetry::COE ? sample_coe(n2, stream)
                                                        : sample_cue(n2, stream);
        const RMatrix a1 = eig_unitary(s1).vectors.cwiseAbs2();
        const RMatrix a2 = eig_unitary(s2).vectors.cwiseAbs2();
        const Eigen::MatrixXcd diag = a1.transpose() * table * a2;
        const double v2 = (static_cast<double>(nn) - diag.squaredNorm()) /
                          (static_cast<double>(nn) * (nn - 1));
        return v2 / (d_level * d_level);
    };
    const auto lambdas =
        parallel_map<double>(cfg.realizations, effective_threads(cfg), task);

    double mean = 0.0;
    for (double l : lambdas) mean += l;
    mean /= static_cast<double>(lambdas.size());
    double var = 0.0;
    for (double l : lambdas) var += (l - mean) * (l - mean);
    var /= std::max<std::size_t>(1, lambdas.size() - 1);
    const double se = std::sqrt(var / static_cast<double>(lambdas.size()));

    GridPointResult pt;
    pt.lambda = lambda_pred;
    pt.epsilon = es.epsilon;
    pt.observables["lambda_pred"] = lambda_pred;
    pt.observables["lambda_emp_mean"] = mean;
    pt.observables["lambda_emp_se"] = se;
    pt.observables["z_score"] = se > 0.0 ? (mean - lambda_pred) / se : 0.0;
    pt.observables["realizations"] = static_cast<double>(lambdas.size());
    rec.points.push_back(std::move(pt));
}

} // namespace

ResultRecord run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ResultRecord rec;
    rec.config_echo = cfg.to_json();
    rec.library_version = kVersion;
    rec.base_seed = cfg.base_seed;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        switch (cfg.experiment) {
            case ExperimentKind::Spacing: run_spacing(cfg, rec); break;
            case ExperimentKind::Entanglement: run_entanglement(cfg, rec); break;
            case ExperimentKind::SchmidtDistribution: run_schmidt_distribution(cfg, rec); break;
            case ExperimentKind::LambdaScan: run_lambda_scan(cfg, rec); break;
            case ExperimentKind::OmegaDistribution: run_omega_distribution(cfg, rec); break;
            case ExperimentKind::RmtValidation: run_rmt_validation(cfg, rec); break;
        }
    } catch (const std::exception& e) {
        throw std::runtime_error("experiment '" + to_string(cfg.experiment) +
                                 "' failed (j1=" + std::to_string(cfg.j1) +
                                 ", j2=" + std::to_string(cfg.j2) + "): " + e.what());
    }
    rec.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("emit: cannot open " + path);
    f << body;
    if (!f) throw std::runtime_error("emit: write failed for " + path);
}

std::string sanitize_label(std::string s) {
    for (char& c : s)
        if (c == '/' || c == ' ' || c == '=') c = '_';
    return s;
}

} // namespace

std::vector<std::string> emit(const ResultRecord& record, const std::string& out_stem,
                              const std::string& format) {
    if (out_stem.empty()) throw std::invalid_argument("emit: empty output path");
    std::vector<std::string> written;
    if (format == "json" || format == "both") {
        const std::string path = out_stem + ".json";
        write_file(path, record.to_json().dump(2) + "\n");
        written.push_back(path);
    }
    if (format == "csv" || format == "both") {
        // union of observable keys keeps one header for all grid points
        std::vector<std::string> keys;
        for (const auto& p : record.points)
            for (const auto& [k, v] : p.observables)
                if (std::find(keys.begin(), keys.end(), k) == keys.end())
                    keys.push_back(k);
        std::sort(keys.begin(), keys.end());
        std::string body = "lambda,epsilon";
        for (const auto& k : keys) body += "," + k;
        body += "\n";
        for (const auto& p : record.points) {
            body += fmt17(p.lambda) + "," + fmt17(p.epsilon);
            for (const auto& k : keys) {
                const auto it = p.observables.find(k);
                body += ",";
                body += it == p.observables.end() ? "nan" : fmt17(it->second);
            }
            body += "\n";
        }
        const std::string path = out_stem + ".csv";
        write_file(path, body);
        written.push_back(path);
        for (const auto& h : record.histograms) {
            std::string hb = "bin_lo,bin_hi,density\n";
            for (std::size_t b = 0; b + 1 < h.hist.edges.size(); ++b)
                hb += fmt17(h.hist.edges[b]) + "," + fmt17(h.hist.edges[b + 1]) + "," +
                      fmt17(h.hist.density[b]) + "\n";
            const std::string hpath = out_stem + "_hist_" + sanitize_label(h.label) + ".csv";
            write_file(hpath, hb);
            written.push_back(hpath);
        }
    }
    return written;
}

} // namespace ktop
