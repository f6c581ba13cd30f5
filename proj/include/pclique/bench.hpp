#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "pclique/global_cluster.hpp"
#include "pclique/io.hpp"
#include "pclique/local_cluster.hpp"
#include "pclique/metrics.hpp"
#include "pclique/modularity.hpp"
#include "pclique/sbm.hpp"

namespace pclique::bench {

using nlohmann::json;

enum class Algorithm { GlobalP, Localized, Modularity };

inline std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::GlobalP: return "global-p";
        case Algorithm::Localized: return "localized";
        case Algorithm::Modularity: return "modularity";
    }
    throw std::logic_error("unknown algorithm");
}

inline Algorithm algorithm_from_string(const std::string& s) {
    if (s == "global-p") return Algorithm::GlobalP;
    if (s == "localized") return Algorithm::Localized;
    if (s == "modularity") return Algorithm::Modularity;
    throw std::invalid_argument("unknown algorithm '" + s + "'");
}

struct ExperimentSpec {
    BlockModelSpec model;
    Algorithm algorithm = Algorithm::Localized;
    double p = 0.0;        // global-p only
    double alpha = 0.025;  // localized only
    int replications = 1;
    std::uint64_t seed_base = 1;
    std::vector<std::string> metrics{"nmi", "ari", "error-matrix"};
    SolverConfig solver;
};

inline void validate(const ExperimentSpec& spec) {
    require_valid(spec.model);
    if (spec.replications < 1) throw std::invalid_argument("experiment: replications must be >= 1");
    if (spec.algorithm == Algorithm::GlobalP && !(spec.p >= 0.0 && spec.p <= 1.0))
        throw std::invalid_argument("experiment: global-p needs p in [0,1]");
    if (spec.algorithm == Algorithm::Localized && !(spec.alpha > 0.0 && spec.alpha < 0.5))
        throw std::invalid_argument("experiment: localized needs alpha in (0, 0.5)");
    for (const auto& m : spec.metrics)
        if (m != "nmi" && m != "ari" && m != "error-matrix")
            throw std::invalid_argument("experiment: unknown metric '" + m + "'");
}

struct ReplicationOutcome {
    double nmi = 0.0;
    double ari = 0.0;
    std::vector<std::vector<double>> eps;
    bool failed = false;
    std::string failure;
};

struct ScalarSummary {
    std::string metric;
    double mean = 0.0;
    double se = 0.0;
    bool has_se = false;
};

struct Report {
    int replications = 0;
    double elapsed_ms = 0.0;
    std::vector<ScalarSummary> scalars;
    bool has_error_matrix = false;
    std::vector<std::vector<double>> eps_mean;
    std::vector<std::vector<double>> eps_se;
    std::vector<ReplicationOutcome> outcomes;  // replication order
    ExperimentSpec spec;
};

inline Partition run_algorithm(const Graph& g, const ExperimentSpec& spec, std::uint64_t seed) {
    SolverConfig solver = spec.solver;
    solver.seed = seed;
    switch (spec.algorithm) {
        case Algorithm::GlobalP: {
            GlobalClusterConfig cfg;
            cfg.p = spec.p;
            cfg.solver = solver;
            return cluster_global(g, cfg).partition;
        }
        case Algorithm::Localized: {
            LocalClusterConfig cfg;
            cfg.alpha = spec.alpha;
            cfg.solver = solver;
            return cluster_localized(g, cfg).to_partition();
        }
        case Algorithm::Modularity: {
            ModularityConfig cfg;
            cfg.solver = solver;
            return cluster_modularity(g, cfg).partition;
        }
    }
    throw std::logic_error("unknown algorithm");
}

/// Runs the replications (in parallel when jobs > 1) and aggregates in
/// replication order, so the summary does not depend on the job count.
inline Report run_experiment(const ExperimentSpec& spec, int jobs = 1) {
    validate(spec);
    const auto t0 = std::chrono::steady_clock::now();

    const int reps = spec.replications;
    std::vector<ReplicationOutcome> outcomes(static_cast<std::size_t>(reps));

    auto run_one = [&spec](int r) {
        ReplicationOutcome out;
        try {
            const std::uint64_t seed = spec.seed_base + static_cast<std::uint64_t>(r);
            const GeneratedNetwork net = generate(spec.model, seed);
            const Partition pred = run_algorithm(net.graph, spec, seed);
            out.nmi = nmi(net.truth, pred);
            out.ari = ari(net.truth, pred);
            const ErrorMatrix em = error_matrix(net.truth, pred);
            out.eps = em.eps;
        } catch (const std::exception& e) {
            out.failed = true;
            out.failure = e.what();
        }
        return out;
    };

    if (jobs <= 1 || reps == 1) {
        for (int r = 0; r < reps; ++r) outcomes[static_cast<std::size_t>(r)] = run_one(r);
    } else {
        std::atomic<int> next{0};
        auto worker = [&]() {
            while (true) {
                const int r = next.fetch_add(1);
                if (r >= reps) break;
                outcomes[static_cast<std::size_t>(r)] = run_one(r);
            }
        };
        std::vector<std::thread> pool;
        const int count = std::min(jobs, reps);
        pool.reserve(static_cast<std::size_t>(count));
        for (int t = 0; t < count; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    Report report;
    report.spec = spec;
    report.replications = reps;

    std::vector<double> nmis, aris;
    std::vector<std::vector<std::vector<double>>> eps_series;
    for (const auto& out : outcomes) {
        if (out.failed) continue;
        nmis.push_back(out.nmi);
        aris.push_back(out.ari);
        eps_series.push_back(out.eps);
    }

    auto summarize = [](const std::vector<double>& xs) {
        ScalarSummary s;
        if (xs.size() >= 2) {
            const Aggregate agg = aggregate(xs);
            s.mean = agg.mean;
            s.se = agg.se;
            s.has_se = true;
        } else if (xs.size() == 1) {
            s.mean = xs[0];
        }
        return s;
    };

    for (const auto& metric : spec.metrics) {
        if (metric == "nmi") {
            auto s = summarize(nmis);
            s.metric = "nmi";
            report.scalars.push_back(s);
        } else if (metric == "ari") {
            auto s = summarize(aris);
            s.metric = "ari";
            report.scalars.push_back(s);
        } else if (metric == "error-matrix" && !eps_series.empty()) {
            const std::size_t h = eps_series.front().size();
            report.has_error_matrix = true;
            report.eps_mean.assign(h, std::vector<double>(h, 0.0));
            report.eps_se.assign(h, std::vector<double>(h, 0.0));
            std::vector<double> cell(eps_series.size());
            for (std::size_t k = 0; k < h; ++k)
                for (std::size_t l = 0; l < h; ++l) {
                    for (std::size_t r = 0; r < eps_series.size(); ++r)
                        cell[r] = eps_series[r][k][l];
                    if (cell.size() >= 2) {
                        const Aggregate agg = aggregate(cell);
                        report.eps_mean[k][l] = agg.mean;
                        report.eps_se[k][l] = agg.se;
                    } else if (cell.size() == 1) {
                        report.eps_mean[k][l] = cell[0];
                    }
                }
        }
    }

    report.outcomes = std::move(outcomes);
    const auto t1 = std::chrono::steady_clock::now();
    report.elapsed_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return report;
}

inline ExperimentSpec experiment_from_json(const json& j) {
    ExperimentSpec spec;
    if (!j.is_object() || !j.contains("model") || !j.contains("algorithm"))
        throw io::parse_error("experiment spec needs 'model' and 'algorithm'");
    spec.model = io::spec_from_json(j.at("model"));
    spec.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
    if (j.contains("p")) spec.p = j.at("p").get<double>();
    if (j.contains("alpha")) spec.alpha = j.at("alpha").get<double>();
    if (j.contains("replications")) spec.replications = j.at("replications").get<int>();
    if (j.contains("seed_base")) spec.seed_base = j.at("seed_base").get<std::uint64_t>();
    if (j.contains("metrics")) spec.metrics = j.at("metrics").get<std::vector<std::string>>();
    if (j.contains("tol")) spec.solver.tol = j.at("tol").get<double>();
    if (j.contains("max_iter")) spec.solver.max_iter = j.at("max_iter").get<int>();
    return spec;
}

inline json report_to_json(const Report& report, bool include_series = false) {
    json metrics = json::array();
    for (const auto& s : report.scalars) {
        json entry{{"metric", s.metric}, {"mean", s.mean}};
        if (s.has_se) entry["se"] = s.se;
        metrics.push_back(entry);
    }
    if (report.has_error_matrix) {
        json entry{{"metric", "error-matrix"}, {"mean", report.eps_mean}};
        if (report.replications >= 2) entry["se"] = report.eps_se;
        metrics.push_back(entry);
    }
    json config{{"algorithm", to_string(report.spec.algorithm)},
                {"model", io::spec_to_json(report.spec.model)},
                {"seed_base", report.spec.seed_base}};
    if (report.spec.algorithm == Algorithm::GlobalP) config["p"] = report.spec.p;
    if (report.spec.algorithm == Algorithm::Localized) config["alpha"] = report.spec.alpha;
    json j{{"replications", report.replications},
           {"elapsed_ms", report.elapsed_ms},
           {"metrics", metrics},
           {"config", config}};
    int failures = 0;
    for (const auto& out : report.outcomes) failures += out.failed;
    if (failures > 0) j["failed_replications"] = failures;
    if (include_series) {
        json series = json::array();
        for (const auto& out : report.outcomes) {
            json row{{"nmi", out.nmi}, {"ari", out.ari}, {"failed", out.failed}};
            if (out.failed) row["failure"] = out.failure;
            series.push_back(row);
        }
        j["series"] = series;
    }
    return j;
}

}  // namespace pclique::bench
