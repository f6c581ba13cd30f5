// Command-line front end: SBM simulation, clustering, evaluation, replication
// benchmarks, and DOT export. Exit codes: 0 success, 2 input error,
// 3 numerical failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pclique/bench.hpp"
#include "pclique/io.hpp"
#include "pclique/pclique.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

using nlohmann::json;

void write_json_output(const json& j, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw pclique::io::parse_error("cannot write: " + out_path);
    out << j.dump(2) << "\n";
}

int cmd_simulate(const std::string& spec_path, std::uint64_t seed, bool shuffle,
                 const std::string& edges_path, const std::string& truth_path) {
    const pclique::BlockModelSpec spec = pclique::io::read_spec_file(spec_path);
    pclique::require_valid(spec);
    const pclique::GeneratedNetwork net = pclique::generate(spec, seed, shuffle);
    pclique::io::write_edge_list_file(edges_path, net.graph);
    pclique::io::write_membership_file(truth_path, net.truth);
    std::cerr << "simulated " << net.graph.node_count() << " nodes, " << net.graph.edge_count()
              << " edges (expected density " << net.expected_density << ")\n";
    return 0;
}

int cmd_cluster(const std::string& edges_path, const std::string& algorithm, double p,
                double alpha, std::uint64_t seed, double tol, int max_iter,
                const std::string& out_path, const std::string& tree_path) {
    const pclique::Graph g = pclique::io::read_edge_list_file(edges_path);
    if (g.node_count() == 0) throw pclique::io::parse_error(edges_path + ": empty graph");

    pclique::SolverConfig solver;
    solver.seed = seed;
    if (tol > 0.0) solver.tol = tol;
    if (max_iter > 0) solver.max_iter = max_iter;

    pclique::Partition result;
    if (algorithm == "global-p") {
        pclique::GlobalClusterConfig cfg;
        cfg.p = p;
        cfg.solver = solver;
        result = pclique::cluster_global(g, cfg).partition;
    } else if (algorithm == "localized") {
        pclique::LocalClusterConfig cfg;
        cfg.alpha = alpha;
        cfg.solver = solver;
        const pclique::ClusterTree tree = pclique::cluster_localized(g, cfg);
        result = tree.to_partition();
        if (!tree_path.empty())
            write_json_output(pclique::io::tree_to_json(tree), tree_path);
    } else if (algorithm == "modularity") {
        pclique::ModularityConfig cfg;
        cfg.solver = solver;
        result = pclique::cluster_modularity(g, cfg).partition;
    } else {
        throw std::invalid_argument("unknown algorithm '" + algorithm + "'");
    }
    pclique::io::write_membership_file(out_path, result);
    std::cerr << "clustered " << g.node_count() << " nodes into " << result.count
              << " communities\n";
    return 0;
}

int cmd_evaluate(const std::string& truth_path, const std::string& pred_path,
                 const std::string& metrics_arg, const std::string& out_path) {
    const pclique::Partition truth = pclique::io::read_membership_file(truth_path);
    const pclique::Partition pred = pclique::io::read_membership_file(pred_path);
    if (truth.membership.size() != pred.membership.size())
        throw pclique::io::parse_error("truth covers " + std::to_string(truth.membership.size()) +
                                       " nodes but prediction covers " +
                                       std::to_string(pred.membership.size()));

    std::vector<std::string> wanted;
    std::string token;
    std::istringstream ss(metrics_arg);
    while (std::getline(ss, token, ',')) wanted.push_back(token);

    json metrics = json::array();
    for (const auto& m : wanted) {
        if (m == "nmi") {
            metrics.push_back({{"metric", "nmi"}, {"mean", pclique::nmi(truth, pred)}});
        } else if (m == "ari") {
            metrics.push_back({{"metric", "ari"}, {"mean", pclique::ari(truth, pred)}});
        } else if (m == "error-matrix") {
            const pclique::ErrorMatrix em = pclique::error_matrix(truth, pred);
            metrics.push_back({{"metric", "error-matrix"}, {"mean", em.eps}});
        } else {
            throw std::invalid_argument("unknown metric '" + m + "'");
        }
    }
    write_json_output(json{{"replications", 1}, {"metrics", metrics}}, out_path);
    return 0;
}

int cmd_bench(const std::string& spec_path, int jobs, const std::string& out_path,
              const std::string& csv_path) {
    std::ifstream in(spec_path);
    if (!in) throw pclique::io::parse_error("cannot open experiment spec: " + spec_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw pclique::io::parse_error(spec_path + ": " + e.what());
    }
    const pclique::bench::ExperimentSpec spec = pclique::bench::experiment_from_json(j);
    const pclique::bench::Report report = pclique::bench::run_experiment(spec, jobs);

    if (!csv_path.empty()) {
        std::ofstream csv(csv_path);
        if (!csv) throw pclique::io::parse_error("cannot write: " + csv_path);
        csv << "replication,metric,value\n";
        for (std::size_t r = 0; r < report.outcomes.size(); ++r) {
            const auto& out = report.outcomes[r];
            if (out.failed) {
                csv << r << ",failed,1\n";
                continue;
            }
            csv << r << ",nmi," << out.nmi << "\n";
            csv << r << ",ari," << out.ari << "\n";
            for (std::size_t k = 0; k < out.eps.size(); ++k)
                for (std::size_t l = 0; l < out.eps[k].size(); ++l)
                    csv << r << ",eps_" << (k + 1) << "_" << (l + 1) << "," << out.eps[k][l]
                        << "\n";
        }
    }
    write_json_output(pclique::bench::report_to_json(report), out_path);
    return 0;
}

int cmd_export(const std::string& edges_path, const std::string& membership_path,
               const std::string& format, const std::string& out_path) {
    if (format != "dot") throw std::invalid_argument("unknown export format '" + format + "'");
    const pclique::Graph g = pclique::io::read_edge_list_file(edges_path);
    pclique::Partition part;
    if (membership_path.empty()) {
        std::vector<pclique::NodeId> labels(static_cast<std::size_t>(g.node_count()), 0);
        part = pclique::Partition::from_membership(std::move(labels));
    } else {
        part = pclique::io::read_membership_file(membership_path);
        if (static_cast<pclique::NodeId>(part.membership.size()) != g.node_count())
            throw pclique::io::parse_error("membership covers " +
                                           std::to_string(part.membership.size()) +
                                           " nodes but graph has " +
                                           std::to_string(g.node_count()));
    }
    std::ofstream out(out_path);
    if (!out) throw pclique::io::parse_error("cannot write: " + out_path);
    pclique::io::write_dot(out, g, part);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"p-clique community detection toolkit"};
    app.require_subcommand(1);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Generate a block-model network");
    std::string sim_spec, sim_edges = "network.edges", sim_truth = "truth.csv";
    std::uint64_t sim_seed = 1;
    bool sim_shuffle = false;
    simulate->add_option("spec", sim_spec, "Block model spec JSON")->required();
    simulate->add_option("--seed", sim_seed, "Generation seed");
    simulate->add_flag("--shuffle", sim_shuffle, "Shuffle node labels");
    simulate->add_option("--out-edges", sim_edges, "Edge list output path");
    simulate->add_option("--out-truth", sim_truth, "Ground-truth membership output path");

    // cluster
    auto* cluster = app.add_subcommand("cluster", "Cluster an edge-list graph");
    std::string clu_edges, clu_algorithm = "localized", clu_out = "membership.csv", clu_tree;
    double clu_p = 0.5, clu_alpha = 0.025, clu_tol = 0.0;
    int clu_max_iter = 0;
    std::uint64_t clu_seed = 1;
    cluster->add_option("edges", clu_edges, "Edge list input")->required();
    cluster->add_option("--algorithm", clu_algorithm, "global-p | localized | modularity");
    cluster->add_option("--p", clu_p, "Global clique-score threshold (global-p)");
    cluster->add_option("--alpha", clu_alpha, "Over-clustering tolerance (localized)");
    cluster->add_option("--seed", clu_seed, "Eigensolver start-vector seed");
    cluster->add_option("--tol", clu_tol, "Eigensolver residual tolerance");
    cluster->add_option("--max-iter", clu_max_iter, "Eigensolver matvec budget");
    cluster->add_option("--out", clu_out, "Membership CSV output path");
    cluster->add_option("--tree-out", clu_tree, "Cluster tree JSON output (localized)");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Compare a clustering against ground truth");
    std::string eva_truth, eva_pred, eva_metrics = "nmi,ari,error-matrix", eva_out;
    evaluate->add_option("--truth", eva_truth, "Ground-truth membership CSV")->required();
    evaluate->add_option("--pred", eva_pred, "Predicted membership CSV")->required();
    evaluate->add_option("--metrics", eva_metrics, "Comma list of nmi,ari,error-matrix");
    evaluate->add_option("--out", eva_out, "Report JSON output (default stdout)");

    // bench
    auto* bench = app.add_subcommand("bench", "Run a replicated experiment");
    std::string ben_spec, ben_out, ben_csv;
    int ben_jobs = 1;
    bench->add_option("spec", ben_spec, "Experiment spec JSON")->required();
    bench->add_option("--jobs", ben_jobs, "Parallel replications");
    bench->add_option("--out", ben_out, "Report JSON output (default stdout)");
    bench->add_option("--csv", ben_csv, "Per-replication CSV output");

    // export
    auto* export_cmd = app.add_subcommand("export", "Export an annotated graph");
    std::string exp_edges, exp_membership, exp_format = "dot", exp_out = "graph.dot";
    export_cmd->add_option("edges", exp_edges, "Edge list input")->required();
    export_cmd->add_option("--membership", exp_membership, "Membership CSV for colors");
    export_cmd->add_option("--format", exp_format, "Output format (dot)");
    export_cmd->add_option("--out", exp_out, "Output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (simulate->parsed())
            return cmd_simulate(sim_spec, sim_seed, sim_shuffle, sim_edges, sim_truth);
        if (cluster->parsed())
            return cmd_cluster(clu_edges, clu_algorithm, clu_p, clu_alpha, clu_seed, clu_tol,
                               clu_max_iter, clu_out, clu_tree);
        if (evaluate->parsed()) return cmd_evaluate(eva_truth, eva_pred, eva_metrics, eva_out);
        if (bench->parsed()) return cmd_bench(ben_spec, ben_jobs, ben_out, ben_csv);
        if (export_cmd->parsed()) return cmd_export(exp_edges, exp_membership, exp_format, exp_out);
    } catch (const pclique::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << " (after " << e.iterations()
                  << " matvecs)\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return 0;
}
