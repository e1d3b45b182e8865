// Command-line front end: learn / score / sample / genbench / sweep.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dgbn/dgbn.hpp"

namespace {

using dgbn::json;

struct PriorSpec {
    std::string text;
    std::string label;
};

// "uniform" | "upn:<ess>" | "pn:<network-path>:<ess>"
dgbn::ScoreConfig make_config(const std::string& prior, const std::string& structure_prior,
                              std::string* label_out = nullptr) {
    dgbn::ScoreConfig config;
    std::string label;
    if (prior == "uniform") {
        config.parameter_prior = dgbn::ParameterPrior::uniform;
        label = "uniform";
    } else if (prior.rfind("upn:", 0) == 0) {
        config.parameter_prior = dgbn::ParameterPrior::uniform_network;
        try {
            config.ess = std::stod(prior.substr(4));
        } catch (const std::exception&) {
            throw dgbn::config_error("prior: cannot parse equivalent sample size in '" + prior + "'");
        }
        label = "U-PN " + prior.substr(4);
    } else if (prior.rfind("pn:", 0) == 0) {
        std::string rest = prior.substr(3);
        auto colon = rest.rfind(':');
        if (colon == std::string::npos)
            throw dgbn::config_error("prior: expected pn:<network-path>:<ess>, got '" + prior + "'");
        config.parameter_prior = dgbn::ParameterPrior::prior_network;
        try {
            config.ess = std::stod(rest.substr(colon + 1));
        } catch (const std::exception&) {
            throw dgbn::config_error("prior: cannot parse equivalent sample size in '" + prior + "'");
        }
        config.prior_network =
            std::make_shared<dgbn::ParameterizedNetwork>(dgbn::load_network(rest.substr(0, colon)));
        label = "PN " + rest.substr(colon + 1);
    } else {
        throw dgbn::config_error("prior: expected uniform, upn:<ess> or pn:<path>:<ess>, got '" + prior + "'");
    }
    if (structure_prior == "uniform") {
        config.structure_prior = dgbn::StructurePrior::uniform;
    } else if (structure_prior.rfind("kappa:", 0) == 0) {
        config.structure_prior = dgbn::StructurePrior::kappa;
        try {
            config.kappa = std::stod(structure_prior.substr(6));
        } catch (const std::exception&) {
            throw dgbn::config_error("structure prior: cannot parse kappa in '" + structure_prior + "'");
        }
    } else {
        throw dgbn::config_error("structure prior: expected uniform or kappa:<k>, got '" + structure_prior + "'");
    }
    config.check();
    if (label_out) *label_out = label;
    return config;
}

std::vector<dgbn::OperatorSet> parse_opsets(const std::string& text) {
    std::vector<dgbn::OperatorSet> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(dgbn::OperatorSet::parse(item));
    if (out.empty()) throw dgbn::config_error("opsets: none given");
    return out;
}

std::vector<int> load_order_file(const std::string& path, const dgbn::Domain& domain) {
    std::ifstream in(path);
    if (!in) throw dgbn::data_error("order file: cannot open '" + path + "'");
    std::vector<int> order;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        int idx = domain.index_of(line);
        if (idx < 0) throw dgbn::data_error("order file: unknown variable '" + line + "'");
        order.push_back(idx);
    }
    if (static_cast<int>(order.size()) != domain.size())
        throw dgbn::data_error("order file: expected every variable exactly once");
    return order;
}

int count_leaves(const dgbn::NetworkStructure& s) {
    int total = 0;
    for (const auto& g : s.graphs) total += g.num_leaves();
    return total;
}

struct CommonArgs {
    std::string prior = "uniform";
    std::string structure_prior = "uniform";
    bool header = true;
    std::uint64_t seed = 0;
    int threads = 1;
};

json config_json(const CommonArgs& c, json extra) {
    extra["prior"] = c.prior;
    extra["structure_prior"] = c.structure_prior;
    extra["header"] = c.header;
    extra["seed"] = c.seed;
    extra["threads"] = c.threads;
    return extra;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian-network structure learning with decision-graph local structure"};
    app.require_subcommand(1);

    CommonArgs common;

    // ---- learn ----
    auto* learn = app.add_subcommand("learn", "learn a structure from CSV data");
    std::string learn_data, learn_out, learn_opset = "CBM", learn_order, learn_fixed;
    int learn_max_parents = -1;
    learn->add_option("--data", learn_data, "input CSV")->required();
    learn->add_option("--out", learn_out, "output structure file")->required();
    learn->add_option("--prior", common.prior, "uniform | upn:<ess> | pn:<path>:<ess>");
    learn->add_option("--structure-prior", common.structure_prior, "uniform | kappa:<k>");
    learn->add_option("--opset", learn_opset, "operators to use, letters from CBM");
    learn->add_option("--order", learn_order, "file with one variable name per line; parents must precede children");
    learn->add_option("--max-parents", learn_max_parents, "cap on parent-set size");
    learn->add_option("--fixed-structure", learn_fixed, "structure file; keep its edges, learn local graphs only");
    learn->add_option("--seed", common.seed, "recorded in outputs (the search itself is deterministic)");
    learn->add_option("--threads", common.threads, "worker threads");
    learn->add_flag("--header,!--no-header", common.header, "input CSV has a header row (default on)");

    // ---- score ----
    auto* score = app.add_subcommand("score", "score a structure against data");
    std::string score_data, score_structure;
    score->add_option("--data", score_data, "input CSV")->required();
    score->add_option("--structure", score_structure, "structure file")->required();
    score->add_option("--prior", common.prior, "uniform | upn:<ess> | pn:<path>:<ess>");
    score->add_option("--structure-prior", common.structure_prior, "uniform | kappa:<k>");
    score->add_flag("--header,!--no-header", common.header, "input CSV has a header row (default on)");

    // ---- sample ----
    auto* sample = app.add_subcommand("sample", "draw cases from a network file");
    std::string sample_network, sample_out;
    std::uint64_t sample_n = 0;
    sample->add_option("--network", sample_network, "network file")->required();
    sample->add_option("--n", sample_n, "number of cases")->required();
    sample->add_option("--out", sample_out, "output CSV")->required();
    sample->add_option("--seed", common.seed, "sampling seed");
    sample->add_flag("--header,!--no-header", common.header, "write a header row (default on)");

    // ---- genbench ----
    auto* genbench = app.add_subcommand("genbench", "generate a synthetic benchmark network");
    std::string bench_out;
    int bench_vars = 0;
    double bench_density = 0.5;
    genbench->add_option("--vars", bench_vars, "number of variables (>= 3)")->required();
    genbench->add_option("--density", bench_density, "parameter-equality density in [0, 1]");
    genbench->add_option("--out", bench_out, "output network file")->required();
    genbench->add_option("--seed", common.seed, "generation seed");

    // ---- sweep ----
    auto* sweep = app.add_subcommand("sweep", "run an operator-set sweep and write a report");
    std::string sweep_data, sweep_mode = "full", sweep_target, sweep_structure, sweep_out, sweep_order,
                sweep_opsets = "C,B,CB,CM,BM,CBM", sweep_priors, sweep_save_dir;
    int sweep_max_parents = -1;
    bool sweep_no_timing = false;
    sweep->add_option("--data", sweep_data, "input CSV")->required();
    sweep->add_option("--mode", sweep_mode, "static | fixed | full");
    sweep->add_option("--target", sweep_target, "static mode: target variable name");
    sweep->add_option("--structure", sweep_structure, "fixed mode: structure file providing G; full mode: COMP start");
    sweep->add_option("--opsets", sweep_opsets, "comma-separated operator sets (default C,B,CB,CM,BM,CBM)");
    sweep->add_option("--priors", sweep_priors, "comma-separated priors; static mode rows (default: --prior)");
    sweep->add_option("--prior", common.prior, "prior for fixed/full mode");
    sweep->add_option("--structure-prior", common.structure_prior, "uniform | kappa:<k>");
    sweep->add_option("--order", sweep_order, "ordering-constraint file for full mode");
    sweep->add_option("--max-parents", sweep_max_parents, "cap on parent-set size (full mode)");
    sweep->add_option("--out", sweep_out, "output base path; writes <out>.txt and <out>.json")->required();
    sweep->add_option("--save-structures", sweep_save_dir, "directory for per-cell structure files");
    sweep->add_option("--seed", common.seed, "recorded in outputs");
    sweep->add_option("--threads", common.threads, "cells run concurrently up to this many");
    sweep->add_flag("--no-timing", sweep_no_timing, "omit wall times from the report files");
    sweep->add_flag("--header,!--no-header", common.header, "input CSV has a header row (default on)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const auto t0 = std::chrono::steady_clock::now();
        auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
        const dgbn::HeaderPolicy hp = common.header ? dgbn::HeaderPolicy::first_row : dgbn::HeaderPolicy::none;

        if (*learn) {
            dgbn::ScoreConfig config = make_config(common.prior, common.structure_prior);
            dgbn::OperatorSet opset = dgbn::OperatorSet::parse(learn_opset);
            dgbn::Dataset data = dgbn::load_csv(learn_data, hp);
            dgbn::SearchConstraints constraints;
            if (learn_max_parents >= 0) constraints.max_parents = learn_max_parents;
            if (!learn_order.empty()) constraints.order = load_order_file(learn_order, data.domain());
            std::optional<dgbn::NetworkStructure> initial;
            if (!learn_fixed.empty()) {
                constraints.fixed_global = true;
                initial = dgbn::load_structure(learn_fixed);
            }
            dgbn::SearchResult result = dgbn::combined_greedy(data, config, opset, constraints, std::move(initial));

            json doc = dgbn::structure_to_json(result.structure);
            doc["score"] = result.log_score;
            doc["summary"] = json{{"edges", result.structure.global.num_edges()},
                                  {"leaves", count_leaves(result.structure)},
                                  {"rounds", result.rounds},
                                  {"cases", data.num_cases()}};
            doc["config"] = config_json(common, json{{"command", "learn"},
                                                     {"data", learn_data},
                                                     {"opset", opset.label()},
                                                     {"order", learn_order},
                                                     {"max_parents", learn_max_parents},
                                                     {"fixed_structure", learn_fixed}});
            dgbn::save_json(doc, learn_out);
            std::printf("log score     %.6f\n", result.log_score);
            std::printf("edges         %zu\n", result.structure.global.num_edges());
            std::printf("leaves        %d\n", count_leaves(result.structure));
            std::printf("rounds        %d\n", result.rounds);
            std::printf("wall seconds  %.3f\n", elapsed());
            std::printf("wrote %s\n", learn_out.c_str());
        } else if (*score) {
            dgbn::ScoreConfig config = make_config(common.prior, common.structure_prior);
            dgbn::Dataset data = dgbn::load_csv(score_data, hp);
            dgbn::NetworkStructure s = dgbn::load_structure(score_structure);
            if (!(s.domain() == data.domain()))
                throw dgbn::data_error("score: structure and data domains differ");
            std::printf("%.17g\n", dgbn::log_score(s, data, config));
        } else if (*sample) {
            dgbn::ParameterizedNetwork net = dgbn::load_network(sample_network);
            dgbn::Dataset data = dgbn::forward_sample(net, sample_n, common.seed);
            dgbn::save_csv(data, sample_out, common.header);
            std::printf("wrote %llu cases to %s\n", static_cast<unsigned long long>(sample_n), sample_out.c_str());
        } else if (*genbench) {
            dgbn::GenerativeSpec spec = dgbn::make_local_structure_benchmark(bench_vars, common.seed, bench_density);
            json doc = dgbn::network_to_json(spec.network);
            doc["seed"] = spec.seed;
            doc["config"] = config_json(common, json{{"command", "genbench"},
                                                     {"vars", bench_vars},
                                                     {"density", bench_density}});
            dgbn::save_json(doc, bench_out);
            std::printf("wrote %s\n", bench_out.c_str());
        } else if (*sweep) {
            dgbn::Dataset data = dgbn::load_csv(sweep_data, hp);
            std::vector<dgbn::OperatorSet> opsets = parse_opsets(sweep_opsets);
            dgbn::SweepReport report;

            if (sweep_mode == "static") {
                if (sweep_target.empty()) throw dgbn::config_error("sweep: static mode needs --target");
                int target = data.domain().index_of(sweep_target);
                if (target < 0) throw dgbn::data_error("sweep: unknown variable '" + sweep_target + "'");
                std::vector<int> parents;
                for (int i = 0; i < data.domain().size(); ++i)
                    if (i != target) parents.push_back(i);
                std::vector<std::pair<std::string, dgbn::ScoreConfig>> priors;
                std::string priors_text = sweep_priors.empty() ? common.prior : sweep_priors;
                std::stringstream ss(priors_text);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    if (item.empty()) continue;
                    std::string label;
                    dgbn::ScoreConfig cfg = make_config(item, common.structure_prior, &label);
                    priors.emplace_back(label, std::move(cfg));
                }
                if (priors.empty()) throw dgbn::config_error("sweep: no priors given");
                report = dgbn::sweep_static(data, target, parents, opsets, priors, common.threads);
            } else if (sweep_mode == "fixed") {
                if (sweep_structure.empty()) throw dgbn::config_error("sweep: fixed mode needs --structure");
                dgbn::NetworkStructure s = dgbn::load_structure(sweep_structure);
                if (!(s.domain() == data.domain()))
                    throw dgbn::data_error("sweep: structure and data domains differ");
                std::string label;
                dgbn::ScoreConfig config = make_config(common.prior, common.structure_prior, &label);
                report = dgbn::sweep_all_nodes_fixed_G(data, s.global, opsets, label, config, common.threads);
            } else if (sweep_mode == "full") {
                std::string label;
                dgbn::ScoreConfig config = make_config(common.prior, common.structure_prior, &label);
                dgbn::SearchConstraints constraints;
                if (sweep_max_parents >= 0) constraints.max_parents = sweep_max_parents;
                if (!sweep_order.empty()) constraints.order = load_order_file(sweep_order, data.domain());
                std::optional<dgbn::GlobalStructure> comp_initial;
                if (!sweep_structure.empty()) comp_initial = dgbn::load_structure(sweep_structure).global;
                report = dgbn::sweep_full_search(data, opsets, label, config, constraints, std::move(comp_initial),
                                                 common.threads);
            } else {
                throw dgbn::config_error("sweep: unknown mode '" + sweep_mode + "'");
            }

            if (!sweep_save_dir.empty()) {
                for (auto& row : report.rows)
                    for (auto& cell : row.cells) {
                        std::string name = report.kind + "_" + row.label + "_" + cell.column + ".json";
                        for (auto& ch : name)
                            if (ch == ' ' || ch == '/') ch = '-';
                        std::string path = sweep_save_dir + "/" + name;
                        json doc = dgbn::structure_to_json(cell.structure);
                        doc["score"] = cell.log_score;
                        dgbn::save_json(doc, path);
                        cell.structure_ref = path;
                    }
            }

            json doc = dgbn::report_to_json(report, !sweep_no_timing);
            doc["config"] = config_json(common, json{{"command", "sweep"},
                                                     {"data", sweep_data},
                                                     {"mode", sweep_mode},
                                                     {"opsets", sweep_opsets},
                                                     {"priors", sweep_priors},
                                                     {"target", sweep_target},
                                                     {"structure", sweep_structure},
                                                     {"order", sweep_order},
                                                     {"max_parents", sweep_max_parents}});
            dgbn::save_json(doc, sweep_out + ".json");
            std::string text = dgbn::render_text(report, !sweep_no_timing);
            std::ofstream txt(sweep_out + ".txt");
            if (!txt) throw dgbn::data_error("cannot write '" + sweep_out + ".txt'");
            txt << text;
            std::fputs(text.c_str(), stdout);
        }
    } catch (const dgbn::config_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const dgbn::data_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    }
    return 0;
}
