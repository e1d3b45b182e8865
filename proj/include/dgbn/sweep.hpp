#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <future>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dgbn/errors.hpp"
#include "dgbn/scoring.hpp"
#include "dgbn/search.hpp"
#include "dgbn/serialize.hpp"
#include "dgbn/structure.hpp"
#include "dgbn/table_score.hpp"

namespace dgbn {

// One learned model in a sweep: its absolute log score, the score relative to
// the worst cell of its row, the wall time the search took, and the structure
// itself (plus, when the caller saves structures to disk, a file reference).
struct SweepCell {
    std::string column;
    double log_score = 0.0;
    double relative = 0.0;
    double wall_seconds = 0.0;
    NetworkStructure structure;
    std::string structure_ref;
};

struct SweepRow {
    std::string label;
    std::vector<SweepCell> cells;
};

struct SweepReport {
    std::string kind;  // "static", "fixed", or "full"
    std::vector<std::string> columns;
    std::vector<SweepRow> rows;
};

namespace detail {

// relative = score minus the row minimum, matching the zero-baseline
// convention of the experiment tables: the worst cell reads 0 and every
// other cell is the log Bayes factor against it.
inline void finalize_relatives(SweepReport& report) {
    for (auto& row : report.rows) {
        if (row.cells.empty()) continue;
        double lo = row.cells.front().log_score;
        for (const auto& c : row.cells) lo = std::min(lo, c.log_score);
        for (auto& c : row.cells) c.relative = c.log_score - lo;
    }
}

// Run cell jobs in order, or through std::async when threads > 1. Results
// are identical either way; only the wall time changes.
inline void run_jobs(std::vector<std::function<void()>>& jobs, int threads) {
    if (threads <= 1) {
        for (auto& j : jobs) j();
        return;
    }
    std::size_t next = 0;
    while (next < jobs.size()) {
        std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(threads), jobs.size() - next);
        std::vector<std::future<void>> futures;
        futures.reserve(batch);
        for (std::size_t i = 0; i < batch; ++i)
            futures.push_back(std::async(std::launch::async, jobs[next + i]));
        for (auto& f : futures) f.get();
        next += batch;
    }
}

inline double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Complete trees for every node of G. Refuses absurdly large parent spaces.
inline NetworkStructure complete_tree_structure(const GlobalStructure& g) {
    NetworkStructure out;
    out.global = g;
    for (int i = 0; i < g.num_vars(); ++i) {
        ParentSpace space = g.parent_space(i);
        if (space.overflow() || space.size() > 1'000'000ULL)
            throw invariant_error("complete-table model: parent space of '" + g.domain().name(i) +
                                  "' too large to materialize");
        out.graphs.push_back(build_complete_tree(i, g.domain(), g.parents(i)));
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Static protocol: a single target node with a fixed parent set; one row per
// parameter prior, one column per operator set; each cell greedily learns the
// target's decision graph from a single-node start.
inline SweepReport sweep_static(const Dataset& data, int target, const std::vector<int>& parents,
                                const std::vector<OperatorSet>& opsets,
                                const std::vector<std::pair<std::string, ScoreConfig>>& priors, int threads = 1) {
    SweepReport report;
    report.kind = "static";
    for (const auto& o : opsets) report.columns.push_back(o.label());
    report.rows.resize(priors.size());

    GlobalStructure base((Domain(data.domain())));
    base.set_parents(target, parents);

    std::vector<std::function<void()>> jobs;
    for (std::size_t r = 0; r < priors.size(); ++r) {
        report.rows[r].label = priors[r].first;
        report.rows[r].cells.resize(opsets.size());
        for (std::size_t c = 0; c < opsets.size(); ++c)
            jobs.push_back([&, r, c] {
                auto start = std::chrono::steady_clock::now();
                const ScoreConfig& config = priors[r].second;
                LocalSearchResult local =
                    local_greedy(data, config, target, parents, DecisionGraph(target), opsets[c]);
                NetworkStructure learned(GlobalStructure(base), {});
                for (int i = 0; i < data.domain().size(); ++i)
                    learned.graphs.push_back(i == target ? local.graph : DecisionGraph(i));
                SweepCell& cell = report.rows[r].cells[c];
                cell.column = opsets[c].label();
                cell.structure = std::move(learned);
                cell.log_score = log_score(cell.structure, data, config);
                cell.wall_seconds = detail::seconds_since(start);
            });
    }
    detail::run_jobs(jobs, threads);
    detail::finalize_relatives(report);
    return report;
}

// ---------------------------------------------------------------------------
// Fixed-structure protocol: G is given; each operator-set column learns the
// decision graphs of every node; the COMP column scores G with complete
// trees.
inline SweepReport sweep_all_nodes_fixed_G(const Dataset& data, const GlobalStructure& g,
                                           const std::vector<OperatorSet>& opsets, const std::string& prior_label,
                                           const ScoreConfig& config, int threads = 1) {
    if (!g.is_acyclic()) throw invariant_error("fixed-structure sweep: G is cyclic");
    SweepReport report;
    report.kind = "fixed";
    for (const auto& o : opsets) report.columns.push_back(o.label());
    report.columns.push_back("COMP");
    report.rows.resize(1);
    report.rows[0].label = prior_label;
    report.rows[0].cells.resize(opsets.size() + 1);

    std::vector<std::function<void()>> jobs;
    for (std::size_t c = 0; c < opsets.size(); ++c)
        jobs.push_back([&, c] {
            auto start = std::chrono::steady_clock::now();
            NetworkStructure learned(GlobalStructure(g), {});
            LogGammaIntTable table;
            for (int i = 0; i < data.domain().size(); ++i)
                learned.graphs.push_back(
                    local_greedy(data, config, i, g.parents(i), DecisionGraph(i), opsets[c], &table).graph);
            SweepCell& cell = report.rows[0].cells[c];
            cell.column = opsets[c].label();
            cell.structure = std::move(learned);
            cell.log_score = log_score(cell.structure, data, config);
            cell.wall_seconds = detail::seconds_since(start);
        });
    jobs.push_back([&] {
        auto start = std::chrono::steady_clock::now();
        SweepCell& cell = report.rows[0].cells[opsets.size()];
        cell.column = "COMP";
        cell.structure = detail::complete_tree_structure(g);
        cell.log_score = log_score(cell.structure, data, config);
        cell.wall_seconds = detail::seconds_since(start);
    });
    detail::run_jobs(jobs, threads);
    detail::finalize_relatives(report);
    return report;
}

// ---------------------------------------------------------------------------
// Full-search protocol: each operator-set column runs the combined
// global+local search; COMP runs edge-operation hill climbing over
// complete-table structures (optionally from a given starting G).
inline SweepReport sweep_full_search(const Dataset& data, const std::vector<OperatorSet>& opsets,
                                     const std::string& prior_label, const ScoreConfig& config,
                                     const SearchConstraints& constraints = {},
                                     std::optional<GlobalStructure> comp_initial = std::nullopt, int threads = 1) {
    SweepReport report;
    report.kind = "full";
    for (const auto& o : opsets) report.columns.push_back(o.label());
    report.columns.push_back("COMP");
    report.rows.resize(1);
    report.rows[0].label = prior_label;
    report.rows[0].cells.resize(opsets.size() + 1);

    std::vector<std::function<void()>> jobs;
    for (std::size_t c = 0; c < opsets.size(); ++c)
        jobs.push_back([&, c] {
            auto start = std::chrono::steady_clock::now();
            SearchResult res = combined_greedy(data, config, opsets[c], constraints);
            SweepCell& cell = report.rows[0].cells[c];
            cell.column = opsets[c].label();
            cell.structure = std::move(res.structure);
            cell.log_score = log_score(cell.structure, data, config);
            cell.wall_seconds = detail::seconds_since(start);
        });
    jobs.push_back([&] {
        auto start = std::chrono::steady_clock::now();
        GlobalStructure g0 = comp_initial ? *comp_initial : GlobalStructure(Domain(data.domain()));
        GlobalStructure learned = table_greedy(data, config, std::move(g0), constraints);
        SweepCell& cell = report.rows[0].cells[opsets.size()];
        cell.column = "COMP";
        cell.structure = detail::complete_tree_structure(learned);
        cell.log_score = log_score(cell.structure, data, config);
        cell.wall_seconds = detail::seconds_since(start);
    });
    detail::run_jobs(jobs, threads);
    detail::finalize_relatives(report);
    return report;
}

// ---------------------------------------------------------------------------
// Rendering

// Aligned text table of relative scores, one row per prior, with an optional
// timing block. Pass include_timing = false for byte-reproducible output.
inline std::string render_text(const SweepReport& report, bool include_timing = true) {
    auto fmt = [](double v, const char* format) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), format, v);
        return std::string(buf);
    };
    std::size_t label_w = 0;
    for (const auto& row : report.rows) label_w = std::max(label_w, row.label.size());
    std::vector<std::size_t> col_w(report.columns.size());
    for (std::size_t c = 0; c < report.columns.size(); ++c) {
        col_w[c] = report.columns[c].size();
        for (const auto& row : report.rows)
            col_w[c] = std::max(col_w[c], fmt(row.cells[c].relative, "%.2f").size());
    }
    std::string out;
    auto pad = [&](const std::string& s, std::size_t w) {
        for (std::size_t i = s.size(); i < w; ++i) out += ' ';
        out += s;
    };
    pad("", label_w);
    for (std::size_t c = 0; c < report.columns.size(); ++c) {
        out += "  ";
        pad(report.columns[c], col_w[c]);
    }
    out += '\n';
    for (const auto& row : report.rows) {
        pad(row.label, label_w);
        for (std::size_t c = 0; c < row.cells.size(); ++c) {
            out += "  ";
            pad(fmt(row.cells[c].relative, "%.2f"), col_w[c]);
        }
        out += '\n';
    }
    out += '\n';
    out += "absolute log scores:\n";
    for (const auto& row : report.rows) {
        pad(row.label, label_w);
        for (const auto& cell : row.cells) {
            out += "  ";
            out += fmt(cell.log_score, "%.4f");
        }
        out += '\n';
    }
    if (include_timing) {
        out += '\n';
        out += "wall seconds:\n";
        for (const auto& row : report.rows) {
            pad(row.label, label_w);
            for (const auto& cell : row.cells) {
                out += "  ";
                out += fmt(cell.wall_seconds, "%.3f");
            }
            out += '\n';
        }
    }
    return out;
}

inline json report_to_json(const SweepReport& report, bool include_timing = true) {
    json rows = json::array();
    for (const auto& row : report.rows) {
        json cells = json::array();
        for (const auto& cell : row.cells) {
            json jc{{"column", cell.column}, {"log_score", cell.log_score}, {"relative", cell.relative}};
            if (include_timing) jc["wall_seconds"] = cell.wall_seconds;
            if (!cell.structure_ref.empty()) jc["structure"] = cell.structure_ref;
            cells.push_back(std::move(jc));
        }
        rows.push_back(json{{"label", row.label}, {"cells", std::move(cells)}});
    }
    return json{{"format", "dgbn-sweep"}, {"kind", report.kind}, {"columns", report.columns}, {"rows", std::move(rows)}};
}

}  // namespace dgbn
