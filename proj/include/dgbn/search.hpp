#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dgbn/domain.hpp"
#include "dgbn/errors.hpp"
#include "dgbn/math.hpp"
#include "dgbn/node_evaluator.hpp"
#include "dgbn/operators.hpp"
#include "dgbn/scoring.hpp"
#include "dgbn/structure.hpp"
#include "dgbn/table_score.hpp"

namespace dgbn {

struct SearchConstraints {
    // Total order over variable indices; a parent must precede its child.
    std::optional<std::vector<int>> order;
    std::optional<int> max_parents;
    bool fixed_global = false;

    void check(const Domain& domain) const {
        if (order) {
            if (static_cast<int>(order->size()) != domain.size())
                throw config_error("constraints: order length does not match the domain");
            std::vector<char> seen(static_cast<std::size_t>(domain.size()), 0);
            for (int v : *order) {
                if (v < 0 || v >= domain.size() || seen[static_cast<std::size_t>(v)])
                    throw config_error("constraints: order is not a permutation of the variables");
                seen[static_cast<std::size_t>(v)] = 1;
            }
        }
        if (max_parents && *max_parents < 0) throw config_error("constraints: max parents must be nonnegative");
    }

    // position[v] = rank of v in the order (filled only when order is set)
    std::vector<int> order_positions(int n) const {
        std::vector<int> pos(static_cast<std::size_t>(n), 0);
        if (order)
            for (int i = 0; i < n; ++i) pos[static_cast<std::size_t>((*order)[static_cast<std::size_t>(i)])] = i;
        return pos;
    }
};

// ---------------------------------------------------------------------------
// Local search: greedy over one node's decision graph with fixed parents.

struct LocalSearchResult {
    DecisionGraph graph;
    double objective = 0.0;             // node log marginal + its structure-prior share
    std::vector<double> trace;          // objective after the initial state and each applied operator
    int steps = 0;
};

namespace detail {

// Best operator by delta; ties go to the earliest operator in enumeration
// order, which is the documented tie-break order.
inline std::optional<std::pair<Operator, double>> best_operator(NodeEvaluator& eval, const std::vector<int>& parents,
                                                                const OperatorSet& opset) {
    std::vector<Operator> ops = enumerate_operators(parents, eval.graph(), opset, eval.reachable());
    std::optional<std::pair<Operator, double>> best;
    for (const Operator& op : ops) {
        double d = eval.delta(op);
        if (!best || d > best->second) best = {op, d};
    }
    return best;
}

}  // namespace detail

inline LocalSearchResult local_greedy(const Dataset& data, const ScoreConfig& config, int node,
                                      const std::vector<int>& parents, DecisionGraph initial,
                                      const OperatorSet& opset, LogGammaIntTable* table) {
    config.check();
    std::vector<int> sorted_parents = parents;
    std::sort(sorted_parents.begin(), sorted_parents.end());
    NodeEvaluator eval(data, config, node, sorted_parents, std::move(initial), table);
    LocalSearchResult result;
    result.trace.push_back(eval.objective());
    for (;;) {
        auto best = detail::best_operator(eval, sorted_parents, opset);
        if (!best || !(best->second > 0.0)) break;
        eval.apply(best->first);
        result.steps++;
        result.trace.push_back(eval.objective());
    }
    result.graph = eval.graph();
    result.objective = eval.objective();
    return result;
}

inline LocalSearchResult local_greedy(const Dataset& data, const ScoreConfig& config, int node,
                                      const std::vector<int>& parents, DecisionGraph initial,
                                      const OperatorSet& opset) {
    LogGammaIntTable table;
    return local_greedy(data, config, node, parents, std::move(initial), opset, &table);
}

// ---------------------------------------------------------------------------
// Combined global + local search.

struct SearchResult {
    NetworkStructure structure;
    double log_score = 0.0;
    std::vector<double> trace;  // total score after the initial state and each applied operator
    int rounds = 0;
};

// Greedy search that interleaves decision-graph moves with global edge
// growth: every round each node is temporarily offered all eligible
// non-descendants as extra parents, the single best operator across all
// nodes is applied if it improves the score, and a split on an offered
// variable promotes it to a real parent.
inline SearchResult combined_greedy(const Dataset& data, const ScoreConfig& config, const OperatorSet& opset,
                                    const SearchConstraints& constraints,
                                    std::optional<NetworkStructure> initial = std::nullopt) {
    config.check();
    constraints.check(data.domain());
    if (opset.empty()) throw config_error("combined search: empty operator set");

    const Domain& domain = data.domain();
    const int n = domain.size();
    NetworkStructure current = initial ? std::move(*initial) : NetworkStructure(Domain(data.domain()));
    {
        auto violations = validate(current);
        if (!violations.empty())
            throw invariant_error("combined search: initial structure invalid: " + violations.front());
    }

    LogGammaIntTable table;
    std::vector<NodeEvaluator> evals;
    evals.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        evals.emplace_back(data, config, i, current.global.parents(i), current.graphs[static_cast<std::size_t>(i)],
                           &table);

    const std::vector<int> order_pos = constraints.order_positions(n);

    // Parent variables a node may be offered this round: current parents plus
    // eligible non-descendants, capped by max_parents.
    auto extended_parents = [&](int i) -> std::vector<int> {
        std::vector<int> ext = current.global.parents(i);
        if (constraints.fixed_global) return ext;
        std::vector<char> excluded(static_cast<std::size_t>(n), 0);
        excluded[static_cast<std::size_t>(i)] = 1;
        for (int d : current.global.descendants(i)) excluded[static_cast<std::size_t>(d)] = 1;
        for (int p : ext) excluded[static_cast<std::size_t>(p)] = 1;
        for (int j = 0; j < n; ++j) {
            if (excluded[static_cast<std::size_t>(j)]) continue;
            if (constraints.order && order_pos[static_cast<std::size_t>(j)] >= order_pos[static_cast<std::size_t>(i)])
                continue;
            if (constraints.max_parents && static_cast<int>(ext.size()) >= *constraints.max_parents) break;
            ext.push_back(j);
        }
        std::sort(ext.begin(), ext.end());
        return ext;
    };

    struct NodeBest {
        std::vector<int> extended;
        std::optional<std::pair<Operator, double>> best;
    };
    std::vector<NodeBest> cached(static_cast<std::size_t>(n));
    std::vector<char> stale(static_cast<std::size_t>(n), 1);

    SearchResult result;
    auto total_score = [&]() {
        NeumaierSum sum;
        for (auto& e : evals) sum.add(e.objective());
        return sum.value();
    };
    result.trace.push_back(total_score());

    for (;;) {
        result.rounds++;
        // Refresh candidates where the offered parent set changed.
        for (int i = 0; i < n; ++i) {
            std::vector<int> ext = extended_parents(i);
            if (!stale[static_cast<std::size_t>(i)] && ext == cached[static_cast<std::size_t>(i)].extended) continue;
            evals[static_cast<std::size_t>(i)].set_parents(ext);
            cached[static_cast<std::size_t>(i)].best =
                detail::best_operator(evals[static_cast<std::size_t>(i)], ext, opset);
            cached[static_cast<std::size_t>(i)].extended = std::move(ext);
            stale[static_cast<std::size_t>(i)] = 0;
        }

        int best_node = -1;
        double best_delta = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto& b = cached[static_cast<std::size_t>(i)].best;
            if (b && (best_node < 0 || b->second > best_delta)) {
                best_node = i;
                best_delta = b->second;
            }
        }
        if (best_node < 0 || !(best_delta > 0.0)) break;

        const Operator op = cached[static_cast<std::size_t>(best_node)].best->first;
        NodeEvaluator& eval = evals[static_cast<std::size_t>(best_node)];
        eval.set_parents(cached[static_cast<std::size_t>(best_node)].extended);
        eval.apply(op);
        if (op.kind != Operator::Kind::merge && !current.global.has_edge(op.var, best_node))
            current.global.add_edge(op.var, best_node);
        eval.set_parents(current.global.parents(best_node));
        stale[static_cast<std::size_t>(best_node)] = 1;
        result.trace.push_back(total_score());
    }

    for (int i = 0; i < n; ++i) current.graphs[static_cast<std::size_t>(i)] = evals[static_cast<std::size_t>(i)].graph();
    result.structure = std::move(current);
    result.log_score = log_score(result.structure, data, config);
    return result;
}

// ---------------------------------------------------------------------------
// Complete-table global search (the classical baseline).

// Greedy hill climbing over global structures scored with complete tables.
// Operators are single-edge additions, deletions and reversals that keep the
// graph acyclic (and honor the ordering constraint when given).
inline GlobalStructure table_greedy(const Dataset& data, const ScoreConfig& config, GlobalStructure initial,
                                    const SearchConstraints& constraints = {}, std::vector<double>* trace_out = nullptr) {
    config.check();
    constraints.check(data.domain());
    if (!initial.is_acyclic()) throw invariant_error("table search: initial structure is cyclic");

    const Domain& domain = data.domain();
    const int n = domain.size();
    const std::vector<int> order_pos = constraints.order_positions(n);

    // Family-score memo: the marginal term of (node, parent set) never
    // changes, and candidate families repeat heavily across rounds.
    std::map<std::pair<int, std::vector<int>>, double> family_memo;
    auto family_score = [&](int node, const std::vector<int>& parents) {
        auto key = std::make_pair(node, parents);
        auto it = family_memo.find(key);
        if (it != family_memo.end()) return it->second;
        double v = table_node_log_marginal(data, parents, node, config);
        if (config.structure_prior == StructurePrior::kappa) {
            double q = 1.0;
            for (int p : parents) q *= static_cast<double>(domain.cardinality(p));
            v += q * static_cast<double>(domain.cardinality(node) - 1) * std::log(config.kappa);
        }
        family_memo.emplace(std::move(key), v);
        return v;
    };

    auto with_parent = [](std::vector<int> ps, int add) {
        ps.insert(std::lower_bound(ps.begin(), ps.end(), add), add);
        return ps;
    };
    auto without_parent = [](std::vector<int> ps, int del) {
        ps.erase(std::find(ps.begin(), ps.end(), del));
        return ps;
    };
    auto order_ok = [&](int from, int to) {
        return !constraints.order || order_pos[static_cast<std::size_t>(from)] < order_pos[static_cast<std::size_t>(to)];
    };
    auto under_cap = [&](const std::vector<int>& ps) {
        return !constraints.max_parents || static_cast<int>(ps.size()) < *constraints.max_parents;
    };

    std::vector<double> node_scores(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) node_scores[static_cast<std::size_t>(i)] = family_score(i, initial.parents(i));
    if (trace_out) {
        NeumaierSum s;
        for (double v : node_scores) s.add(v);
        trace_out->push_back(s.value());
    }

    for (;;) {
        // kind 0 = add, 1 = delete, 2 = reverse; scanned in that order with
        // ascending (from, to), first strict maximum wins.
        int best_kind = -1, best_from = -1, best_to = -1;
        double best_delta = 0.0;
        auto consider = [&](int kind, int from, int to, double delta) {
            if (best_kind < 0 || delta > best_delta) {
                best_kind = kind;
                best_from = from;
                best_to = to;
                best_delta = delta;
            }
        };

        for (int from = 0; from < n; ++from)
            for (int to = 0; to < n; ++to) {
                if (from == to || initial.has_edge(from, to)) continue;
                if (!order_ok(from, to) || !under_cap(initial.parents(to))) continue;
                // Adding from->to closes a cycle iff `to` already reaches `from`.
                auto desc = initial.descendants(to);
                if (std::binary_search(desc.begin(), desc.end(), from)) continue;
                double delta = family_score(to, with_parent(initial.parents(to), from)) -
                               node_scores[static_cast<std::size_t>(to)];
                consider(0, from, to, delta);
            }
        for (int to = 0; to < n; ++to)
            for (int from : initial.parents(to)) {
                double delta = family_score(to, without_parent(initial.parents(to), from)) -
                               node_scores[static_cast<std::size_t>(to)];
                consider(1, from, to, delta);
            }
        for (int to = 0; to < n; ++to)
            for (int from : initial.parents(to)) {
                if (!order_ok(to, from) || !under_cap(initial.parents(from))) continue;
                GlobalStructure probe = initial;
                probe.remove_edge(from, to);
                auto desc = probe.descendants(from);
                if (std::binary_search(desc.begin(), desc.end(), to)) continue;  // another path from->to exists
                double delta = family_score(to, without_parent(initial.parents(to), from)) +
                               family_score(from, with_parent(initial.parents(from), to)) -
                               node_scores[static_cast<std::size_t>(to)] - node_scores[static_cast<std::size_t>(from)];
                consider(2, from, to, delta);
            }

        if (best_kind < 0 || !(best_delta > 0.0)) break;
        if (best_kind == 0) {
            initial.add_edge(best_from, best_to);
        } else if (best_kind == 1) {
            initial.remove_edge(best_from, best_to);
        } else {
            initial.remove_edge(best_from, best_to);
            initial.add_edge(best_to, best_from);
            node_scores[static_cast<std::size_t>(best_from)] = family_score(best_from, initial.parents(best_from));
        }
        node_scores[static_cast<std::size_t>(best_to)] = family_score(best_to, initial.parents(best_to));
        if (trace_out) {
            NeumaierSum s;
            for (double v : node_scores) s.add(v);
            trace_out->push_back(s.value());
        }
    }
    return initial;
}

// ---------------------------------------------------------------------------
// Post-pass: drop parents whose variable annotates no split node. Purely
// syntactic, so a parent made vacuous by merges but still annotated is kept;
// the leaf partition and the score are unchanged either way.
inline NetworkStructure prune_vacuous_parents(const NetworkStructure& s) {
    NetworkStructure out = s;
    for (int i = 0; i < s.domain().size(); ++i) {
        std::vector<int> annotated = s.graphs[static_cast<std::size_t>(i)].annotated_vars();
        std::vector<int> kept;
        for (int p : s.global.parents(i))
            if (std::binary_search(annotated.begin(), annotated.end(), p)) kept.push_back(p);
        out.global.set_parents(i, std::move(kept));
    }
    return out;
}

}  // namespace dgbn
