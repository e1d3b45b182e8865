#pragma once

// Shared fixtures and test-side oracles. The oracles recompute quantities by
// routes independent of the code they check: the sequential-predictive
// product for the closed-form score, and state enumeration for traversal.

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "dgbn/dgbn.hpp"

namespace testutil {

using namespace dgbn;

// ---------------------------------------------------------------------------
// Three-variable example domain: x, y, z all binary; z depends on x and y.

inline Domain xyz_domain() {
    return Domain({Variable{"x", 2, {}}, Variable{"y", 2, {}}, Variable{"z", 2, {}}});
}

// Tree for z: split on x; the x=0 branch splits on y, the x=1 branch is a
// single shared leaf. Leaves: 3 = (x0,y0), 4 = (x0,y1), 2 = (x1,*).
inline DecisionGraph example_tree_z() {
    DecisionGraph g(2);
    auto c = g.split_leaf(g.root(), 0, {{0}, {1}});  // 1 = x0 subtree, 2 = x1 leaf
    g.split_leaf(c[0], 1, {{0}, {1}});               // 3 = (x0,y0), 4 = (x0,y1)
    return g;
}

// Graph for z encoding p(z|x=0,y=1) = p(z|x=1,y=0): both mid states share a
// merged leaf. Leaves: 3 = (x0,y0), 4 = merged {(x0,y1),(x1,y0)}, 6 = (x1,y1).
inline DecisionGraph example_graph_z() {
    DecisionGraph g(2);
    auto c = g.split_leaf(g.root(), 0, {{0}, {1}});
    auto l = g.split_leaf(c[0], 1, {{0}, {1}});  // 3, 4
    auto r = g.split_leaf(c[1], 1, {{0}, {1}});  // 5, 6
    g.merge_leaves(l[1], r[0]);                  // keeps 4
    return g;
}

// Structure over {x, y, z} with Par(z) = {x, y} and the given z-graph.
inline NetworkStructure xyz_structure(DecisionGraph z_graph) {
    GlobalStructure global(xyz_domain());
    global.set_parents(2, {0, 1});
    std::vector<DecisionGraph> graphs;
    graphs.emplace_back(0);
    graphs.emplace_back(1);
    graphs.push_back(std::move(z_graph));
    return NetworkStructure(std::move(global), std::move(graphs));
}

// Generative network: x, y fair coins; z from the example tree, context
// independent of y when x = 1. The leaf values keep z strongly dependent on
// x marginally (so the search orients the collider at z) and on y within
// x = 0 (so the second split is found too).
inline ParameterizedNetwork xyz_network() {
    ParameterizedNetwork net;
    net.structure = xyz_structure(example_tree_z());
    net.leaf_distributions.resize(3);
    net.leaf_distributions[0][0] = {0.7, 0.3};
    net.leaf_distributions[1][0] = {0.5, 0.5};
    net.leaf_distributions[2][3] = {0.10, 0.90};  // (x0,y0)
    net.leaf_distributions[2][4] = {0.40, 0.60};  // (x0,y1)
    net.leaf_distributions[2][2] = {0.85, 0.15};  // (x1,*)
    return net;
}

// Operator-example graph: owner z with ternary parents x (var 0) and y
// (var 1); the root splits on y into leaves v1 = 1, v2 = 2, v3 = 3.
inline Domain ternary_domain() {
    return Domain({Variable{"x", 3, {}}, Variable{"y", 3, {}}, Variable{"z", 2, {}}});
}

inline DecisionGraph ternary_root_split_y() {
    DecisionGraph g(2);
    g.split_leaf(g.root(), 1, {{0}, {1}, {2}});
    return g;
}

// ---------------------------------------------------------------------------
// Oracles

// Sequential-predictive log marginal: the chain-rule product of one-case-
// ahead predictive probabilities (N + alpha) / (N_sum + alpha_sum) with
// counts from earlier cases only. Cases are routed to leaves by state
// enumeration, not graph traversal.
inline double prequential_node_log_marginal(const Dataset& data, int node, const std::vector<int>& parents,
                                            const DecisionGraph& graph,
                                            const std::vector<std::vector<double>>& alpha_by_leaf) {
    ParentSpace space(data.domain(), parents);
    std::vector<int> j_to_leaf = leaf_index_of_state(graph, space);
    std::vector<int> leaves = graph.leaf_ids();
    std::map<int, std::size_t> leaf_pos;
    for (std::size_t b = 0; b < leaves.size(); ++b) leaf_pos[leaves[b]] = b;

    std::vector<std::vector<std::int64_t>> counts(leaves.size());
    std::vector<double> alpha_sums(leaves.size(), 0.0);
    for (std::size_t b = 0; b < leaves.size(); ++b) {
        counts[b].assign(alpha_by_leaf[b].size(), 0);
        for (double a : alpha_by_leaf[b]) alpha_sums[b] += a;
    }

    double lp = 0.0;
    for (std::size_t c = 0; c < data.num_cases(); ++c) {
        std::uint64_t j = space.encode_case(data, c);
        std::size_t b = leaf_pos.at(j_to_leaf[j]);
        int k = data.value(c, node);
        std::int64_t n_sum = 0;
        for (std::int64_t v : counts[b]) n_sum += v;
        lp += std::log((static_cast<double>(counts[b][static_cast<std::size_t>(k)]) +
                        alpha_by_leaf[b][static_cast<std::size_t>(k)]) /
                       (static_cast<double>(n_sum) + alpha_sums[b]));
        counts[b][static_cast<std::size_t>(k)]++;
    }
    return lp;
}

// Full-structure sequential-predictive log score (marginal part only).
inline double prequential_log_marginal(const Dataset& data, const NetworkStructure& s, const ScoreConfig& config) {
    double lp = 0.0;
    for (int a = 0; a < s.domain().size(); ++a)
        lp += prequential_node_log_marginal(data, a, s.global.parents(a), s.graphs[static_cast<std::size_t>(a)],
                                            assign_alphas(config, s, a));
    return lp;
}

// ---------------------------------------------------------------------------
// Random instances

inline Domain random_domain(Rng& rng, int min_vars, int max_vars, int max_card) {
    int n = min_vars + rng.below_int(max_vars - min_vars + 1);
    std::vector<Variable> vars;
    for (int i = 0; i < n; ++i) vars.push_back(Variable{"v" + std::to_string(i), 2 + rng.below_int(max_card - 1), {}});
    return Domain(std::move(vars));
}

inline GlobalStructure random_dag(Rng& rng, const Domain& domain, int max_parents) {
    const int n = domain.size();
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    rng.shuffle(perm);
    GlobalStructure g((Domain(domain)));
    for (int t = 0; t < n; ++t) {
        int cap = t < max_parents ? t : max_parents;
        int k = rng.below_int(cap + 1);
        std::vector<int> pool(perm.begin(), perm.begin() + t);
        rng.shuffle(pool);
        g.set_parents(perm[static_cast<std::size_t>(t)], std::vector<int>(pool.begin(), pool.begin() + k));
    }
    return g;
}

inline std::vector<std::vector<std::uint64_t>> random_partition(Rng& rng, std::uint64_t q) {
    std::uint64_t classes = 1 + rng.below(q);
    std::vector<std::uint64_t> states(q);
    for (std::uint64_t j = 0; j < q; ++j) states[j] = j;
    rng.shuffle(states);
    std::vector<std::vector<std::uint64_t>> parts(classes);
    for (std::uint64_t j = 0; j < q; ++j) parts[j < classes ? j : rng.below(classes)].push_back(states[j]);
    return parts;
}

// Random structure whose graphs are merged complete trees over random
// partitions of each node's parent states.
inline NetworkStructure random_structure(Rng& rng, const Domain& domain, int max_parents) {
    GlobalStructure g = random_dag(rng, domain, max_parents);
    std::vector<DecisionGraph> graphs;
    for (int i = 0; i < domain.size(); ++i) {
        ParentSpace space = g.parent_space(i);
        graphs.push_back(merge_complete_tree(i, domain, g.parents(i), random_partition(rng, space.size())));
    }
    return NetworkStructure(std::move(g), std::move(graphs));
}

inline Dataset random_dataset(Rng& rng, const Domain& domain, std::size_t cases) {
    std::vector<std::int32_t> flat;
    flat.reserve(cases * static_cast<std::size_t>(domain.size()));
    for (std::size_t c = 0; c < cases; ++c)
        for (int i = 0; i < domain.size(); ++i)
            flat.push_back(static_cast<std::int32_t>(rng.below_int(domain.cardinality(i))));
    return Dataset(Domain(domain), std::move(flat));
}

// Random graph grown by a random sequence of applicable operators.
inline DecisionGraph random_operator_graph(Rng& rng, const Domain& domain, int owner,
                                           const std::vector<int>& parents, int steps) {
    DecisionGraph g(owner);
    OperatorSet all = OperatorSet::parse("CBM");
    for (int s = 0; s < steps; ++s) {
        std::vector<Operator> ops = enumerate_operators(domain, parents, g, all);
        if (ops.empty()) break;
        ReachableSets reach(domain, g);
        apply_operator_unchecked(g, reach, ops[static_cast<std::size_t>(rng.below(ops.size()))]);
    }
    return g;
}

// Canonical leaf partition over the full parent space.
inline std::vector<std::uint64_t> partition_of(const Domain& domain, const std::vector<int>& parents,
                                               const DecisionGraph& graph) {
    ParentSpace space(domain, parents);
    return canonical_partition(leaf_index_of_state(graph, space));
}

// Graph-level validation result as a bool, for property checks.
inline bool validate_ok(const Domain& domain, const std::vector<int>& parents, const DecisionGraph& graph) {
    std::vector<int> sorted = parents;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::string> out;
    validate_graph(domain, sorted, graph.owner(), graph, out);
    return out.empty();
}

}  // namespace testutil
