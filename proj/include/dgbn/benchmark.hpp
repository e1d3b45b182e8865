#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dgbn/decision_graph.hpp"
#include "dgbn/domain.hpp"
#include "dgbn/errors.hpp"
#include "dgbn/rng.hpp"
#include "dgbn/structure.hpp"

namespace dgbn {

// A seedable generative model: the network that produced (or will produce)
// a synthetic dataset, plus the seed it was built from.
struct GenerativeSpec {
    ParameterizedNetwork network;
    std::uint64_t seed = 0;
};

// Dirichlet(1) draw via normalized exponentials.
inline std::vector<double> random_distribution(Rng& rng, int cardinality) {
    std::vector<double> w(static_cast<std::size_t>(cardinality));
    double total = 0.0;
    for (auto& x : w) {
        x = -std::log(1.0 - rng.uniform01());
        total += x;
    }
    if (total <= 0.0) return std::vector<double>(static_cast<std::size_t>(cardinality), 1.0 / cardinality);
    for (auto& x : w) x /= total;
    return w;
}

// Random generative network whose conditional distributions carry
// parameter-set equalities, as a stand-in for hand-built diagnostic networks
// whose tables are mostly shared rows. Structure: a random dag with at most
// four parents per node and cardinalities in {2,3,4}. Each node's decision
// graph is a complete tree merged over a random partition of the parent
// states; `equality_density` = 0 keeps every state separate (complete trees)
// and 1 collapses each node to a single shared distribution.
inline GenerativeSpec make_local_structure_benchmark(int n_vars, std::uint64_t seed, double equality_density) {
    if (n_vars < 3) throw config_error("benchmark: need at least 3 variables");
    if (!(equality_density >= 0.0 && equality_density <= 1.0))
        throw config_error("benchmark: equality density must lie in [0, 1]");

    Rng rng(seed);

    std::vector<Variable> vars;
    vars.reserve(static_cast<std::size_t>(n_vars));
    for (int i = 0; i < n_vars; ++i)
        vars.push_back(Variable{"v" + std::to_string(i), 2 + rng.below_int(3), {}});
    Domain domain(std::move(vars));

    // Random dag: a random variable order, then up to four parents per node
    // drawn from its predecessors.
    std::vector<int> perm(static_cast<std::size_t>(n_vars));
    for (int i = 0; i < n_vars; ++i) perm[static_cast<std::size_t>(i)] = i;
    rng.shuffle(perm);
    GlobalStructure global((Domain(domain)));
    for (int t = 0; t < n_vars; ++t) {
        int node = perm[static_cast<std::size_t>(t)];
        int cap = t < 4 ? t : 4;
        int k = rng.below_int(cap + 1);
        std::vector<int> pool(perm.begin(), perm.begin() + t);
        rng.shuffle(pool);
        std::vector<int> parents(pool.begin(), pool.begin() + k);
        global.set_parents(node, std::move(parents));
    }

    // Per node: partition the parent states and give each class a fresh
    // distribution.
    NetworkStructure structure(std::move(global), {});
    structure.graphs.reserve(static_cast<std::size_t>(n_vars));
    ParameterizedNetwork net;
    net.leaf_distributions.resize(static_cast<std::size_t>(n_vars));
    for (int i = 0; i < n_vars; ++i) {
        ParentSpace space(domain, structure.global.parents(i));
        const std::uint64_t q = space.size();
        std::uint64_t classes =
            static_cast<std::uint64_t>(std::llround(static_cast<double>(q) * (1.0 - equality_density)));
        if (classes < 1) classes = 1;
        if (classes > q) classes = q;

        std::vector<std::uint64_t> states(q);
        for (std::uint64_t j = 0; j < q; ++j) states[j] = j;
        rng.shuffle(states);
        std::vector<std::vector<std::uint64_t>> partition(classes);
        for (std::uint64_t j = 0; j < q; ++j) {
            std::uint64_t cls = j < classes ? j : rng.below(classes);
            partition[cls].push_back(states[j]);
        }

        DecisionGraph graph = merge_complete_tree(i, domain, structure.global.parents(i), partition);
        structure.graphs.push_back(graph);
        for (int leaf : graph.leaf_ids())
            net.leaf_distributions[static_cast<std::size_t>(i)].emplace(leaf, random_distribution(rng, domain.cardinality(i)));
    }
    net.structure = std::move(structure);
    return GenerativeSpec{std::move(net), seed};
}

}  // namespace dgbn
