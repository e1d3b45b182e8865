#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dgbn/decision_graph.hpp"
#include "dgbn/domain.hpp"
#include "dgbn/errors.hpp"
#include "dgbn/parent_space.hpp"

namespace dgbn {

// Directed global structure: one ordered (ascending-index) parent set per
// variable. Constructible in any state; acyclicity and index sanity are
// checked by validate()/is_acyclic so that broken inputs can be reported
// rather than crashed on.
class GlobalStructure {
public:
    GlobalStructure() = default;

    explicit GlobalStructure(Domain domain)
        : domain_(std::move(domain)), parent_sets_(static_cast<std::size_t>(domain_.size())) {}

    GlobalStructure(Domain domain, std::vector<std::vector<int>> parent_sets)
        : domain_(std::move(domain)), parent_sets_(std::move(parent_sets)) {
        if (static_cast<int>(parent_sets_.size()) != domain_.size())
            throw invariant_error("global structure: parent-set count does not match domain size");
        for (auto& ps : parent_sets_) std::sort(ps.begin(), ps.end());
    }

    const Domain& domain() const { return domain_; }
    int num_vars() const { return domain_.size(); }
    const std::vector<int>& parents(int i) const { return parent_sets_[static_cast<std::size_t>(i)]; }
    const std::vector<std::vector<int>>& parent_sets() const { return parent_sets_; }

    bool has_edge(int from, int to) const {
        const auto& ps = parents(to);
        return std::binary_search(ps.begin(), ps.end(), from);
    }

    void add_edge(int from, int to) {
        auto& ps = parent_sets_[static_cast<std::size_t>(to)];
        auto it = std::lower_bound(ps.begin(), ps.end(), from);
        if (it == ps.end() || *it != from) ps.insert(it, from);
    }

    void remove_edge(int from, int to) {
        auto& ps = parent_sets_[static_cast<std::size_t>(to)];
        auto it = std::lower_bound(ps.begin(), ps.end(), from);
        if (it != ps.end() && *it == from) ps.erase(it);
    }

    void set_parents(int i, std::vector<int> parents) {
        std::sort(parents.begin(), parents.end());
        parent_sets_[static_cast<std::size_t>(i)] = std::move(parents);
    }

    std::size_t num_edges() const {
        std::size_t n = 0;
        for (const auto& ps : parent_sets_) n += ps.size();
        return n;
    }

    ParentSpace parent_space(int i) const { return ParentSpace(domain_, parents(i)); }

    bool is_acyclic() const { return topological_order().has_value(); }

    // Kahn's algorithm with smallest-index tie-breaking; nullopt on cycles.
    std::optional<std::vector<int>> topological_order() const {
        const int n = num_vars();
        std::vector<int> indegree(static_cast<std::size_t>(n), 0);
        std::vector<std::vector<int>> children(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            for (int p : parents(i)) {
                if (p < 0 || p >= n || p == i) return std::nullopt;
                indegree[static_cast<std::size_t>(i)]++;
                children[static_cast<std::size_t>(p)].push_back(i);
            }
        std::vector<int> order;
        order.reserve(static_cast<std::size_t>(n));
        std::vector<char> emitted(static_cast<std::size_t>(n), 0);
        while (static_cast<int>(order.size()) < n) {
            int pick = -1;
            for (int i = 0; i < n; ++i)
                if (!emitted[static_cast<std::size_t>(i)] && indegree[static_cast<std::size_t>(i)] == 0) {
                    pick = i;
                    break;
                }
            if (pick < 0) return std::nullopt;
            emitted[static_cast<std::size_t>(pick)] = 1;
            order.push_back(pick);
            for (int c : children[static_cast<std::size_t>(pick)]) indegree[static_cast<std::size_t>(c)]--;
        }
        return order;
    }

    // Nodes reachable from `i` through directed edges, excluding i itself.
    std::vector<int> descendants(int i) const {
        const int n = num_vars();
        std::vector<std::vector<int>> children(static_cast<std::size_t>(n));
        for (int v = 0; v < n; ++v)
            for (int p : parents(v))
                if (p >= 0 && p < n) children[static_cast<std::size_t>(p)].push_back(v);
        std::vector<char> mark(static_cast<std::size_t>(n), 0);
        std::vector<int> stack{i};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int c : children[static_cast<std::size_t>(v)])
                if (!mark[static_cast<std::size_t>(c)]) {
                    mark[static_cast<std::size_t>(c)] = 1;
                    stack.push_back(c);
                }
        }
        std::vector<int> out;
        for (int v = 0; v < n; ++v)
            if (mark[static_cast<std::size_t>(v)] && v != i) out.push_back(v);
        return out;
    }

    friend bool operator==(const GlobalStructure& a, const GlobalStructure& b) {
        return a.domain_ == b.domain_ && a.parent_sets_ == b.parent_sets_;
    }

private:
    Domain domain_;
    std::vector<std::vector<int>> parent_sets_;
};

// Global dag plus one decision graph per variable.
struct NetworkStructure {
    GlobalStructure global;
    std::vector<DecisionGraph> graphs;

    NetworkStructure() = default;

    // Edgeless structure with single-leaf graphs everywhere.
    explicit NetworkStructure(Domain domain) : global(std::move(domain)) {
        graphs.reserve(static_cast<std::size_t>(global.num_vars()));
        for (int i = 0; i < global.num_vars(); ++i) graphs.emplace_back(i);
    }

    NetworkStructure(GlobalStructure g, std::vector<DecisionGraph> d) : global(std::move(g)), graphs(std::move(d)) {}

    const Domain& domain() const { return global.domain(); }

    friend bool operator==(const NetworkStructure& a, const NetworkStructure& b) {
        return a.global == b.global && a.graphs == b.graphs;
    }
};

// ---------------------------------------------------------------------------
// Validation: returns every violation found, not just the first.

inline void validate_graph(const Domain& domain, const std::vector<int>& parents, int owner,
                           const DecisionGraph& graph, std::vector<std::string>& out) {
    const std::string where = "graph for '" + domain.name(owner) + "': ";
    if (graph.owner() != owner) out.push_back(where + "owner index mismatch");

    // Split variables must be parents, never the owner; edge labels in range.
    for (int id : graph.live_ids()) {
        const GraphNode& n = graph.node(id);
        if (n.kind != GraphNode::Kind::split) continue;
        if (n.split_var == owner) out.push_back(where + "node " + std::to_string(id) + " splits on the owner variable");
        else if (!std::binary_search(parents.begin(), parents.end(), n.split_var))
            out.push_back(where + "node " + std::to_string(id) + " splits on non-parent variable " +
                          std::to_string(n.split_var));
        if (n.split_var < 0 || n.split_var >= domain.size()) {
            out.push_back(where + "node " + std::to_string(id) + " splits on out-of-range variable");
            continue;
        }
        if (n.edges.empty()) out.push_back(where + "split node " + std::to_string(id) + " has no edges");
        for (const auto& e : n.edges) {
            if (!graph.is_live(e.child))
                out.push_back(where + "node " + std::to_string(id) + " has an edge to dead node " +
                              std::to_string(e.child));
            if (e.values.empty()) out.push_back(where + "node " + std::to_string(id) + " has an empty edge label");
            for (int v : e.values)
                if (v < 0 || v >= domain.cardinality(n.split_var))
                    out.push_back(where + "node " + std::to_string(id) + " edge label contains out-of-range state " +
                                  std::to_string(v));
        }
    }

    // Acyclicity over live nodes (DFS with colors).
    {
        std::vector<int> color(static_cast<std::size_t>(graph.num_ids()), 0);
        bool cyclic = false;
        std::vector<std::pair<int, std::size_t>> stack;
        stack.emplace_back(graph.root(), 0);
        color[static_cast<std::size_t>(graph.root())] = 1;
        while (!stack.empty() && !cyclic) {
            auto& [id, next] = stack.back();
            const GraphNode& n = graph.node(id);
            if (n.kind != GraphNode::Kind::split || next >= n.edges.size()) {
                color[static_cast<std::size_t>(id)] = 2;
                stack.pop_back();
                continue;
            }
            int child = n.edges[next++].child;
            if (!graph.is_live(child)) continue;
            if (color[static_cast<std::size_t>(child)] == 1) {
                cyclic = true;
            } else if (color[static_cast<std::size_t>(child)] == 0) {
                color[static_cast<std::size_t>(child)] = 1;
                stack.emplace_back(child, 0);
            }
        }
        if (cyclic) {
            out.push_back(where + "graph contains a cycle");
            return;  // reachability analysis below assumes a dag
        }
        // Reachability from the root, and no edge may re-enter the root.
        for (int id : graph.live_ids())
            if (color[static_cast<std::size_t>(id)] == 0)
                out.push_back(where + "node " + std::to_string(id) + " is not reachable from the root");
        for (int id : graph.live_ids())
            for (const auto& e : graph.node(id).edges)
                if (e.child == graph.root()) out.push_back(where + "an edge points back at the root");
    }

    // Out-edges of each split node must partition the states reachable there.
    ReachableSets reach(domain, graph);
    for (int id : graph.live_ids()) {
        const GraphNode& n = graph.node(id);
        if (n.kind != GraphNode::Kind::split || !reach.visited(id)) continue;
        if (n.split_var < 0 || n.split_var >= domain.size()) continue;
        ValueSet reachable = reach.at(id, n.split_var);
        ValueSet seen;
        bool overlap = false;
        for (const auto& e : n.edges) {
            if (!set_intersect(seen, e.values).empty()) overlap = true;
            seen = set_union(seen, e.values);
        }
        if (overlap) out.push_back(where + "node " + std::to_string(id) + " has overlapping edge labels");
        if (seen != reachable)
            out.push_back(where + "node " + std::to_string(id) +
                          " edge labels do not partition the reachable states of variable " +
                          std::to_string(n.split_var));
    }
}

inline std::vector<std::string> validate(const NetworkStructure& s) {
    std::vector<std::string> out;
    const Domain& domain = s.global.domain();
    const int n = domain.size();

    if (static_cast<int>(s.graphs.size()) != n) {
        out.push_back("structure: graph count does not match domain size");
        return out;
    }
    for (int i = 0; i < n; ++i)
        for (int p : s.global.parents(i)) {
            if (p < 0 || p >= n)
                out.push_back("structure: parent index " + std::to_string(p) + " of '" + domain.name(i) +
                              "' out of range");
            if (p == i) out.push_back("structure: '" + domain.name(i) + "' lists itself as a parent");
        }
    if (!s.global.is_acyclic()) out.push_back("structure: global graph contains a directed cycle");

    for (int i = 0; i < n; ++i) validate_graph(domain, s.global.parents(i), i, s.graphs[static_cast<std::size_t>(i)], out);
    return out;
}

// ---------------------------------------------------------------------------
// Parameterized network: a structure plus one probability vector per leaf.

struct ParameterizedNetwork {
    NetworkStructure structure;
    // per variable: leaf id -> distribution over the variable's states
    std::vector<std::map<int, std::vector<double>>> leaf_distributions;

    const Domain& domain() const { return structure.domain(); }
};

inline std::vector<std::string> validate(const ParameterizedNetwork& net) {
    std::vector<std::string> out = validate(net.structure);
    const Domain& domain = net.domain();
    if (net.leaf_distributions.size() != static_cast<std::size_t>(domain.size())) {
        out.push_back("network: distribution table count does not match domain size");
        return out;
    }
    for (int i = 0; i < domain.size(); ++i) {
        const auto& graph = net.structure.graphs[static_cast<std::size_t>(i)];
        const auto& dists = net.leaf_distributions[static_cast<std::size_t>(i)];
        for (int leaf : graph.leaf_ids()) {
            auto it = dists.find(leaf);
            if (it == dists.end()) {
                out.push_back("network: '" + domain.name(i) + "' leaf " + std::to_string(leaf) +
                              " has no distribution");
                continue;
            }
            if (static_cast<int>(it->second.size()) != domain.cardinality(i)) {
                out.push_back("network: '" + domain.name(i) + "' leaf " + std::to_string(leaf) +
                              " distribution length mismatch");
                continue;
            }
            double sum = 0.0;
            bool neg = false;
            for (double p : it->second) {
                if (p < 0.0) neg = true;
                sum += p;
            }
            if (neg)
                out.push_back("network: '" + domain.name(i) + "' leaf " + std::to_string(leaf) +
                              " has a negative probability");
            if (std::abs(sum - 1.0) > 1e-12)
                out.push_back("network: '" + domain.name(i) + "' leaf " + std::to_string(leaf) +
                              " distribution sums to " + std::to_string(sum));
        }
    }
    return out;
}

// p(x_i = state | full assignment of the parents), by graph traversal.
inline double conditional_probability(const ParameterizedNetwork& net, int var, int state,
                                      const std::vector<int>& assignment) {
    const auto& graph = net.structure.graphs[static_cast<std::size_t>(var)];
    int leaf = leaf_lookup(graph, [&](int v) { return assignment[static_cast<std::size_t>(v)]; });
    const auto& dists = net.leaf_distributions[static_cast<std::size_t>(var)];
    auto it = dists.find(leaf);
    if (it == dists.end()) throw invariant_error("network: missing distribution for leaf " + std::to_string(leaf));
    return it->second[static_cast<std::size_t>(state)];
}

// Exact marginal p(targets = each joint state) by enumerating the ancestral
// closure of `targets`, multiplying CPDs in topological order. The work grows
// with the joint state count of the closure, so callers must bound it.
inline std::vector<double> joint_marginal(const ParameterizedNetwork& net, const std::vector<int>& targets,
                                          std::uint64_t enumeration_limit) {
    const Domain& domain = net.domain();
    auto order = net.structure.global.topological_order();
    if (!order) throw invariant_error("joint_marginal: network structure is cyclic");

    // Ancestral closure of the target set.
    std::vector<char> needed(static_cast<std::size_t>(domain.size()), 0);
    std::vector<int> stack(targets.begin(), targets.end());
    for (int t : stack) needed[static_cast<std::size_t>(t)] = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int p : net.structure.global.parents(v))
            if (!needed[static_cast<std::size_t>(p)]) {
                needed[static_cast<std::size_t>(p)] = 1;
                stack.push_back(p);
            }
    }
    std::vector<int> closure;  // topological order restricted to the closure
    for (int v : *order)
        if (needed[static_cast<std::size_t>(v)]) closure.push_back(v);

    std::uint64_t states = 1;
    for (int v : closure) {
        std::uint64_t r = static_cast<std::uint64_t>(domain.cardinality(v));
        if (states > enumeration_limit / r)
            throw invariant_error("joint_marginal: ancestral closure too large to enumerate exactly");
        states *= r;
    }
    if (states > enumeration_limit)
        throw invariant_error("joint_marginal: ancestral closure too large to enumerate exactly");

    ParentSpace target_space(domain, targets);
    if (target_space.overflow() || target_space.size() > enumeration_limit)
        throw invariant_error("joint_marginal: target space too large");
    std::vector<double> result(target_space.size(), 0.0);
    std::vector<int> assignment(static_cast<std::size_t>(domain.size()), 0);

    // Depth-first over closure variables; prune zero-probability branches.
    auto recurse = [&](auto&& self, std::size_t depth, double prob) -> void {
        if (prob == 0.0) return;
        if (depth == closure.size()) {
            std::vector<int> values(targets.size());
            for (std::size_t t = 0; t < targets.size(); ++t)
                values[t] = assignment[static_cast<std::size_t>(targets[t])];
            result[target_space.encode(values)] += prob;
            return;
        }
        int v = closure[depth];
        for (int k = 0; k < domain.cardinality(v); ++k) {
            assignment[static_cast<std::size_t>(v)] = k;
            self(self, depth + 1, prob * conditional_probability(net, v, k, assignment));
        }
        assignment[static_cast<std::size_t>(v)] = 0;
    };
    recurse(recurse, 0, 1.0);
    return result;
}

}  // namespace dgbn
