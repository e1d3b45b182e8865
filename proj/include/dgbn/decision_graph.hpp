#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dgbn/domain.hpp"
#include "dgbn/errors.hpp"
#include "dgbn/parent_space.hpp"
#include "dgbn/value_set.hpp"

namespace dgbn {

struct GraphEdge {
    ValueSet values;
    int child = -1;
};

inline bool operator==(const GraphEdge& a, const GraphEdge& b) {
    return a.values == b.values && a.child == b.child;
}

struct GraphNode {
    enum class Kind { leaf, split, dead };
    Kind kind = Kind::leaf;
    int split_var = -1;           // set for split nodes
    std::vector<GraphEdge> edges; // empty unless split
};

inline bool operator==(const GraphNode& a, const GraphNode& b) {
    return a.kind == b.kind && a.split_var == b.split_var && a.edges == b.edges;
}

// Rooted dag that maps each joint parent state of one variable to a leaf.
// Interior nodes split on a parent variable, with out-edges labelled by
// mutually exclusive value sets that together cover the states reachable at
// that node. Leaves may have several incoming edges (merged leaves), which is
// how the graph expresses equality between conditional distributions.
//
// Node ids are positions in the node vector and are never reused: merging
// tombstones the losing node instead of erasing it, so ids stay stable for
// the lifetime of the graph and leaf enumeration (ascending id) is
// deterministic.
class DecisionGraph {
public:
    DecisionGraph() : DecisionGraph(0) {}

    // A fresh graph is a single node that is both root and leaf.
    explicit DecisionGraph(int owner) : owner_(owner), root_(0) { nodes_.emplace_back(); }

    // Raw constructor for deserialization and fixtures. Only basic shape is
    // checked here; semantic validation lives in validate().
    DecisionGraph(int owner, int root, std::vector<GraphNode> nodes)
        : owner_(owner), root_(root), nodes_(std::move(nodes)) {
        if (root_ < 0 || root_ >= static_cast<int>(nodes_.size()) || !is_live(root_))
            throw invariant_error("decision graph: root id out of range or dead");
    }

    int owner() const { return owner_; }
    int root() const { return root_; }
    int num_ids() const { return static_cast<int>(nodes_.size()); }

    const GraphNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }

    bool is_live(int id) const {
        return id >= 0 && id < num_ids() && nodes_[static_cast<std::size_t>(id)].kind != GraphNode::Kind::dead;
    }
    bool is_leaf(int id) const {
        return id >= 0 && id < num_ids() && nodes_[static_cast<std::size_t>(id)].kind == GraphNode::Kind::leaf;
    }
    bool is_split(int id) const {
        return id >= 0 && id < num_ids() && nodes_[static_cast<std::size_t>(id)].kind == GraphNode::Kind::split;
    }

    std::vector<int> leaf_ids() const {
        std::vector<int> out;
        for (int id = 0; id < num_ids(); ++id)
            if (is_leaf(id)) out.push_back(id);
        return out;
    }

    std::vector<int> live_ids() const {
        std::vector<int> out;
        for (int id = 0; id < num_ids(); ++id)
            if (is_live(id)) out.push_back(id);
        return out;
    }

    int num_leaves() const {
        int n = 0;
        for (int id = 0; id < num_ids(); ++id)
            if (is_leaf(id)) ++n;
        return n;
    }

    // Variables annotating at least one live split node.
    std::vector<int> annotated_vars() const {
        std::vector<int> vars;
        for (int id = 0; id < num_ids(); ++id)
            if (is_split(id)) vars.push_back(nodes_[static_cast<std::size_t>(id)].split_var);
        return make_value_set(std::move(vars));
    }

    // Turn a leaf into a split node on `var` with one fresh leaf child per
    // edge set. Returns the new leaf ids in edge order. The edge sets must be
    // nonempty and pairwise disjoint; whether they cover the reachable states
    // is the caller's contract.
    std::vector<int> split_leaf(int leaf, int var, const std::vector<ValueSet>& edge_sets) {
        if (!is_leaf(leaf)) throw invariant_error("split_leaf: node is not a live leaf");
        if (edge_sets.size() < 2) throw invariant_error("split_leaf: need at least two edge sets");
        for (std::size_t a = 0; a < edge_sets.size(); ++a) {
            if (edge_sets[a].empty()) throw invariant_error("split_leaf: empty edge set");
            for (std::size_t b = a + 1; b < edge_sets.size(); ++b)
                if (!set_intersect(edge_sets[a], edge_sets[b]).empty())
                    throw invariant_error("split_leaf: overlapping edge sets");
        }
        std::vector<int> children;
        children.reserve(edge_sets.size());
        GraphNode& v = nodes_[static_cast<std::size_t>(leaf)];
        v.kind = GraphNode::Kind::split;
        v.split_var = var;
        for (const auto& s : edge_sets) {
            int id = num_ids();
            nodes_.emplace_back();
            nodes_[static_cast<std::size_t>(leaf)].edges.push_back(GraphEdge{s, id});
            children.push_back(id);
        }
        return children;
    }

    // Merge two live leaves; the smaller id survives and inherits every edge
    // that pointed at the other. Returns the surviving id.
    int merge_leaves(int a, int b) {
        if (a == b) throw invariant_error("merge_leaves: a leaf cannot be merged with itself");
        if (!is_leaf(a) || !is_leaf(b)) throw invariant_error("merge_leaves: both nodes must be live leaves");
        int keep = a < b ? a : b;
        int drop = a < b ? b : a;
        for (auto& n : nodes_)
            if (n.kind == GraphNode::Kind::split)
                for (auto& e : n.edges)
                    if (e.child == drop) e.child = keep;
        nodes_[static_cast<std::size_t>(drop)] = GraphNode{GraphNode::Kind::dead, -1, {}};
        return keep;
    }

    // Equality over live content: dead slots carry no meaning, so a graph
    // whose trailing ids are tombstones equals its reserialized form.
    friend bool operator==(const DecisionGraph& x, const DecisionGraph& y) {
        if (x.owner_ != y.owner_ || x.root_ != y.root_) return false;
        int top = x.num_ids() > y.num_ids() ? x.num_ids() : y.num_ids();
        for (int id = 0; id < top; ++id) {
            bool lx = x.is_live(id), ly = y.is_live(id);
            if (lx != ly) return false;
            if (lx && !(x.node(id) == y.node(id))) return false;
        }
        return true;
    }

private:
    int owner_ = 0;
    int root_ = 0;
    std::vector<GraphNode> nodes_;
};

// ---------------------------------------------------------------------------
// Traversal

// Follow the graph from the root under `value_of(var) -> state`. Exactly one
// out-edge matches at every split in a well-formed graph.
template <typename ValueFn>
int leaf_lookup(const DecisionGraph& graph, ValueFn&& value_of) {
    int v = graph.root();
    while (graph.is_split(v)) {
        const GraphNode& n = graph.node(v);
        int state = value_of(n.split_var);
        int next = -1;
        for (const auto& e : n.edges)
            if (set_contains(e.values, state)) {
                next = e.child;
                break;
            }
        if (next < 0)
            throw invariant_error("leaf_lookup: no out-edge covers state " + std::to_string(state) +
                                  " of variable " + std::to_string(n.split_var));
        v = next;
    }
    if (!graph.is_leaf(v)) throw invariant_error("leaf_lookup: traversal reached a dead node");
    return v;
}

// Leaf reached by one dataset row.
inline int leaf_for_case(const DecisionGraph& graph, const Dataset& data, std::size_t case_index) {
    return leaf_lookup(graph, [&](int var) { return static_cast<int>(data.value(case_index, var)); });
}

// Leaf reached by parent-state index j of `space`.
inline int leaf_for_parent_state(const DecisionGraph& graph, const ParentSpace& space, std::uint64_t j) {
    std::vector<int> values = space.decode(j);
    return leaf_lookup(graph, [&](int var) {
        for (std::size_t t = 0; t < space.parents().size(); ++t)
            if (space.parents()[t] == var) return values[t];
        throw invariant_error("leaf_lookup: graph splits on variable " + std::to_string(var) +
                              " outside the parent set");
    });
}

// ---------------------------------------------------------------------------
// Path analysis
//
// The states reaching a node can differ per incoming path (merged leaves), so
// reachable sets and preimage fractions are computed by walking every
// root-to-node path with its accumulated constraints. Graphs grown by the
// search operators stay small, which keeps this cheap.

namespace detail {

// var -> constraint set; a variable absent from the map is unconstrained.
using PathConstraints = std::map<int, ValueSet>;

template <typename LeafVisit>
void walk_paths(const DecisionGraph& graph, const Domain& domain, int node, PathConstraints& constraints,
                LeafVisit&& visit) {
    if (graph.is_leaf(node)) {
        visit(node, constraints);
        return;
    }
    const GraphNode& n = graph.node(node);
    for (const auto& e : n.edges) {
        auto it = constraints.find(n.split_var);
        ValueSet narrowed = it == constraints.end() ? e.values : set_intersect(it->second, e.values);
        if (narrowed.empty()) continue;  // no state follows this edge on this path
        ValueSet saved;
        bool had = it != constraints.end();
        if (had) saved = it->second;
        constraints[n.split_var] = std::move(narrowed);
        walk_paths(graph, domain, e.child, constraints, visit);
        if (had)
            constraints[n.split_var] = std::move(saved);
        else
            constraints.erase(n.split_var);
    }
}

}  // namespace detail

// Per live node: for every variable constrained on *all* root paths to it,
// the union over paths of the path constraint. A variable absent from a
// node's map is unconstrained (all its states reach the node).
class ReachableSets {
public:
    ReachableSets(const Domain& domain, const DecisionGraph& graph) : domain_(&domain) {
        per_node_.resize(static_cast<std::size_t>(graph.num_ids()));
        seen_.assign(static_cast<std::size_t>(graph.num_ids()), false);
        detail::PathConstraints constraints;
        walk(graph, domain, graph.root(), constraints);
    }

    // Reachable states of `var` at `node`.
    ValueSet at(int node, int var) const {
        const auto& m = per_node_[static_cast<std::size_t>(node)];
        auto it = m.find(var);
        if (it == m.end()) return full_value_set(domain_->cardinality(var));
        return it->second;
    }

    bool visited(int node) const { return seen_[static_cast<std::size_t>(node)]; }

private:
    void walk(const DecisionGraph& graph, const Domain& domain, int node, detail::PathConstraints& constraints) {
        merge_into(node, constraints);
        if (!graph.is_split(node)) return;
        const GraphNode& n = graph.node(node);
        for (const auto& e : n.edges) {
            auto it = constraints.find(n.split_var);
            ValueSet narrowed = it == constraints.end() ? e.values : set_intersect(it->second, e.values);
            if (narrowed.empty()) continue;
            ValueSet saved;
            bool had = it != constraints.end();
            if (had) saved = it->second;
            constraints[n.split_var] = std::move(narrowed);
            walk(graph, domain, e.child, constraints);
            if (had)
                constraints[n.split_var] = std::move(saved);
            else
                constraints.erase(n.split_var);
        }
    }

    void merge_into(int node, const detail::PathConstraints& constraints) {
        auto& acc = per_node_[static_cast<std::size_t>(node)];
        if (!seen_[static_cast<std::size_t>(node)]) {
            seen_[static_cast<std::size_t>(node)] = true;
            acc = constraints;
            return;
        }
        // Union per variable; a variable unconstrained on any path becomes
        // unconstrained in the accumulator.
        for (auto it = acc.begin(); it != acc.end();) {
            auto found = constraints.find(it->first);
            if (found == constraints.end()) {
                it = acc.erase(it);
            } else {
                it->second = set_union(it->second, found->second);
                ++it;
            }
        }
    }

    const Domain* domain_;
    std::vector<detail::PathConstraints> per_node_;
    std::vector<bool> seen_;
};

// Fraction of the joint parent space mapped to each leaf, exact for any
// parent-space size (no enumeration). Entries are (leaf id, fraction),
// ascending by leaf id; fractions over all leaves sum to 1.
inline std::vector<std::pair<int, double>> leaf_fractions(const Domain& domain, const DecisionGraph& graph) {
    std::map<int, double> acc;
    detail::PathConstraints constraints;
    detail::walk_paths(graph, domain, graph.root(), constraints,
                       [&](int leaf, const detail::PathConstraints& c) {
                           double f = 1.0;
                           for (const auto& [var, values] : c)
                               f *= static_cast<double>(values.size()) / static_cast<double>(domain.cardinality(var));
                           acc[leaf] += f;
                       });
    for (int leaf : graph.leaf_ids())
        acc.emplace(leaf, 0.0);  // leaves sheltered from every path keep fraction 0
    return {acc.begin(), acc.end()};
}

// ---------------------------------------------------------------------------
// Leaf-set indices: the full preimage (set of parent-state indices j) of each
// leaf. Requires an enumerable parent space.

inline std::vector<std::pair<int, std::vector<std::uint64_t>>> leaf_preimages(const DecisionGraph& graph,
                                                                              const ParentSpace& space,
                                                                              std::uint64_t enumeration_limit =
                                                                                  100'000'000ULL) {
    if (space.overflow() || space.size() > enumeration_limit)
        throw invariant_error("leaf_preimages: parent space too large to enumerate");
    std::map<int, std::vector<std::uint64_t>> acc;
    for (int leaf : graph.leaf_ids()) acc.emplace(leaf, std::vector<std::uint64_t>{});
    for (std::uint64_t j = 0; j < space.size(); ++j) acc[leaf_for_parent_state(graph, space, j)].push_back(j);
    return {acc.begin(), acc.end()};
}

// j -> leaf id over the whole parent space.
inline std::vector<int> leaf_index_of_state(const DecisionGraph& graph, const ParentSpace& space,
                                            std::uint64_t enumeration_limit = 100'000'000ULL) {
    if (space.overflow() || space.size() > enumeration_limit)
        throw invariant_error("leaf_index_of_state: parent space too large to enumerate");
    std::vector<int> out(space.size());
    for (std::uint64_t j = 0; j < space.size(); ++j) out[j] = leaf_for_parent_state(graph, space, j);
    return out;
}

// Canonical form of the leaf partition: each state j maps to the smallest
// state index sharing its leaf. Two graphs impose the same parameter
// constraints iff their canonical partitions are equal.
inline std::vector<std::uint64_t> canonical_partition(const std::vector<int>& j_to_leaf) {
    std::map<int, std::uint64_t> first_seen;
    std::vector<std::uint64_t> out(j_to_leaf.size());
    for (std::uint64_t j = 0; j < j_to_leaf.size(); ++j) {
        auto [it, inserted] = first_seen.emplace(j_to_leaf[j], j);
        out[j] = it->second;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Builders

// Complete decision tree: level l splits the l-th parent, one singleton edge
// per state. Leaves end up with singleton preimages, ordered so that the
// first parent varies slowest in creation order.
inline DecisionGraph build_complete_tree(int owner, const Domain& domain, const std::vector<int>& parents) {
    DecisionGraph g(owner);
    if (parents.empty()) return g;
    std::vector<int> frontier{g.root()};
    for (int p : parents) {
        std::vector<ValueSet> edge_sets;
        for (int k = 0; k < domain.cardinality(p); ++k) edge_sets.push_back(ValueSet{k});
        std::vector<int> next;
        for (int leaf : frontier) {
            auto children = g.split_leaf(leaf, p, edge_sets);
            next.insert(next.end(), children.begin(), children.end());
        }
        frontier = std::move(next);
    }
    return g;
}

// Complete tree with leaves merged according to an explicit partition of the
// parent-state indices. The classes must be disjoint and cover [0, q).
inline DecisionGraph merge_complete_tree(int owner, const Domain& domain, const std::vector<int>& parents,
                                         const std::vector<std::vector<std::uint64_t>>& equality_classes) {
    ParentSpace space(domain, parents);
    if (space.overflow()) throw invariant_error("merge_complete_tree: parent space overflows");
    const std::uint64_t q = space.size();
    std::vector<char> covered(q, 0);
    for (const auto& cls : equality_classes) {
        if (cls.empty()) throw invariant_error("merge_complete_tree: empty equality class");
        for (std::uint64_t j : cls) {
            if (j >= q) throw invariant_error("merge_complete_tree: state index out of range");
            if (covered[j]) throw invariant_error("merge_complete_tree: state index appears in two classes");
            covered[j] = 1;
        }
    }
    for (std::uint64_t j = 0; j < q; ++j)
        if (!covered[j]) throw invariant_error("merge_complete_tree: partition does not cover all parent states");

    DecisionGraph g = build_complete_tree(owner, domain, parents);
    std::vector<int> j_to_leaf = leaf_index_of_state(g, space);
    for (const auto& cls : equality_classes) {
        int target = j_to_leaf[cls.front()];
        for (std::size_t t = 1; t < cls.size(); ++t) {
            int other = j_to_leaf[cls[t]];
            if (other == target) continue;
            int kept = g.merge_leaves(target, other);
            if (kept != target)
                for (auto& leaf : j_to_leaf)
                    if (leaf == target) leaf = kept;
            for (auto& leaf : j_to_leaf)
                if (leaf == other) leaf = kept;
            target = kept;
        }
    }
    return g;
}

}  // namespace dgbn
