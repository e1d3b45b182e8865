#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dgbn/decision_graph.hpp"
#include "dgbn/domain.hpp"
#include "dgbn/errors.hpp"
#include "dgbn/value_set.hpp"

namespace dgbn {

// The three moves over a node's decision graph. A complete split fans a leaf
// out into one child per reachable state of a parent; a binary split peels
// one state off; a merge fuses two leaves into one. Every operator must
// change the leaf partition, which for splits means the parent must have at
// least two reachable states at the leaf.
struct Operator {
    enum class Kind { complete_split, binary_split, merge };
    Kind kind = Kind::complete_split;
    int leaf = -1;   // split target, or smaller merge operand
    int leaf2 = -1;  // larger merge operand
    int var = -1;    // split variable
    int state = -1;  // peeled state for binary splits

    static Operator complete_split(int leaf, int var) { return {Kind::complete_split, leaf, -1, var, -1}; }
    static Operator binary_split(int leaf, int var, int state) { return {Kind::binary_split, leaf, -1, var, state}; }
    static Operator merge(int a, int b) {
        return {Kind::merge, a < b ? a : b, a < b ? b : a, -1, -1};
    }
};

inline bool operator==(const Operator& x, const Operator& y) {
    return x.kind == y.kind && x.leaf == y.leaf && x.leaf2 == y.leaf2 && x.var == y.var && x.state == y.state;
}

inline std::string to_string(const Operator& op) {
    switch (op.kind) {
        case Operator::Kind::complete_split:
            return "C(" + std::to_string(op.leaf) + ", " + std::to_string(op.var) + ")";
        case Operator::Kind::binary_split:
            return "B(" + std::to_string(op.leaf) + ", " + std::to_string(op.var) + ", " +
                   std::to_string(op.state) + ")";
        case Operator::Kind::merge:
            return "M(" + std::to_string(op.leaf) + ", " + std::to_string(op.leaf2) + ")";
    }
    return "?";
}

struct OperatorSet {
    bool complete_split = false;
    bool binary_split = false;
    bool merge = false;

    bool empty() const { return !complete_split && !binary_split && !merge; }

    // "CBM", "bm", ... one flag per letter.
    static OperatorSet parse(const std::string& text) {
        OperatorSet s;
        for (char ch : text) {
            switch (ch) {
                case 'C': case 'c': s.complete_split = true; break;
                case 'B': case 'b': s.binary_split = true; break;
                case 'M': case 'm': s.merge = true; break;
                default:
                    throw config_error(std::string("operator set: unknown operator '") + ch +
                                       "' (expected letters from CBM)");
            }
        }
        if (s.empty()) throw config_error("operator set: empty");
        return s;
    }

    std::string label() const {
        std::string t;
        if (complete_split) t += 'C';
        if (binary_split) t += 'B';
        if (merge) t += 'M';
        return t;
    }
};

// ---------------------------------------------------------------------------
// Preconditions and application

// Edge label sets a split operator would create, or nullopt when the operator
// is inapplicable (fewer than two reachable states, or the peeled state is
// unreachable).
inline std::optional<std::vector<ValueSet>> split_edge_sets(const Operator& op, const ValueSet& reachable) {
    if (reachable.size() < 2) return std::nullopt;
    if (op.kind == Operator::Kind::complete_split) {
        std::vector<ValueSet> sets;
        sets.reserve(reachable.size());
        for (int v : reachable) sets.push_back(ValueSet{v});
        return sets;
    }
    if (!set_contains(reachable, op.state)) return std::nullopt;
    return std::vector<ValueSet>{ValueSet{op.state}, set_minus(reachable, ValueSet{op.state})};
}

inline bool can_apply(const DecisionGraph& graph, const ReachableSets& reach, const Operator& op) {
    if (op.kind == Operator::Kind::merge)
        return op.leaf != op.leaf2 && graph.is_leaf(op.leaf) && graph.is_leaf(op.leaf2);
    if (!graph.is_leaf(op.leaf)) return false;
    return split_edge_sets(op, reach.at(op.leaf, op.var)).has_value();
}

// Apply in place; the caller has already checked applicability.
// Returns the ids of the leaves the operator created or kept.
inline std::vector<int> apply_operator_unchecked(DecisionGraph& graph, const ReachableSets& reach,
                                                 const Operator& op) {
    if (op.kind == Operator::Kind::merge) return {graph.merge_leaves(op.leaf, op.leaf2)};
    auto sets = split_edge_sets(op, reach.at(op.leaf, op.var));
    if (!sets) throw invariant_error("apply_operator: inapplicable split " + to_string(op));
    return graph.split_leaf(op.leaf, op.var, *sets);
}

// Functional form: a fresh graph, or nullopt when the precondition fails.
inline std::optional<DecisionGraph> apply_operator(const Domain& domain, const DecisionGraph& graph,
                                                   const Operator& op) {
    ReachableSets reach(domain, graph);
    if (!can_apply(graph, reach, op)) return std::nullopt;
    DecisionGraph out = graph;
    apply_operator_unchecked(out, reach, op);
    return out;
}

inline std::optional<DecisionGraph> apply_complete_split(const Domain& domain, const DecisionGraph& graph, int leaf,
                                                         int var) {
    return apply_operator(domain, graph, Operator::complete_split(leaf, var));
}

inline std::optional<DecisionGraph> apply_binary_split(const Domain& domain, const DecisionGraph& graph, int leaf,
                                                       int var, int state) {
    return apply_operator(domain, graph, Operator::binary_split(leaf, var, state));
}

inline std::optional<DecisionGraph> apply_merge(const Domain& domain, const DecisionGraph& graph, int leaf1,
                                                int leaf2) {
    return apply_operator(domain, graph, Operator::merge(leaf1, leaf2));
}

// ---------------------------------------------------------------------------
// Enumeration

// Every applicable operator, in the deterministic order that also breaks
// score ties: complete splits, then binary splits, then merges; within a
// kind ascending by leaf id(s), then split variable, then peeled state.
inline std::vector<Operator> enumerate_operators(const std::vector<int>& parents, const DecisionGraph& graph,
                                                 const OperatorSet& opset, const ReachableSets& reach) {
    std::vector<Operator> ops;
    std::vector<int> leaves = graph.leaf_ids();
    if (opset.complete_split)
        for (int leaf : leaves)
            for (int p : parents)
                if (reach.at(leaf, p).size() >= 2) ops.push_back(Operator::complete_split(leaf, p));
    if (opset.binary_split)
        for (int leaf : leaves)
            for (int p : parents) {
                ValueSet r = reach.at(leaf, p);
                if (r.size() < 2) continue;
                for (int state : r) ops.push_back(Operator::binary_split(leaf, p, state));
            }
    if (opset.merge)
        for (std::size_t i = 0; i < leaves.size(); ++i)
            for (std::size_t j = i + 1; j < leaves.size(); ++j) ops.push_back(Operator::merge(leaves[i], leaves[j]));
    return ops;
}

inline std::vector<Operator> enumerate_operators(const Domain& domain, const std::vector<int>& parents,
                                                 const DecisionGraph& graph, const OperatorSet& opset) {
    ReachableSets reach(domain, graph);
    return enumerate_operators(parents, graph, opset, reach);
}

}  // namespace dgbn
