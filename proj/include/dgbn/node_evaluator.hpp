#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dgbn/decision_graph.hpp"
#include "dgbn/domain.hpp"
#include "dgbn/errors.hpp"
#include "dgbn/math.hpp"
#include "dgbn/operators.hpp"
#include "dgbn/scoring.hpp"

namespace dgbn {

// Incremental scorer for one node's decision graph during search. Keeps the
// cases routed to each leaf, the leaf counts, hyperparameters and per-leaf
// score terms, so an operator's score change touches only the leaves the
// operator touches: a split re-routes just the cases at the split leaf, a
// merge adds counts (and, for the network priors, hyperparameters, which are
// additive over disjoint preimages).
//
// With the uniform parameter prior every lnGamma argument is integral and is
// served from a shared LogGammaIntTable.
class NodeEvaluator {
public:
    NodeEvaluator(const Dataset& data, const ScoreConfig& config, int node, std::vector<int> parents,
                  DecisionGraph graph, LogGammaIntTable* int_table)
        : data_(&data),
          config_(&config),
          node_(node),
          cardinality_(data.domain().cardinality(node)),
          parents_(std::move(parents)),
          graph_(std::move(graph)),
          int_table_(int_table) {
        prior_per_leaf_ = config.structure_prior == StructurePrior::kappa
                              ? static_cast<double>(cardinality_ - 1) * std::log(config.kappa)
                              : 0.0;
        if (config.parameter_prior == ParameterPrior::uniform) {
            if (!int_table_) throw invariant_error("node evaluator: uniform prior needs a lnGamma table");
            int_table_->grow(static_cast<std::int64_t>(data.num_cases()) + cardinality_ + 1);
        }
        rebuild();
    }

    int node() const { return node_; }
    const Domain& domain() const { return data_->domain(); }
    const DecisionGraph& graph() const { return graph_; }
    const std::vector<int>& parents() const { return parents_; }

    // Swap the working parent list (used to offer candidate split variables).
    // Existing leaf statistics are unaffected: counts depend only on the
    // graph, and the network-prior hyperparameters are invariant under
    // extending the parent set with unconstrained variables.
    void set_parents(std::vector<int> parents) { parents_ = std::move(parents); }

    const ReachableSets& reachable() {
        if (!reach_) reach_.emplace(data_->domain(), graph_);
        return *reach_;
    }

    int num_leaves() const { return graph_.num_leaves(); }

    // Log marginal likelihood of this node.
    double node_term() const {
        NeumaierSum sum;
        for (int leaf : graph_.leaf_ids()) sum.add(terms_[static_cast<std::size_t>(leaf)]);
        return sum.value();
    }

    // Node term plus this node's share of the structure prior; operator
    // deltas are exactly deltas of this quantity.
    double objective() const { return node_term() + static_cast<double>(num_leaves()) * prior_per_leaf_; }

    double delta(const Operator& op) {
        if (op.kind == Operator::Kind::merge) {
            const auto& c1 = counts_[static_cast<std::size_t>(op.leaf)];
            const auto& c2 = counts_[static_cast<std::size_t>(op.leaf2)];
            std::vector<std::int64_t> merged(c1.size());
            for (std::size_t k = 0; k < c1.size(); ++k) merged[k] = c1[k] + c2[k];
            double term;
            if (config_->parameter_prior == ParameterPrior::uniform) {
                term = leaf_term_uniform(merged);
            } else {
                const auto& a1 = alphas_[static_cast<std::size_t>(op.leaf)];
                const auto& a2 = alphas_[static_cast<std::size_t>(op.leaf2)];
                std::vector<double> alpha(a1.size());
                for (std::size_t k = 0; k < a1.size(); ++k) alpha[k] = a1[k] + a2[k];
                term = leaf_log_marginal(merged, alpha);
            }
            return term - terms_[static_cast<std::size_t>(op.leaf)] - terms_[static_cast<std::size_t>(op.leaf2)] -
                   prior_per_leaf_;
        }

        auto sets = split_edge_sets(op, reachable().at(op.leaf, op.var));
        if (!sets) throw invariant_error("node evaluator: inapplicable operator " + to_string(op));
        std::vector<std::vector<std::int64_t>> child_counts = route_counts(op.leaf, op.var, *sets);

        double new_terms = 0.0;
        if (config_->parameter_prior == ParameterPrior::uniform) {
            for (const auto& c : child_counts) new_terms += leaf_term_uniform(c);
        } else {
            // Child hyperparameters come from the candidate graph itself;
            // merged-leaf preimages make them path dependent, so no local
            // shortcut exists.
            DecisionGraph scratch = graph_;
            std::vector<int> children = scratch.split_leaf(op.leaf, op.var, *sets);
            auto alphas = leaf_alphas(data_->domain(), parents_, scratch, *config_);
            std::vector<int> leaves = scratch.leaf_ids();
            for (std::size_t i = 0; i < children.size(); ++i) {
                std::size_t pos = 0;
                while (leaves[pos] != children[i]) ++pos;
                new_terms += leaf_log_marginal(child_counts[i], alphas[pos]);
            }
        }
        return new_terms - terms_[static_cast<std::size_t>(op.leaf)] +
               static_cast<double>(sets->size() - 1) * prior_per_leaf_;
    }

    void apply(const Operator& op) {
        if (op.kind == Operator::Kind::merge) {
            int keep = graph_.merge_leaves(op.leaf, op.leaf2);
            int drop = keep == op.leaf ? op.leaf2 : op.leaf;
            auto& cases = case_lists_[static_cast<std::size_t>(keep)];
            auto& other = case_lists_[static_cast<std::size_t>(drop)];
            cases.insert(cases.end(), other.begin(), other.end());
            other.clear();
            auto& ck = counts_[static_cast<std::size_t>(keep)];
            auto& cd = counts_[static_cast<std::size_t>(drop)];
            for (std::size_t k = 0; k < ck.size(); ++k) ck[k] += cd[k];
            cd.clear();
            if (config_->parameter_prior != ParameterPrior::uniform) {
                auto& ak = alphas_[static_cast<std::size_t>(keep)];
                auto& ad = alphas_[static_cast<std::size_t>(drop)];
                for (std::size_t k = 0; k < ak.size(); ++k) ak[k] += ad[k];
                ad.clear();
            }
            terms_[static_cast<std::size_t>(keep)] = leaf_term(keep);
            terms_[static_cast<std::size_t>(drop)] = 0.0;
        } else {
            auto sets = split_edge_sets(op, reachable().at(op.leaf, op.var));
            if (!sets) throw invariant_error("node evaluator: inapplicable operator " + to_string(op));
            std::vector<std::vector<std::int64_t>> child_counts = route_counts(op.leaf, op.var, *sets);
            std::vector<int> children = graph_.split_leaf(op.leaf, op.var, *sets);
            grow_to(graph_.num_ids());

            // Re-route the split leaf's cases to the children.
            std::vector<int> state_to_edge(static_cast<std::size_t>(data_->domain().cardinality(op.var)), -1);
            for (std::size_t e = 0; e < sets->size(); ++e)
                for (int v : (*sets)[e]) state_to_edge[static_cast<std::size_t>(v)] = static_cast<int>(e);
            for (std::int32_t c : case_lists_[static_cast<std::size_t>(op.leaf)]) {
                int e = state_to_edge[static_cast<std::size_t>(data_->value(static_cast<std::size_t>(c), op.var))];
                case_lists_[static_cast<std::size_t>(children[static_cast<std::size_t>(e)])].push_back(c);
            }
            case_lists_[static_cast<std::size_t>(op.leaf)].clear();
            counts_[static_cast<std::size_t>(op.leaf)].clear();
            terms_[static_cast<std::size_t>(op.leaf)] = 0.0;

            std::vector<std::vector<double>> fresh_alphas;
            std::vector<int> leaves;
            if (config_->parameter_prior != ParameterPrior::uniform) {
                fresh_alphas = leaf_alphas(data_->domain(), parents_, graph_, *config_);
                leaves = graph_.leaf_ids();
            }
            for (std::size_t i = 0; i < children.size(); ++i) {
                int child = children[i];
                counts_[static_cast<std::size_t>(child)] = std::move(child_counts[i]);
                if (config_->parameter_prior != ParameterPrior::uniform) {
                    std::size_t pos = 0;
                    while (leaves[pos] != child) ++pos;
                    alphas_[static_cast<std::size_t>(child)] = fresh_alphas[pos];
                }
                terms_[static_cast<std::size_t>(child)] = leaf_term(child);
            }
        }
        reach_.reset();
    }

    LeafStatistics statistics() const {
        LeafStatistics stats;
        stats.leaf_ids = graph_.leaf_ids();
        for (int leaf : stats.leaf_ids) {
            stats.count.push_back(counts_[static_cast<std::size_t>(leaf)]);
            if (config_->parameter_prior == ParameterPrior::uniform)
                stats.alpha.emplace_back(static_cast<std::size_t>(cardinality_), 1.0);
            else
                stats.alpha.push_back(alphas_[static_cast<std::size_t>(leaf)]);
        }
        return stats;
    }

private:
    void rebuild() {
        const int ids = graph_.num_ids();
        case_lists_.assign(static_cast<std::size_t>(ids), {});
        counts_.assign(static_cast<std::size_t>(ids), {});
        alphas_.assign(static_cast<std::size_t>(ids), {});
        terms_.assign(static_cast<std::size_t>(ids), 0.0);
        for (int leaf : graph_.leaf_ids())
            counts_[static_cast<std::size_t>(leaf)].assign(static_cast<std::size_t>(cardinality_), 0);
        for (std::size_t c = 0; c < data_->num_cases(); ++c) {
            int leaf = leaf_for_case(graph_, *data_, c);
            case_lists_[static_cast<std::size_t>(leaf)].push_back(static_cast<std::int32_t>(c));
            counts_[static_cast<std::size_t>(leaf)][static_cast<std::size_t>(data_->value(c, node_))]++;
        }
        if (config_->parameter_prior != ParameterPrior::uniform) {
            auto fresh = leaf_alphas(data_->domain(), parents_, graph_, *config_);
            std::vector<int> leaves = graph_.leaf_ids();
            for (std::size_t b = 0; b < leaves.size(); ++b)
                alphas_[static_cast<std::size_t>(leaves[b])] = std::move(fresh[b]);
        }
        for (int leaf : graph_.leaf_ids()) terms_[static_cast<std::size_t>(leaf)] = leaf_term(leaf);
        reach_.reset();
    }

    void grow_to(int ids) {
        case_lists_.resize(static_cast<std::size_t>(ids));
        counts_.resize(static_cast<std::size_t>(ids));
        alphas_.resize(static_cast<std::size_t>(ids));
        terms_.resize(static_cast<std::size_t>(ids), 0.0);
    }

    // Counts the cases at `leaf` would spread over the children of a split.
    std::vector<std::vector<std::int64_t>> route_counts(int leaf, int var, const std::vector<ValueSet>& sets) const {
        std::vector<int> state_to_edge(static_cast<std::size_t>(data_->domain().cardinality(var)), -1);
        for (std::size_t e = 0; e < sets.size(); ++e)
            for (int v : sets[e]) state_to_edge[static_cast<std::size_t>(v)] = static_cast<int>(e);
        std::vector<std::vector<std::int64_t>> out(sets.size());
        for (auto& row : out) row.assign(static_cast<std::size_t>(cardinality_), 0);
        for (std::int32_t c : case_lists_[static_cast<std::size_t>(leaf)]) {
            int e = state_to_edge[static_cast<std::size_t>(data_->value(static_cast<std::size_t>(c), var))];
            if (e < 0)
                throw invariant_error("node evaluator: case state outside the leaf's reachable set");
            out[static_cast<std::size_t>(e)][static_cast<std::size_t>(data_->value(static_cast<std::size_t>(c), node_))]++;
        }
        return out;
    }

    double leaf_term(int leaf) const {
        if (config_->parameter_prior == ParameterPrior::uniform)
            return leaf_term_uniform(counts_[static_cast<std::size_t>(leaf)]);
        return leaf_log_marginal(counts_[static_cast<std::size_t>(leaf)], alphas_[static_cast<std::size_t>(leaf)]);
    }

    // Uniform prior: every hyperparameter is 1, so the leaf term is
    // lnG(r) - lnG(N + r) + sum_c lnG(N_c + 1), all at integer arguments.
    double leaf_term_uniform(const std::vector<std::int64_t>& counts) const {
        std::int64_t total = 0;
        double sum = 0.0;
        for (std::int64_t c : counts) {
            total += c;
            if (c != 0) sum += int_table_->ln_gamma_int(c);
        }
        if (total == 0) return 0.0;
        return sum + int_table_->ln_gamma_int(cardinality_ - 1) - int_table_->ln_gamma_int(total + cardinality_ - 1);
    }

    const Dataset* data_;
    const ScoreConfig* config_;
    int node_;
    int cardinality_;
    std::vector<int> parents_;
    DecisionGraph graph_;
    LogGammaIntTable* int_table_;
    double prior_per_leaf_ = 0.0;

    std::vector<std::vector<std::int32_t>> case_lists_;  // by node id
    std::vector<std::vector<std::int64_t>> counts_;      // by node id
    std::vector<std::vector<double>> alphas_;            // by node id (network priors only)
    std::vector<double> terms_;                          // by node id
    std::optional<ReachableSets> reach_;
};

}  // namespace dgbn
