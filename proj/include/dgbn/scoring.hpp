#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "dgbn/decision_graph.hpp"
#include "dgbn/domain.hpp"
#include "dgbn/errors.hpp"
#include "dgbn/math.hpp"
#include "dgbn/parent_space.hpp"
#include "dgbn/structure.hpp"

namespace dgbn {

// ---------------------------------------------------------------------------
// Score configuration

enum class ParameterPrior {
    uniform,          // every hyperparameter is 1
    prior_network,    // hyperparameters assessed from a prior network
    uniform_network,  // prior-network rule with a uniform joint
};

enum class StructurePrior {
    uniform,  // constant, contributes 0 in log domain
    kappa,    // penalizes parameter count: |Theta| * ln(kappa)
};

struct ScoreConfig {
    ParameterPrior parameter_prior = ParameterPrior::uniform;
    double ess = 1.0;  // equivalent sample size for the network priors
    std::shared_ptr<const ParameterizedNetwork> prior_network;  // required for prior_network

    StructurePrior structure_prior = StructurePrior::uniform;
    double kappa = 1.0;

    // Exact enumeration bound for prior-network hyperparameters: a node is
    // refused when q_a * r_a (or the prior network's ancestral closure)
    // exceeds this.
    std::uint64_t pn_enumeration_limit = 10'000'000;

    void check() const {
        if (parameter_prior != ParameterPrior::uniform && !(ess > 0.0))
            throw config_error("score config: equivalent sample size must be positive");
        if (parameter_prior == ParameterPrior::prior_network && !prior_network)
            throw config_error("score config: prior-network scoring needs a prior network");
        if (structure_prior == StructurePrior::kappa && !(kappa > 0.0 && kappa <= 1.0))
            throw config_error("score config: kappa must lie in (0, 1]");
    }

    bool uses_network_prior() const { return parameter_prior != ParameterPrior::uniform; }
};

// ---------------------------------------------------------------------------
// Sufficient statistics

// Hyperparameters and data counts for every leaf of one node's graph, ordered
// by ascending leaf id.
struct LeafStatistics {
    std::vector<int> leaf_ids;
    std::vector<std::vector<double>> alpha;        // [leaf][state]
    std::vector<std::vector<std::int64_t>> count;  // [leaf][state]

    double alpha_sum(std::size_t b) const {
        double s = 0.0;
        for (double a : alpha[b]) s += a;
        return s;
    }
    std::int64_t count_sum(std::size_t b) const {
        std::int64_t s = 0;
        for (std::int64_t c : count[b]) s += c;
        return s;
    }
};

// Data counts per leaf for node `a`: each case is routed through the decision
// graph and bumps the count of its value of x_a at the leaf it reaches.
inline std::vector<std::vector<std::int64_t>> accumulate_counts(const Dataset& data, const NetworkStructure& s,
                                                                int a) {
    const DecisionGraph& graph = s.graphs[static_cast<std::size_t>(a)];
    const int r = data.domain().cardinality(a);
    std::vector<std::vector<std::int64_t>> by_id(static_cast<std::size_t>(graph.num_ids()));
    std::vector<int> leaves = graph.leaf_ids();
    for (int leaf : leaves) by_id[static_cast<std::size_t>(leaf)].assign(static_cast<std::size_t>(r), 0);
    for (std::size_t c = 0; c < data.num_cases(); ++c) {
        int leaf = leaf_for_case(graph, data, c);
        by_id[static_cast<std::size_t>(leaf)][static_cast<std::size_t>(data.value(c, a))]++;
    }
    std::vector<std::vector<std::int64_t>> out;
    out.reserve(leaves.size());
    for (int leaf : leaves) out.push_back(std::move(by_id[static_cast<std::size_t>(leaf)]));
    return out;
}

// Hyperparameters per leaf of `graph` under `config`, for a node with the
// given (candidate-structure) parent list.
//
//   uniform:          alpha_abc = 1
//   uniform_network:  alpha_abc = ess * |preimage_b| / (r_a * q_a), computed
//                     as ess * fraction_b / r_a so arbitrarily large parent
//                     spaces work without enumeration
//   prior_network:    alpha_abc = ess * sum over the leaf preimage of
//                     p(x_a = k, Par = j | prior network), by exact
//                     enumeration (bounded by pn_enumeration_limit)
inline std::vector<std::vector<double>> leaf_alphas(const Domain& domain, const std::vector<int>& parents,
                                                    const DecisionGraph& graph, const ScoreConfig& config) {
    const int a = graph.owner();
    const int r = domain.cardinality(a);
    std::vector<int> leaves = graph.leaf_ids();
    std::vector<std::vector<double>> out(leaves.size());

    switch (config.parameter_prior) {
        case ParameterPrior::uniform:
            for (auto& v : out) v.assign(static_cast<std::size_t>(r), 1.0);
            return out;

        case ParameterPrior::uniform_network: {
            auto fractions = leaf_fractions(domain, graph);
            for (std::size_t b = 0; b < leaves.size(); ++b)
                out[b].assign(static_cast<std::size_t>(r),
                              config.ess * fractions[b].second / static_cast<double>(r));
            break;
        }

        case ParameterPrior::prior_network: {
            ParentSpace space(domain, parents);
            if (space.overflow() || space.size() > config.pn_enumeration_limit / static_cast<std::uint64_t>(r))
                throw config_error("prior-network scoring: parent space of '" + domain.name(a) +
                                   "' too large for exact hyperparameter enumeration");
            if (!(domain == config.prior_network->domain()))
                throw data_error("prior-network scoring: prior network domain does not match the data domain");
            std::vector<int> targets = parents;
            targets.push_back(a);
            std::vector<double> marginal = joint_marginal(*config.prior_network, targets,
                                                          config.pn_enumeration_limit);
            auto preimages = leaf_preimages(graph, space, config.pn_enumeration_limit);
            const std::uint64_t q = space.size();
            for (std::size_t b = 0; b < leaves.size(); ++b) {
                out[b].assign(static_cast<std::size_t>(r), 0.0);
                for (std::uint64_t j : preimages[b].second)
                    for (int k = 0; k < r; ++k)
                        out[b][static_cast<std::size_t>(k)] +=
                            config.ess * marginal[j + q * static_cast<std::uint64_t>(k)];
            }
            break;
        }
    }

    for (std::size_t b = 0; b < leaves.size(); ++b)
        for (int k = 0; k < r; ++k)
            if (!(out[b][static_cast<std::size_t>(k)] > 0.0))
                throw config_error("parameter prior assigns a nonpositive hyperparameter at node '" +
                                   domain.name(a) + "', leaf " + std::to_string(leaves[b]) + ", state " +
                                   std::to_string(k) + " (positivity assumption violated)");
    return out;
}

inline std::vector<std::vector<double>> assign_alphas(const ScoreConfig& config, const NetworkStructure& s, int a) {
    return leaf_alphas(s.domain(), s.global.parents(a), s.graphs[static_cast<std::size_t>(a)], config);
}

inline LeafStatistics compute_leaf_statistics(const Dataset& data, const NetworkStructure& s,
                                              const ScoreConfig& config, int a) {
    LeafStatistics stats;
    stats.leaf_ids = s.graphs[static_cast<std::size_t>(a)].leaf_ids();
    stats.count = accumulate_counts(data, s, a);
    stats.alpha = assign_alphas(config, s, a);
    return stats;
}

// ---------------------------------------------------------------------------
// The closed-form marginal likelihood

// Contribution of one leaf:
//   lnG(alpha_ab) - lnG(N_ab + alpha_ab)
//     + sum_c [ lnG(N_abc + alpha_abc) - lnG(alpha_abc) ]
inline double leaf_log_marginal(const std::vector<std::int64_t>& counts, const std::vector<double>& alphas) {
    double alpha_sum = 0.0;
    std::int64_t count_sum = 0;
    NeumaierSum term;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        alpha_sum += alphas[k];
        count_sum += counts[k];
        if (counts[k] != 0)
            term.add(log_gamma(static_cast<double>(counts[k]) + alphas[k]) - log_gamma(alphas[k]));
    }
    if (count_sum != 0) term.add(log_gamma(alpha_sum) - log_gamma(static_cast<double>(count_sum) + alpha_sum));
    return term.value();
}

// Log marginal likelihood of one node: the sum of its leaf contributions.
inline double node_log_marginal(const LeafStatistics& stats) {
    NeumaierSum sum;
    for (std::size_t b = 0; b < stats.leaf_ids.size(); ++b) {
        for (double a : stats.alpha[b])
            if (!(a > 0.0)) throw invariant_error("node_log_marginal: hyperparameters must be positive");
        sum.add(leaf_log_marginal(stats.count[b], stats.alpha[b]));
    }
    return sum.value();
}

// ---------------------------------------------------------------------------
// Structure prior and the full score

// Number of distinct free parameters: each leaf of each graph holds r_a - 1.
inline std::int64_t parameter_count(const NetworkStructure& s) {
    std::int64_t total = 0;
    for (int a = 0; a < s.domain().size(); ++a)
        total += static_cast<std::int64_t>(s.graphs[static_cast<std::size_t>(a)].num_leaves()) *
                 (s.domain().cardinality(a) - 1);
    return total;
}

inline double log_structure_prior(const NetworkStructure& s, const ScoreConfig& config) {
    if (config.structure_prior == StructurePrior::uniform) return 0.0;
    return static_cast<double>(parameter_count(s)) * std::log(config.kappa);
}

// Relative log posterior of the structure hypothesis: log structure prior
// plus the node sum of the log marginal likelihood. The normalization 1/p(D)
// is shared by every structure and dropped, so differences are log Bayes
// factors.
inline double log_score(const NetworkStructure& s, const Dataset& data, const ScoreConfig& config) {
    config.check();
    NeumaierSum sum;
    sum.add(log_structure_prior(s, config));
    for (int a = 0; a < s.domain().size(); ++a) sum.add(node_log_marginal(compute_leaf_statistics(data, s, config, a)));
    return sum.value();
}

// ---------------------------------------------------------------------------
// Per-node cache for incremental rescoring

struct NodeScores {
    std::vector<double> node_terms;  // node_log_marginal per node
    double structure_prior = 0.0;

    double total() const {
        NeumaierSum sum;
        sum.add(structure_prior);
        for (double t : node_terms) sum.add(t);
        return sum.value();
    }
};

inline NodeScores score_nodes(const NetworkStructure& s, const Dataset& data, const ScoreConfig& config) {
    config.check();
    NodeScores cache;
    cache.node_terms.reserve(static_cast<std::size_t>(s.domain().size()));
    for (int a = 0; a < s.domain().size(); ++a)
        cache.node_terms.push_back(node_log_marginal(compute_leaf_statistics(data, s, config, a)));
    cache.structure_prior = log_structure_prior(s, config);
    return cache;
}

// Score change from replacing node a's decision graph, leaving everything
// else fixed. Exact because the score is node decomposable.
inline double node_score_delta(const NodeScores& cache, const NetworkStructure& s, const Dataset& data,
                               const ScoreConfig& config, int a, const DecisionGraph& replacement) {
    NetworkStructure changed = s;
    changed.graphs[static_cast<std::size_t>(a)] = replacement;
    double new_term = node_log_marginal(compute_leaf_statistics(data, changed, config, a));
    double prior_delta = 0.0;
    if (config.structure_prior == StructurePrior::kappa) {
        std::int64_t leaf_delta = replacement.num_leaves() - s.graphs[static_cast<std::size_t>(a)].num_leaves();
        prior_delta = static_cast<double>(leaf_delta * (s.domain().cardinality(a) - 1)) * std::log(config.kappa);
    }
    return new_term - cache.node_terms[static_cast<std::size_t>(a)] + prior_delta;
}

}  // namespace dgbn
