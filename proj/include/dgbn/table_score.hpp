#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "dgbn/domain.hpp"
#include "dgbn/errors.hpp"
#include "dgbn/math.hpp"
#include "dgbn/parent_space.hpp"
#include "dgbn/scoring.hpp"

namespace dgbn {

// Complete-table scoring: one parameter set per parent-state index j, no
// decision graphs involved. Counts are gathered in a hash map over the
// observed j only; unobserved parent states contribute exactly zero to the
// log marginal and are skipped. This is the classical scorer the decision
// graph machinery must reproduce on complete trees, and it backs the
// complete-table search baseline.

inline double table_node_log_marginal(const Dataset& data, const std::vector<int>& parents, int a,
                                      const ScoreConfig& config) {
    const Domain& domain = data.domain();
    const int r = domain.cardinality(a);
    ParentSpace space(domain, parents);
    if (space.overflow())
        throw invariant_error("table scoring: parent space of '" + domain.name(a) + "' exceeds 2^64 states");

    std::unordered_map<std::uint64_t, std::vector<std::int64_t>> counts;
    counts.reserve(data.num_cases());
    for (std::size_t c = 0; c < data.num_cases(); ++c) {
        auto& row = counts[space.encode_case(data, c)];
        if (row.empty()) row.assign(static_cast<std::size_t>(r), 0);
        row[static_cast<std::size_t>(data.value(c, a))]++;
    }

    std::vector<std::uint64_t> observed;
    observed.reserve(counts.size());
    for (const auto& [j, row] : counts) observed.push_back(j);
    std::sort(observed.begin(), observed.end());

    // Hyperparameters per (j, k).
    std::vector<double> pn_marginal;
    if (config.parameter_prior == ParameterPrior::prior_network) {
        if (space.size() > config.pn_enumeration_limit / static_cast<std::uint64_t>(r))
            throw config_error("prior-network scoring: parent space of '" + domain.name(a) +
                               "' too large for exact hyperparameter enumeration");
        std::vector<int> targets = parents;
        targets.push_back(a);
        pn_marginal = joint_marginal(*config.prior_network, targets, config.pn_enumeration_limit);
    }
    auto alpha_at = [&](std::uint64_t j, int k) -> double {
        switch (config.parameter_prior) {
            case ParameterPrior::uniform:
                return 1.0;
            case ParameterPrior::uniform_network:
                return config.ess / (static_cast<double>(r) * static_cast<double>(space.size()));
            case ParameterPrior::prior_network:
                return config.ess * pn_marginal[j + space.size() * static_cast<std::uint64_t>(k)];
        }
        return 1.0;
    };

    NeumaierSum sum;
    for (std::uint64_t j : observed) {
        const auto& row = counts[j];
        double alpha_sum = 0.0;
        std::int64_t count_sum = 0;
        NeumaierSum term;
        for (int k = 0; k < r; ++k) {
            double al = alpha_at(j, k);
            if (!(al > 0.0))
                throw config_error("parameter prior assigns a nonpositive hyperparameter at node '" +
                                   domain.name(a) + "', parent state " + std::to_string(j) +
                                   " (positivity assumption violated)");
            alpha_sum += al;
            std::int64_t n = row[static_cast<std::size_t>(k)];
            count_sum += n;
            if (n != 0) term.add(log_gamma(static_cast<double>(n) + al) - log_gamma(al));
        }
        if (count_sum != 0)
            term.add(log_gamma(alpha_sum) - log_gamma(static_cast<double>(count_sum) + alpha_sum));
        sum.add(term.value());
    }
    return sum.value();
}

// Free parameters of the complete-table model: q_a * (r_a - 1) per node,
// evaluated in floating point so huge parent spaces still get a prior.
inline double table_log_structure_prior(const GlobalStructure& g, const ScoreConfig& config) {
    if (config.structure_prior == StructurePrior::uniform) return 0.0;
    double params = 0.0;
    for (int a = 0; a < g.num_vars(); ++a) {
        double q = 1.0;
        for (int p : g.parents(a)) q *= static_cast<double>(g.domain().cardinality(p));
        params += q * static_cast<double>(g.domain().cardinality(a) - 1);
    }
    return params * std::log(config.kappa);
}

// Full score of a global structure under complete tables.
inline double table_log_score(const GlobalStructure& g, const Dataset& data, const ScoreConfig& config) {
    config.check();
    NeumaierSum sum;
    sum.add(table_log_structure_prior(g, config));
    for (int a = 0; a < g.num_vars(); ++a) sum.add(table_node_log_marginal(data, g.parents(a), a, config));
    return sum.value();
}

}  // namespace dgbn
