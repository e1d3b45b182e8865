#pragma once

#include <cstdint>
#include <vector>

#include "dgbn/domain.hpp"
#include "dgbn/errors.hpp"
#include "dgbn/rng.hpp"
#include "dgbn/structure.hpp"

namespace dgbn {

// Ancestral sampling: each case is drawn variable by variable in topological
// order, the distribution for a variable selected by routing the already
// sampled parent values through its decision graph. Bit-reproducible for a
// given seed.
inline Dataset forward_sample(const ParameterizedNetwork& net, std::size_t n, std::uint64_t seed) {
    const Domain& domain = net.domain();
    auto order = net.structure.global.topological_order();
    if (!order) throw invariant_error("forward_sample: network structure is cyclic");

    Rng rng(seed);
    std::vector<std::int32_t> flat;
    flat.reserve(n * static_cast<std::size_t>(domain.size()));
    std::vector<int> assignment(static_cast<std::size_t>(domain.size()), 0);
    for (std::size_t c = 0; c < n; ++c) {
        for (int v : *order) {
            const auto& graph = net.structure.graphs[static_cast<std::size_t>(v)];
            int leaf = leaf_lookup(graph, [&](int var) { return assignment[static_cast<std::size_t>(var)]; });
            auto it = net.leaf_distributions[static_cast<std::size_t>(v)].find(leaf);
            if (it == net.leaf_distributions[static_cast<std::size_t>(v)].end())
                throw invariant_error("forward_sample: missing distribution for leaf " + std::to_string(leaf));
            const std::vector<double>& dist = it->second;
            double u = rng.uniform01();
            double acc = 0.0;
            int value = domain.cardinality(v) - 1;
            for (int k = 0; k < domain.cardinality(v); ++k) {
                acc += dist[static_cast<std::size_t>(k)];
                if (u < acc) {
                    value = k;
                    break;
                }
            }
            assignment[static_cast<std::size_t>(v)] = value;
        }
        for (int i = 0; i < domain.size(); ++i) flat.push_back(static_cast<std::int32_t>(assignment[static_cast<std::size_t>(i)]));
    }
    return Dataset(Domain(domain), std::move(flat));
}

}  // namespace dgbn
