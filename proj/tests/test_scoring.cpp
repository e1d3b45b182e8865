#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"

using namespace dgbn;
using namespace testutil;

TEST_CASE("counts route through the merged graph", "[scoring]") {
    NetworkStructure s = xyz_structure(example_graph_z());
    // (x=0,y=1,z=1) and (x=1,y=0,z=0) both hit the merged leaf (id 4).
    Dataset data(Domain(s.domain()), {0, 1, 1, 1, 0, 0});
    auto counts = accumulate_counts(data, s, 2);
    // leaves ascending: 3, 4, 6
    CHECK(counts[0] == std::vector<std::int64_t>{0, 0});
    CHECK(counts[1] == std::vector<std::int64_t>{1, 1});
    CHECK(counts[2] == std::vector<std::int64_t>{0, 0});
}

TEST_CASE("counts on an empty dataset are zero", "[scoring]") {
    NetworkStructure s = xyz_structure(example_graph_z());
    Dataset data(Domain(s.domain()), {});
    for (const auto& row : accumulate_counts(data, s, 2))
        for (auto c : row) CHECK(c == 0);
}

TEST_CASE("single-leaf counts equal the marginal tally", "[scoring]") {
    Rng rng(99);
    Domain d = xyz_domain();
    Dataset data = random_dataset(rng, d, 1000);
    NetworkStructure s = xyz_structure(DecisionGraph(2));
    s.global.set_parents(2, {});
    auto counts = accumulate_counts(data, s, 2);
    std::int64_t ones = 0;
    for (std::size_t c = 0; c < data.num_cases(); ++c) ones += data.value(c, 2);
    REQUIRE(counts.size() == 1);
    CHECK(counts[0][1] == ones);
    CHECK(counts[0][0] == 1000 - ones);
}

TEST_CASE("uniform-network hyperparameters scale with preimage fractions", "[scoring]") {
    ScoreConfig config;
    config.parameter_prior = ParameterPrior::uniform_network;
    config.ess = 4.0;

    // One binary parent, complete tree: every alpha is 4 / (2 * 2) = 1.
    Domain d2({Variable{"p", 2, {}}, Variable{"t", 2, {}}});
    GlobalStructure g2((Domain(d2)));
    g2.set_parents(1, {0});
    NetworkStructure s2(std::move(g2), {DecisionGraph(0), build_complete_tree(1, d2, {0})});
    for (const auto& row : assign_alphas(config, s2, 1))
        for (double a : row) CHECK(a == Catch::Approx(1.0).margin(1e-12));

    // Two binary parents, merged middle leaf: 4 * 2/(2*4) = 1 on the merged
    // leaf, 0.5 on the singleton leaves.
    NetworkStructure s = xyz_structure(example_graph_z());
    auto alphas = assign_alphas(config, s, 2);
    CHECK(alphas[0][0] == Catch::Approx(0.5).margin(1e-12));
    CHECK(alphas[1][0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(alphas[1][1] == Catch::Approx(1.0).margin(1e-12));
    CHECK(alphas[2][1] == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("uniform prior sets every hyperparameter to one", "[scoring]") {
    ScoreConfig config;
    NetworkStructure s = xyz_structure(example_graph_z());
    for (const auto& row : assign_alphas(config, s, 2))
        for (double a : row) CHECK(a == 1.0);
}

TEST_CASE("prior-network zeros violate the positivity assumption", "[scoring]") {
    auto prior = std::make_shared<ParameterizedNetwork>(xyz_network());
    prior->leaf_distributions[0][0] = {1.0, 0.0};  // p(x=1) = 0
    ScoreConfig config;
    config.parameter_prior = ParameterPrior::prior_network;
    config.ess = 2.0;
    config.prior_network = prior;
    NetworkStructure s = xyz_structure(example_graph_z());
    CHECK_THROWS_AS(assign_alphas(config, s, 2), config_error);
}

TEST_CASE("prior-network hyperparameters sum the joint over preimages", "[scoring]") {
    auto prior = std::make_shared<ParameterizedNetwork>(xyz_network());
    ScoreConfig config;
    config.parameter_prior = ParameterPrior::prior_network;
    config.ess = 8.0;
    config.prior_network = prior;
    NetworkStructure s = xyz_structure(example_graph_z());
    auto alphas = assign_alphas(config, s, 2);
    // alpha(z = 1 | x0,y0) = ess * p(z=1, x=0, y=0) = 8 * 0.7 * 0.5 * 0.9
    CHECK(alphas[0][1] == Catch::Approx(8.0 * 0.7 * 0.5 * 0.9).epsilon(1e-12));
    // merged leaf: ess * (p(z=0,x0,y1) + p(z=0,x1,y0))
    CHECK(alphas[1][0] ==
          Catch::Approx(8.0 * (0.7 * 0.5 * 0.40 + 0.3 * 0.5 * 0.85)).epsilon(1e-12));
    // Hyperparameter mass totals the equivalent sample size.
    double total = 0.0;
    for (const auto& row : alphas)
        for (double a : row) total += a;
    CHECK(total == Catch::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("leaf marginal: counts (2,1) under the uniform prior", "[scoring]") {
    // Sequential product: 1/2 * 2/3 * 1/4 = 1/12.
    LeafStatistics stats;
    stats.leaf_ids = {0};
    stats.alpha = {{1.0, 1.0}};
    stats.count = {{2, 1}};
    CHECK(node_log_marginal(stats) == Catch::Approx(std::log(1.0 / 12.0)).epsilon(1e-12));
    CHECK(node_log_marginal(stats) == Catch::Approx(-2.4849066497880004).epsilon(1e-12));
}

TEST_CASE("zero counts score zero", "[scoring]") {
    LeafStatistics stats;
    stats.leaf_ids = {0, 1};
    stats.alpha = {{0.3, 1.7}, {2.0, 2.0}};
    stats.count = {{0, 0}, {0, 0}};
    CHECK(node_log_marginal(stats) == 0.0);
    stats.alpha[1][0] = 0.0;
    CHECK_THROWS_AS(node_log_marginal(stats), invariant_error);
}

TEST_CASE("complete tree scores exactly like the table scorer", "[scoring]") {
    Rng rng(4242);
    for (int trial = 0; trial < 10; ++trial) {
        Domain d = random_domain(rng, 3, 5, 4);
        int owner = rng.below_int(d.size());
        std::vector<int> parents;
        for (int i = 0; i < d.size(); ++i)
            if (i != owner && parents.size() < 3) parents.push_back(i);
        Dataset data = random_dataset(rng, d, 60);

        GlobalStructure g((Domain(d)));
        g.set_parents(owner, parents);
        std::vector<DecisionGraph> graphs;
        for (int i = 0; i < d.size(); ++i)
            graphs.push_back(i == owner ? build_complete_tree(owner, d, parents) : DecisionGraph(i));
        NetworkStructure s(std::move(g), std::move(graphs));

        for (auto prior : {ParameterPrior::uniform, ParameterPrior::uniform_network}) {
            ScoreConfig config;
            config.parameter_prior = prior;
            config.ess = 3.0;
            double tree = node_log_marginal(compute_leaf_statistics(data, s, config, owner));
            double table = table_node_log_marginal(data, parents, owner, config);
            CHECK(std::abs(tree - table) < 1e-12);
        }
    }
}

TEST_CASE("empty data scores zero for every structure", "[scoring]") {
    ScoreConfig config;
    Dataset data(xyz_domain(), {});
    CHECK(log_score(xyz_structure(example_graph_z()), data, config) == 0.0);
    CHECK(log_score(xyz_structure(DecisionGraph(2)), data, config) == 0.0);
    CHECK(log_score(NetworkStructure(xyz_domain()), data, config) == 0.0);
}

TEST_CASE("a real dependence beats independence", "[scoring]") {
    // Two identical binary columns, 20 cases.
    Domain d({Variable{"a", 2, {}}, Variable{"b", 2, {}}});
    std::vector<std::int32_t> flat;
    Rng rng(5);
    for (int c = 0; c < 20; ++c) {
        std::int32_t v = static_cast<std::int32_t>(rng.below(2));
        flat.push_back(v);
        flat.push_back(v);
    }
    Dataset data(Domain(d), std::move(flat));

    NetworkStructure independent{Domain(d)};
    GlobalStructure g((Domain(d)));
    g.set_parents(1, {0});
    NetworkStructure chain(std::move(g), {DecisionGraph(0), build_complete_tree(1, d, {0})});

    ScoreConfig config;
    double s_ind = log_score(independent, data, config);
    double s_chain = log_score(chain, data, config);
    CHECK(s_chain > s_ind);
    CHECK(s_ind == Catch::Approx(prequential_log_marginal(data, independent, config)).margin(1e-9));
    CHECK(s_chain == Catch::Approx(prequential_log_marginal(data, chain, config)).margin(1e-9));
}

TEST_CASE("kappa = 1 equals the uniform structure prior", "[scoring]") {
    Rng rng(17);
    Domain d = random_domain(rng, 3, 4, 3);
    NetworkStructure s = random_structure(rng, d, 2);
    Dataset data = random_dataset(rng, d, 30);
    ScoreConfig uniform;
    ScoreConfig kappa1;
    kappa1.structure_prior = StructurePrior::kappa;
    kappa1.kappa = 1.0;
    CHECK(log_score(s, data, uniform) == log_score(s, data, kappa1));
}

TEST_CASE("kappa prior counts leaves times (r - 1)", "[scoring]") {
    NetworkStructure s = xyz_structure(example_graph_z());  // 1 + 1 + 3 leaves, all binary
    ScoreConfig config;
    config.structure_prior = StructurePrior::kappa;
    config.kappa = 0.5;
    CHECK(parameter_count(s) == 5);
    Dataset data(Domain(s.domain()), {});
    CHECK(log_score(s, data, config) == Catch::Approx(5.0 * std::log(0.5)).epsilon(1e-12));
}

TEST_CASE("prequential oracle matches the closed form", "[scoring]") {
    Rng rng(314159);
    for (int trial = 0; trial < 25; ++trial) {
        Domain d = random_domain(rng, 2, 5, 4);
        NetworkStructure s = random_structure(rng, d, 3);
        Dataset data = random_dataset(rng, d, 1 + rng.below_int(50));

        std::vector<ScoreConfig> configs(2);
        configs[0].parameter_prior = ParameterPrior::uniform;
        configs[1].parameter_prior = ParameterPrior::uniform_network;
        configs[1].ess = 1.0 + rng.below_int(10);
        for (const auto& config : configs) {
            double closed = log_score(s, data, config);
            double oracle = prequential_log_marginal(data, s, config);
            CHECK(std::abs(closed - oracle) < 1e-9);
        }
    }
}

TEST_CASE("prequential oracle covers the prior-network route", "[scoring]") {
    auto prior = std::make_shared<ParameterizedNetwork>(xyz_network());
    ScoreConfig config;
    config.parameter_prior = ParameterPrior::prior_network;
    config.ess = 5.0;
    config.prior_network = prior;
    Rng rng(271828);
    Dataset data = forward_sample(xyz_network(), 40, 11);
    for (int trial = 0; trial < 5; ++trial) {
        NetworkStructure s = random_structure(rng, data.domain(), 2);
        CHECK(std::abs(log_score(s, data, config) - prequential_log_marginal(data, s, config)) < 1e-9);
    }
}

TEST_CASE("count conservation", "[scoring]") {
    Rng rng(23);
    Domain d = random_domain(rng, 3, 5, 4);
    NetworkStructure s = random_structure(rng, d, 3);
    Dataset data = random_dataset(rng, d, 200);
    for (int a = 0; a < d.size(); ++a) {
        std::int64_t total = 0;
        for (const auto& row : accumulate_counts(data, s, a))
            for (auto c : row) total += c;
        CHECK(total == 200);
    }
}

TEST_CASE("scores are invariant under row permutations", "[scoring]") {
    Rng rng(29);
    Domain d = random_domain(rng, 3, 4, 3);
    NetworkStructure s = random_structure(rng, d, 2);
    Dataset data = random_dataset(rng, d, 50);

    std::vector<std::size_t> perm(data.num_cases());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    rng.shuffle(perm);
    std::vector<std::int32_t> flat;
    for (std::size_t i : perm)
        for (int v = 0; v < d.size(); ++v) flat.push_back(data.value(i, v));
    Dataset shuffled(Domain(d), std::move(flat));

    ScoreConfig config;
    CHECK(log_score(s, data, config) == log_score(s, shuffled, config));
}

TEST_CASE("single-node deltas equal full rescoring", "[scoring]") {
    Rng rng(31);
    for (int trial = 0; trial < 15; ++trial) {
        Domain d = random_domain(rng, 3, 5, 4);
        NetworkStructure s = random_structure(rng, d, 3);
        Dataset data = random_dataset(rng, d, 80);
        ScoreConfig config;
        if (trial % 3 == 1) {
            config.parameter_prior = ParameterPrior::uniform_network;
            config.ess = 4.0;
        }
        if (trial % 3 == 2) {
            config.structure_prior = StructurePrior::kappa;
            config.kappa = 0.25;
        }
        NodeScores cache = score_nodes(s, data, config);

        int a = rng.below_int(d.size());
        // Replacing a graph with itself changes nothing.
        CHECK(node_score_delta(cache, s, data, config, a, s.graphs[a]) == Catch::Approx(0.0).margin(1e-12));

        DecisionGraph replacement =
            merge_complete_tree(a, d, s.global.parents(a), random_partition(rng, s.global.parent_space(a).size()));
        double delta = node_score_delta(cache, s, data, config, a, replacement);
        NetworkStructure changed = s;
        changed.graphs[static_cast<std::size_t>(a)] = replacement;
        double full = log_score(changed, data, config) - log_score(s, data, config);
        CHECK(std::abs(delta - full) < 1e-9);
    }
}

TEST_CASE("merging everything scores like the single-node graph", "[scoring]") {
    Rng rng(37);
    Domain d = xyz_domain();
    NetworkStructure s = xyz_structure(example_graph_z());
    Dataset data = random_dataset(rng, d, 100);
    ScoreConfig config;
    NodeScores cache = score_nodes(s, data, config);
    double delta = node_score_delta(cache, s, data, config, 2, merge_complete_tree(2, d, {0, 1}, {{0, 1, 2, 3}}));
    NetworkStructure single = xyz_structure(DecisionGraph(2));
    double expect = log_score(single, data, config) - log_score(s, data, config);
    CHECK(delta == Catch::Approx(expect).margin(1e-9));
}

TEST_CASE("node evaluator tracks statistics and deltas exactly", "[scoring]") {
    Rng rng(43);
    for (int trial = 0; trial < 12; ++trial) {
        Domain d = random_domain(rng, 3, 5, 4);
        NetworkStructure s = random_structure(rng, d, 3);
        Dataset data = random_dataset(rng, d, 120);
        ScoreConfig config;
        if (trial % 2) {
            config.parameter_prior = ParameterPrior::uniform_network;
            config.ess = 2.5;
        }
        int a = rng.below_int(d.size());
        LogGammaIntTable table;
        NodeEvaluator eval(data, config, a, s.global.parents(a), s.graphs[static_cast<std::size_t>(a)], &table);
        NodeScores cache = score_nodes(s, data, config);
        CHECK(std::abs(eval.node_term() - cache.node_terms[static_cast<std::size_t>(a)]) < 1e-9);

        // Every applicable operator: incremental delta == full rescore delta,
        // and applying keeps the evaluator consistent with a fresh rescore.
        auto ops = enumerate_operators(s.global.parents(a), eval.graph(), OperatorSet::parse("CBM"),
                                       eval.reachable());
        for (const auto& op : ops) {
            double incr = eval.delta(op);
            auto next = apply_operator(d, eval.graph(), op);
            REQUIRE(next.has_value());
            double full = node_score_delta(cache, s, data, config, a, *next);
            CHECK(std::abs(incr - full) < 1e-9);
        }
        if (!ops.empty()) {
            const Operator& op = ops[rng.below(ops.size())];
            double predicted = eval.delta(op);
            double before = eval.node_term();
            eval.apply(op);
            NetworkStructure changed = s;
            changed.graphs[static_cast<std::size_t>(a)] = eval.graph();
            double fresh = node_log_marginal(compute_leaf_statistics(data, changed, config, a));
            CHECK(std::abs(eval.node_term() - fresh) < 1e-9);
            CHECK(std::abs((eval.node_term() - before) - predicted) < 1e-9);
        }
    }
}
