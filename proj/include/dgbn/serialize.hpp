#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dgbn/decision_graph.hpp"
#include "dgbn/domain.hpp"
#include "dgbn/errors.hpp"
#include "dgbn/structure.hpp"

namespace dgbn {

using json = nlohmann::json;

// Structure document:
//   { "format": "dgbn-structure", "version": 1,
//     "domain": { "variables": [ {"name", "cardinality", "labels"?}, ... ] },
//     "parents": [ [..], ... ],
//     "graphs": [ { "owner", "root", "nodes": [ {"id", "kind", "var"?,
//                   "edges"? : [ {"values", "child"} ],
//                   "distribution"? } ] } ] }
// A network document is the same with "format": "dgbn-network" and a
// distribution on every leaf. Extra top-level keys (e.g. embedded run
// configuration) are preserved by readers that ignore unknown fields.

inline json domain_to_json(const Domain& domain) {
    json vars = json::array();
    for (const auto& v : domain.variables()) {
        json jv{{"name", v.name}, {"cardinality", v.cardinality}};
        if (!v.labels.empty()) jv["labels"] = v.labels;
        vars.push_back(std::move(jv));
    }
    return json{{"variables", std::move(vars)}};
}

inline Domain domain_from_json(const json& j) {
    std::vector<Variable> vars;
    for (const auto& jv : j.at("variables")) {
        Variable v;
        v.name = jv.at("name").get<std::string>();
        v.cardinality = jv.at("cardinality").get<int>();
        if (jv.contains("labels")) v.labels = jv.at("labels").get<std::vector<std::string>>();
        vars.push_back(std::move(v));
    }
    return Domain(std::move(vars));
}

inline json graph_to_json(const DecisionGraph& graph) {
    json nodes = json::array();
    for (int id : graph.live_ids()) {
        const GraphNode& n = graph.node(id);
        json jn{{"id", id}};
        if (n.kind == GraphNode::Kind::leaf) {
            jn["kind"] = "leaf";
        } else {
            jn["kind"] = "split";
            jn["var"] = n.split_var;
            json edges = json::array();
            for (const auto& e : n.edges) edges.push_back(json{{"values", e.values}, {"child", e.child}});
            jn["edges"] = std::move(edges);
        }
        nodes.push_back(std::move(jn));
    }
    return json{{"owner", graph.owner()}, {"root", graph.root()}, {"nodes", std::move(nodes)}};
}

inline DecisionGraph graph_from_json(const json& j) {
    int owner = j.at("owner").get<int>();
    int root = j.at("root").get<int>();
    int max_id = root;
    for (const auto& jn : j.at("nodes")) max_id = std::max(max_id, jn.at("id").get<int>());
    std::vector<GraphNode> nodes(static_cast<std::size_t>(max_id) + 1,
                                 GraphNode{GraphNode::Kind::dead, -1, {}});
    for (const auto& jn : j.at("nodes")) {
        int id = jn.at("id").get<int>();
        GraphNode& n = nodes[static_cast<std::size_t>(id)];
        if (n.kind != GraphNode::Kind::dead) throw data_error("graph: duplicate node id " + std::to_string(id));
        std::string kind = jn.at("kind").get<std::string>();
        if (kind == "leaf") {
            n.kind = GraphNode::Kind::leaf;
        } else if (kind == "split") {
            n.kind = GraphNode::Kind::split;
            n.split_var = jn.at("var").get<int>();
            for (const auto& je : jn.at("edges"))
                n.edges.push_back(GraphEdge{je.at("values").get<ValueSet>(), je.at("child").get<int>()});
        } else {
            throw data_error("graph: unknown node kind '" + kind + "'");
        }
    }
    return DecisionGraph(owner, root, std::move(nodes));
}

inline json structure_to_json(const NetworkStructure& s) {
    json graphs = json::array();
    for (const auto& g : s.graphs) graphs.push_back(graph_to_json(g));
    return json{{"format", "dgbn-structure"},
                {"version", 1},
                {"domain", domain_to_json(s.domain())},
                {"parents", s.global.parent_sets()},
                {"graphs", std::move(graphs)}};
}

inline NetworkStructure structure_from_json(const json& j) {
    Domain domain = domain_from_json(j.at("domain"));
    auto parent_sets = j.at("parents").get<std::vector<std::vector<int>>>();
    GlobalStructure global(std::move(domain), std::move(parent_sets));
    std::vector<DecisionGraph> graphs;
    for (const auto& jg : j.at("graphs")) graphs.push_back(graph_from_json(jg));
    NetworkStructure s(std::move(global), std::move(graphs));
    auto violations = validate(s);
    if (!violations.empty()) throw data_error("structure document invalid: " + violations.front());
    return s;
}

inline json network_to_json(const ParameterizedNetwork& net) {
    json doc = structure_to_json(net.structure);
    doc["format"] = "dgbn-network";
    for (std::size_t i = 0; i < doc.at("graphs").size(); ++i) {
        const auto& dists = net.leaf_distributions[i];
        for (auto& jn : doc["graphs"][i]["nodes"]) {
            if (jn.at("kind") != "leaf") continue;
            auto it = dists.find(jn.at("id").get<int>());
            if (it == dists.end())
                throw invariant_error("network: missing distribution for leaf " + jn.at("id").dump());
            jn["distribution"] = it->second;
        }
    }
    return doc;
}

inline ParameterizedNetwork network_from_json(const json& j) {
    ParameterizedNetwork net;
    net.structure = structure_from_json(j);
    net.leaf_distributions.resize(j.at("graphs").size());
    for (std::size_t i = 0; i < j.at("graphs").size(); ++i)
        for (const auto& jn : j.at("graphs").at(i).at("nodes")) {
            if (jn.at("kind") != "leaf") continue;
            if (!jn.contains("distribution"))
                throw data_error("network document: leaf " + jn.at("id").dump() + " lacks a distribution");
            net.leaf_distributions[i].emplace(jn.at("id").get<int>(),
                                              jn.at("distribution").get<std::vector<double>>());
        }
    auto violations = validate(net);
    if (!violations.empty()) throw data_error("network document invalid: " + violations.front());
    return net;
}

// ---------------------------------------------------------------------------
// File helpers

inline void save_json(const json& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write '" + path + "'");
    out << doc.dump(2) << '\n';
}

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw data_error("cannot parse '" + path + "': " + e.what());
    }
}

inline NetworkStructure load_structure(const std::string& path) {
    json doc = load_json(path);
    try {
        return structure_from_json(doc);
    } catch (const json::exception& e) {
        throw data_error("structure document '" + path + "': " + e.what());
    }
}

inline ParameterizedNetwork load_network(const std::string& path) {
    json doc = load_json(path);
    try {
        return network_from_json(doc);
    } catch (const json::exception& e) {
        throw data_error("network document '" + path + "': " + e.what());
    }
}

}  // namespace dgbn
