#include "mpgm/core/graph.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mpgm {

GraphicalModel::GraphicalModel(std::vector<NodeDesc> nodes, std::vector<EdgeDesc> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!index_.emplace(nodes_[i].name, i).second)
            throw std::invalid_argument("GraphicalModel: duplicate node name '" + nodes_[i].name + "'");
    }
    for (const auto& e : edges_) {
        if (!has_node(e.src)) throw std::invalid_argument("GraphicalModel: unknown edge source '" + e.src + "'");
        if (!has_node(e.dst)) throw std::invalid_argument("GraphicalModel: unknown edge target '" + e.dst + "'");
    }
}

std::size_t GraphicalModel::node_index(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::invalid_argument("GraphicalModel: unknown node '" + name + "'");
    return it->second;
}

namespace {

using Adjacency = std::vector<std::vector<std::size_t>>;

Adjacency generative_adjacency(const GraphicalModel& m, bool include_next_time) {
    Adjacency adj(m.nodes().size());
    for (const auto& e : m.edges()) {
        if (e.kind == EdgeKind::Generative ||
            (include_next_time && e.kind == EdgeKind::NextTimeGenerative))
            adj[m.node_index(e.src)].push_back(m.node_index(e.dst));
    }
    return adj;
}

// Elementary cycle enumeration (Johnson-style DFS from each root, capped).
void find_cycles_from(std::size_t root, const Adjacency& adj, std::vector<std::size_t>& path,
                      std::vector<bool>& on_path, std::vector<std::vector<std::size_t>>& out,
                      std::size_t cap) {
    if (out.size() >= cap) return;
    const std::size_t v = path.back();
    for (std::size_t w : adj[v]) {
        if (w < root) continue;  // canonical form: smallest index first
        if (w == root) {
            out.push_back(path);
        } else if (!on_path[w]) {
            on_path[w] = true;
            path.push_back(w);
            find_cycles_from(root, adj, path, on_path, out, cap);
            path.pop_back();
            on_path[w] = false;
        }
        if (out.size() >= cap) return;
    }
}

}  // namespace

CycleReport validate_acyclic(const GraphicalModel& model) {
    constexpr std::size_t kCycleCap = 64;
    const auto adj = generative_adjacency(model, /*include_next_time=*/false);
    std::vector<std::vector<std::size_t>> raw;
    for (std::size_t root = 0; root < adj.size() && raw.size() < kCycleCap; ++root) {
        std::vector<std::size_t> path{root};
        std::vector<bool> on_path(adj.size(), false);
        on_path[root] = true;
        find_cycles_from(root, adj, path, on_path, raw, kCycleCap);
    }
    CycleReport report;
    report.ok = raw.empty();
    for (const auto& cyc : raw) {
        std::vector<std::string> names;
        names.reserve(cyc.size() + 1);
        for (std::size_t i : cyc) names.push_back(model.nodes()[i].name);
        names.push_back(model.nodes()[cyc.front()].name);
        report.cycles.push_back(std::move(names));
    }
    return report;
}

namespace {

std::set<std::size_t> reachable(const Adjacency& adj, const std::set<std::size_t>& seeds) {
    std::set<std::size_t> seen = seeds;
    std::vector<std::size_t> stack(seeds.begin(), seeds.end());
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        for (std::size_t w : adj[v])
            if (seen.insert(w).second) stack.push_back(w);
    }
    return seen;
}

Adjacency transpose(const Adjacency& adj) {
    Adjacency rev(adj.size());
    for (std::size_t v = 0; v < adj.size(); ++v)
        for (std::size_t w : adj[v]) rev[w].push_back(v);
    return rev;
}

std::string step_name(const std::string& base, int t) {
    return base + "[" + std::to_string(t) + "]";
}

}  // namespace

GraphicalModel unroll(const GraphicalModel& model, int horizon) {
    if (horizon < 1) throw std::invalid_argument("unroll: horizon must be >= 1");
    const auto report = validate_acyclic(model);
    if (!report.ok) throw std::invalid_argument("unroll: model has a generative cycle with no next-time edge");

    // Time-indexed nodes: generative ancestors of next-time tails plus
    // generative descendants of next-time heads (endpoints included).
    const auto fwd = generative_adjacency(model, /*include_next_time=*/false);
    const auto rev = transpose(fwd);
    std::set<std::size_t> tails, heads;
    for (const auto& e : model.edges()) {
        if (e.kind == EdgeKind::NextTimeGenerative) {
            tails.insert(model.node_index(e.src));
            heads.insert(model.node_index(e.dst));
        }
    }
    std::set<std::size_t> temporal;
    for (std::size_t v : reachable(rev, tails)) temporal.insert(v);
    for (std::size_t v : reachable(fwd, heads)) temporal.insert(v);

    std::vector<NodeDesc> nodes;
    std::vector<EdgeDesc> edges;
    auto copy_name = [&](std::size_t idx, int t) {
        return temporal.count(idx) ? step_name(model.nodes()[idx].name, t) : model.nodes()[idx].name;
    };
    for (std::size_t i = 0; i < model.nodes().size(); ++i) {
        if (temporal.count(i)) {
            for (int t = 1; t <= horizon; ++t) {
                NodeDesc copy = model.nodes()[i];
                copy.name = step_name(model.nodes()[i].name, t);
                nodes.push_back(std::move(copy));
            }
        } else {
            nodes.push_back(model.nodes()[i]);
        }
    }
    for (const auto& e : model.edges()) {
        const std::size_t si = model.node_index(e.src);
        const std::size_t di = model.node_index(e.dst);
        if (e.kind == EdgeKind::NextTimeGenerative) {
            for (int t = 1; t < horizon; ++t)
                edges.push_back({copy_name(si, t), copy_name(di, t + 1), EdgeKind::Generative});
        } else if (temporal.count(si) || temporal.count(di)) {
            for (int t = 1; t <= horizon; ++t)
                edges.push_back({copy_name(si, t), copy_name(di, t), e.kind});
        } else {
            edges.push_back(e);
        }
    }
    // A static edge whose endpoints are both static is emitted once; dedupe
    // static->static duplicates that cannot arise but keep output canonical.
    return GraphicalModel(std::move(nodes), std::move(edges));
}

namespace {

std::string kind_to_string(NodeKind k) {
    switch (k) {
        case NodeKind::Latent: return "latent";
        case NodeKind::Observed: return "observed";
        case NodeKind::Parameter: return "parameter";
    }
    throw std::logic_error("unreachable");
}

NodeKind kind_from_string(const std::string& s) {
    if (s == "latent") return NodeKind::Latent;
    if (s == "observed") return NodeKind::Observed;
    if (s == "parameter") return NodeKind::Parameter;
    throw std::invalid_argument("unknown node kind '" + s + "'");
}

std::string edge_kind_to_string(EdgeKind k) {
    switch (k) {
        case EdgeKind::Generative: return "generative";
        case EdgeKind::Inference: return "inference";
        case EdgeKind::NextTimeGenerative: return "next_time";
    }
    throw std::logic_error("unreachable");
}

EdgeKind edge_kind_from_string(const std::string& s) {
    if (s == "generative") return EdgeKind::Generative;
    if (s == "inference") return EdgeKind::Inference;
    if (s == "next_time") return EdgeKind::NextTimeGenerative;
    throw std::invalid_argument("unknown edge kind '" + s + "'");
}

std::string support_to_string(const Support& s) {
    const char* tag = s.type == Support::Type::Categorical ? "categorical" : "real";
    return std::string(tag) + "(" + std::to_string(s.dim) + ")";
}

Support support_from_string(const std::string& s) {
    const auto open = s.find('(');
    const auto close = s.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw std::invalid_argument("malformed support '" + s + "'");
    const std::string tag = s.substr(0, open);
    const int dim = std::stoi(s.substr(open + 1, close - open - 1));
    if (dim < 1) throw std::invalid_argument("support dimension must be >= 1");
    if (tag == "categorical") return Support::categorical(dim);
    if (tag == "real") return Support::real(dim);
    throw std::invalid_argument("unknown support type '" + tag + "'");
}

}  // namespace

std::string to_json(const GraphicalModel& model) {
    nlohmann::json j;
    j["nodes"] = nlohmann::json::array();
    for (const auto& n : model.nodes())
        j["nodes"].push_back({{"name", n.name},
                              {"kind", kind_to_string(n.kind)},
                              {"support", support_to_string(n.support)}});
    j["edges"] = nlohmann::json::array();
    for (const auto& e : model.edges())
        j["edges"].push_back({{"src", e.src}, {"dst", e.dst}, {"kind", edge_kind_to_string(e.kind)}});
    return j.dump(2);
}

GraphicalModel model_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    std::vector<NodeDesc> nodes;
    std::vector<EdgeDesc> edges;
    for (const auto& n : j.at("nodes"))
        nodes.push_back({n.at("name").get<std::string>(),
                         kind_from_string(n.at("kind").get<std::string>()),
                         support_from_string(n.at("support").get<std::string>())});
    for (const auto& e : j.at("edges"))
        edges.push_back({e.at("src").get<std::string>(), e.at("dst").get<std::string>(),
                         edge_kind_from_string(e.at("kind").get<std::string>())});
    return GraphicalModel(std::move(nodes), std::move(edges));
}

std::string to_dot(const GraphicalModel& model) {
    std::ostringstream out;
    out << "digraph pgm {\n  rankdir=LR;\n";
    for (const auto& n : model.nodes()) {
        const char* shape = n.kind == NodeKind::Observed  ? "doublecircle"
                            : n.kind == NodeKind::Latent  ? "ellipse"
                                                          : "box";
        out << "  \"" << n.name << "\" [shape=" << shape << "];\n";
    }
    for (const auto& e : model.edges()) {
        out << "  \"" << e.src << "\" -> \"" << e.dst << "\"";
        if (e.kind == EdgeKind::Inference)
            out << " [style=dashed]";
        else if (e.kind == EdgeKind::NextTimeGenerative)
            out << " [label=\"Δt\"]";
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace mpgm
