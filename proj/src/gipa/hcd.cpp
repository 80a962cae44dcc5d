#include "mpgm/gipa/hcd.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>
#include <sstream>

namespace mpgm::gipa {

HcdGraph::HcdGraph(std::vector<HcdComponent> comps, std::vector<HcdInterface> ifaces)
    : components(std::move(comps)), interfaces(std::move(ifaces)) {
    std::set<std::string> names;
    for (const auto& c : components)
        if (!names.insert(c.name).second)
            throw ParseError("duplicate component name '" + c.name + "'");
    std::set<std::pair<std::string, std::string>> pairs;
    for (std::size_t i = 0; i < interfaces.size(); ++i) {
        const auto& f = interfaces[i];
        if (!names.count(f.src))
            throw ParseError("interface " + std::to_string(i) + ": unknown src component '" + f.src + "'");
        if (!names.count(f.dst))
            throw ParseError("interface " + std::to_string(i) + ": unknown dst component '" + f.dst + "'");
        if (!pairs.insert({f.src, f.dst}).second)
            throw ParseError("interface " + std::to_string(i) + ": duplicate interface " + f.src +
                             " -> " + f.dst);
    }
}

namespace {

Direction direction_from_string(const std::string& s, std::size_t index) {
    if (s == "feedforward") return Direction::Feedforward;
    if (s == "feedback") return Direction::Feedback;
    if (s == "unannotated") return Direction::Unannotated;
    throw ParseError("interface " + std::to_string(index) + ": malformed direction '" + s + "'");
}

std::string direction_to_string(Direction d) {
    switch (d) {
        case Direction::Feedforward: return "feedforward";
        case Direction::Feedback: return "feedback";
        case Direction::Unannotated: return "unannotated";
    }
    throw std::logic_error("unreachable");
}

}  // namespace

HcdGraph parse_hcd(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    std::vector<HcdComponent> comps;
    std::vector<HcdInterface> ifaces;
    try {
        for (const auto& c : j.at("components")) {
            HcdComponent comp;
            comp.name = c.at("name").get<std::string>();
            comp.region = c.value("region", std::string{});
            if (c.contains("variables"))
                comp.variables = c.at("variables").get<std::vector<std::string>>();
            comp.observed = c.value("observed", false);
            comps.push_back(std::move(comp));
        }
        std::size_t idx = 0;
        for (const auto& f : j.at("interfaces")) {
            HcdInterface iface;
            iface.src = f.at("src").get<std::string>();
            iface.dst = f.at("dst").get<std::string>();
            iface.direction = f.contains("direction")
                                  ? direction_from_string(f.at("direction").get<std::string>(), idx)
                                  : Direction::Unannotated;
            iface.delta_t = f.value("delta_t", false);
            ifaces.push_back(std::move(iface));
            ++idx;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed HCD document: ") + e.what());
    }
    return HcdGraph(std::move(comps), std::move(ifaces));
}

std::string hcd_to_json(const HcdGraph& graph) {
    nlohmann::json j;
    j["components"] = nlohmann::json::array();
    for (const auto& c : graph.components) {
        nlohmann::json jc{{"name", c.name}, {"region", c.region}, {"variables", c.variables}};
        if (c.observed) jc["observed"] = true;
        j["components"].push_back(std::move(jc));
    }
    j["interfaces"] = nlohmann::json::array();
    for (const auto& f : graph.interfaces)
        j["interfaces"].push_back({{"src", f.src},
                                   {"dst", f.dst},
                                   {"direction", direction_to_string(f.direction)},
                                   {"delta_t", f.delta_t}});
    return j.dump(2);
}

std::pair<GraphicalModel, Allocation> allocate(const HcdGraph& graph) {
    // representative variable of each component
    std::map<std::string, std::string> rep;
    std::map<std::string, const HcdComponent*> comp_by_name;
    for (const auto& c : graph.components) {
        rep[c.name] = c.variables.empty() ? c.name : c.variables.front();
        comp_by_name[c.name] = &c;
    }

    std::vector<NodeDesc> nodes;
    std::set<std::string> node_names;
    for (const auto& c : graph.components) {
        const std::string& var = rep.at(c.name);
        if (node_names.insert(var).second)
            nodes.push_back({var, c.observed ? NodeKind::Observed : NodeKind::Latent,
                             Support::categorical(1)});
    }

    Allocation alloc;
    std::vector<EdgeDesc> edges;
    for (std::size_t i = 0; i < graph.interfaces.size(); ++i) {
        const auto& f = graph.interfaces[i];
        if (f.direction == Direction::Unannotated)
            throw AllocationError("interface " + f.src + " -> " + f.dst +
                                  " has no direction annotation; GIPA cannot guess");
        EdgeKind kind = f.direction == Direction::Feedforward ? EdgeKind::Inference
                                                              : EdgeKind::Generative;
        if (f.delta_t) {
            if (kind != EdgeKind::Generative)
                throw AllocationError("interface " + f.src + " -> " + f.dst +
                                      ": delta_t applies to feedback (generative) interfaces only");
            kind = EdgeKind::NextTimeGenerative;
            alloc.delta_t_interfaces.push_back(i);
        }
        alloc.edge_assignment[i] = kind;
        edges.push_back({rep.at(f.src), rep.at(f.dst), kind});
    }

    GraphicalModel model(std::move(nodes), std::move(edges));
    const auto report = validate_acyclic(model);
    if (!report.ok) {
        std::ostringstream msg;
        msg << "generative cycle with no delta_t edge:";
        for (const auto& cyc : report.cycles) {
            msg << " [";
            for (std::size_t k = 0; k < cyc.size(); ++k) msg << (k ? " -> " : "") << cyc[k];
            msg << "]";
        }
        throw AllocationError(msg.str());
    }
    return {std::move(model), std::move(alloc)};
}

AmortizedReport validate_amortized(const GraphicalModel& model) {
    AmortizedReport report;
    const std::size_t n = model.nodes().size();
    // generative adjacency (next-time edges count: they are generative)
    std::vector<std::vector<std::size_t>> adj(n);
    std::vector<bool> has_inference_out(n, false);
    for (const auto& e : model.edges()) {
        if (e.kind == EdgeKind::Inference)
            has_inference_out[model.node_index(e.src)] = true;
        else
            adj[model.node_index(e.src)].push_back(model.node_index(e.dst));
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto& node = model.nodes()[i];
        if (node.kind == NodeKind::Latent) {
            // DFS for a generative path to any observed node
            std::vector<bool> seen(n, false);
            std::vector<std::size_t> stack{i};
            seen[i] = true;
            bool found = false;
            while (!stack.empty() && !found) {
                const std::size_t v = stack.back();
                stack.pop_back();
                for (std::size_t w : adj[v]) {
                    if (model.nodes()[w].kind == NodeKind::Observed) {
                        found = true;
                        break;
                    }
                    if (!seen[w]) {
                        seen[w] = true;
                        stack.push_back(w);
                    }
                }
            }
            if (!found) report.unreachable_latents.push_back(node.name);
        } else if (node.kind == NodeKind::Observed) {
            if (!has_inference_out[i]) report.dead_evidence.push_back(node.name);
        }
    }
    return report;
}

}  // namespace mpgm::gipa
