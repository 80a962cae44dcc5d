#pragma once

#include "mpgm/core/graph.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpgm::gipa {

enum class Direction { Feedforward, Feedback, Unannotated };

/// Hypothetical component diagram: named components (each housing opaque
/// variable symbols) and directed interfaces between them.
struct HcdComponent {
    std::string name;
    std::string region;
    std::vector<std::string> variables;
    bool observed = false;  // component's variable is an observation channel
};

struct HcdInterface {
    std::string src;
    std::string dst;
    Direction direction = Direction::Unannotated;
    bool delta_t = false;
};

struct HcdGraph {
    std::vector<HcdComponent> components;
    std::vector<HcdInterface> interfaces;

    HcdGraph() = default;
    HcdGraph(std::vector<HcdComponent> comps, std::vector<HcdInterface> ifaces);
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};
struct AllocationError : std::runtime_error {
    explicit AllocationError(const std::string& what) : std::runtime_error(what) {}
};

/// Parse the HCD JSON document. Errors carry the offending field or index.
HcdGraph parse_hcd(const std::string& text);
std::string hcd_to_json(const HcdGraph& graph);

/// GIPA output: every interface assigned to exactly one process.
struct Allocation {
    std::map<std::size_t, EdgeKind> edge_assignment;  // interface index -> kind
    std::vector<std::size_t> delta_t_interfaces;
};

/// Generation-inference process allocation: feedforward interfaces become
/// inference edges, feedback interfaces generative edges, delta_t-flagged
/// feedback interfaces next-time generative edges. Each interface maps to an
/// edge between the representative (first) variables of its endpoint
/// components. Throws AllocationError on unannotated interfaces or on a
/// generative cycle not broken by a next-time edge.
std::pair<GraphicalModel, Allocation> allocate(const HcdGraph& graph);

struct AmortizedReport {
    /// latent nodes with no generative path to any observed node
    std::vector<std::string> unreachable_latents;
    /// observed nodes with no inference edge leaving them
    std::vector<std::string> dead_evidence;

    bool clean() const { return unreachable_latents.empty() && dead_evidence.empty(); }
};

AmortizedReport validate_amortized(const GraphicalModel& model);

}  // namespace mpgm::gipa
