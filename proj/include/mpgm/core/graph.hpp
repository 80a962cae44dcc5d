#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

namespace mpgm {

enum class NodeKind { Latent, Observed, Parameter };
enum class EdgeKind { Generative, Inference, NextTimeGenerative };

/// Variable support: categorical over K values or a D-dimensional real vector.
struct Support {
    enum class Type { Categorical, Real };
    Type type = Type::Categorical;
    int dim = 1;  // K for categorical, D for real

    bool operator==(const Support&) const = default;

    static Support categorical(int k) { return {Type::Categorical, k}; }
    static Support real(int d) { return {Type::Real, d}; }
};

struct NodeDesc {
    std::string name;
    NodeKind kind = NodeKind::Latent;
    Support support;
};

struct EdgeDesc {
    std::string src;
    std::string dst;
    EdgeKind kind = EdgeKind::Generative;

    bool operator==(const EdgeDesc&) const = default;
};

/// Directed graphical model structure: variable descriptors plus typed edges.
/// Node names are unique and every edge endpoint must exist; both are checked
/// at construction. Acyclicity of the generative subgraph is a separate,
/// report-producing check (validate_acyclic) because next-time edges
/// legitimately close loops in the time-collapsed view.
class GraphicalModel {
public:
    GraphicalModel(std::vector<NodeDesc> nodes, std::vector<EdgeDesc> edges);

    const std::vector<NodeDesc>& nodes() const { return nodes_; }
    const std::vector<EdgeDesc>& edges() const { return edges_; }

    bool has_node(const std::string& name) const { return index_.count(name) > 0; }
    std::size_t node_index(const std::string& name) const;
    const NodeDesc& node(const std::string& name) const { return nodes_[node_index(name)]; }

private:
    std::vector<NodeDesc> nodes_;
    std::vector<EdgeDesc> edges_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct CycleReport {
    bool ok = true;
    /// Elementary cycles made of Generative edges only, as node-name loops
    /// (first node repeated at the end). Enumeration caps at 64 cycles.
    std::vector<std::vector<std::string>> cycles;
};

/// Report every cycle composed purely of Generative edges. Cycles broken by
/// at least one NextTimeGenerative edge are accepted.
CycleReport validate_acyclic(const GraphicalModel& model);

/// Expand a time-collapsed model over T steps. Time-indexed nodes (those on
/// generative paths into or out of a next-time edge) get one copy per step,
/// named "name[t]"; next-time edges become plain generative edges from copy
/// t to copy t+1. Throws if the model fails validate_acyclic.
GraphicalModel unroll(const GraphicalModel& model, int horizon);

std::string to_json(const GraphicalModel& model);
GraphicalModel model_from_json(const std::string& text);

/// Graphviz DOT export: ellipse = latent, doublecircle = observed, box =
/// parameter; inference edges dashed, next-time edges labeled "Δt".
std::string to_dot(const GraphicalModel& model);

}  // namespace mpgm
