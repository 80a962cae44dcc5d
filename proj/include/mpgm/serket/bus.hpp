#pragma once

#include "mpgm/core/distributions.hpp"
#include "mpgm/core/graph.hpp"
#include "mpgm/core/rng.hpp"

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace mpgm::serket {

/// Probabilistic message about one shared variable. Categorical for discrete
/// shared nodes; Gaussian kept for conjugate-Gaussian shared nodes.
struct Belief {
    std::string var;
    std::variant<CategoricalDist, GaussianParams> dist;

    const CategoricalDist& categorical() const {
        if (!std::holds_alternative<CategoricalDist>(dist))
            throw std::logic_error("Belief: not categorical");
        return std::get<CategoricalDist>(dist);
    }
};

/// Contract every elemental module implements to participate in message
/// exchange: local inference plus factor emission over shared variables.
/// emit_factor must return the module's own normalized local factor (without
/// the incoming message); install_message is idempotent for equal payloads.
class ModuleEndpoint {
public:
    virtual ~ModuleEndpoint() = default;
    virtual std::string id() const = 0;
    virtual std::vector<std::pair<std::string, Support>> shared_vars() const = 0;
    virtual void local_update(RngStream& rng) = 0;
    virtual Belief emit_factor(const std::string& var) = 0;
    virtual void install_message(const std::string& var, const Belief& message) = 0;
};

enum class ConnectionKind { HeadToTail, TailToTail, HeadToHead };

struct Connection {
    ConnectionKind kind = ConnectionKind::HeadToTail;
    std::string var;
    std::vector<std::string> participants;  // endpoint ids, ordered
};

enum class ExchangeMode { DistributionExchange, SampleExchange };

struct RoundReport {
    int round = 0;
    /// symmetric KL between this round's consensus and the previous one
    std::map<std::string, double> symmetric_kl;
    std::map<std::string, CategoricalDist> consensus;
};

struct ConvergenceReport {
    bool converged = false;
    int rounds = 0;
    RoundReport last;
};

struct DegenerateConsensusError : std::runtime_error {
    explicit DegenerateConsensusError(const std::string& var)
        : std::runtime_error("degenerate consensus: all-zero mass at shared variable '" + var + "'"),
          variable(var) {}
    std::string variable;
};

/// The composition kernel: owns registered endpoints, wires them at shared
/// variables, and runs rounds of local inference plus belief exchange.
/// Per-module RNG streams are derived from (seed, module id) so results do
/// not depend on execution interleaving.
class Bus {
public:
    explicit Bus(std::uint64_t seed, double damping = 1.0);

    std::size_t register_endpoint(std::shared_ptr<ModuleEndpoint> endpoint);
    void connect(const Connection& connection);

    RoundReport run_round(ExchangeMode mode, RngStream& rng);
    ConvergenceReport run_until(ExchangeMode mode, int max_rounds, double tol, RngStream& rng);

    const std::vector<std::shared_ptr<ModuleEndpoint>>& endpoints() const { return endpoints_; }
    const std::vector<Connection>& connections() const { return connections_; }

private:
    CategoricalDist consensus_for(const std::string& var);

    std::uint64_t seed_;
    double damping_;
    bool started_ = false;
    int round_ = 0;
    std::vector<std::shared_ptr<ModuleEndpoint>> endpoints_;
    std::vector<RngStream> streams_;
    std::map<std::string, std::size_t> by_id_;
    std::vector<Connection> connections_;
    // per shared variable: participant endpoint indices (sorted by id) + support
    std::map<std::string, std::pair<std::vector<std::size_t>, Support>> shared_;
    std::map<std::string, CategoricalDist> previous_consensus_;
};

/// Split a reference model at the given shared (cut) nodes: every edge lands
/// in exactly one sub-model, cut nodes are duplicated into each incident
/// sub-model, and the union of sub-models reconstructs the original edges.
/// Throws if a cut node would leave an empty side (e.g. cutting at a leaf).
std::vector<GraphicalModel> decompose_reference(const GraphicalModel& model,
                                                const std::vector<std::string>& cut);

}  // namespace mpgm::serket
