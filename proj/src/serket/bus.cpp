#include "mpgm/serket/bus.hpp"

#include "mpgm/core/logspace.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mpgm::serket {

Bus::Bus(std::uint64_t seed, double damping) : seed_(seed), damping_(damping) {
    if (!(damping_ > 0.0 && damping_ <= 1.0))
        throw std::invalid_argument("Bus: damping must lie in (0, 1]");
}

std::size_t Bus::register_endpoint(std::shared_ptr<ModuleEndpoint> endpoint) {
    if (started_) throw std::logic_error("Bus: cannot register after the run has started");
    const std::string id = endpoint->id();
    if (by_id_.count(id)) throw std::invalid_argument("Bus: duplicate endpoint id '" + id + "'");
    const std::size_t handle = endpoints_.size();
    by_id_[id] = handle;
    streams_.push_back(RngStream(seed_, RngStream::fnv1a(id)));
    endpoints_.push_back(std::move(endpoint));
    return handle;
}

void Bus::connect(const Connection& connection) {
    if (started_) throw std::logic_error("Bus: cannot connect after the run has started");
    if (connection.participants.size() < 2)
        throw std::invalid_argument("Bus: connection needs at least two participants");
    std::set<std::string> uniq(connection.participants.begin(), connection.participants.end());
    if (uniq.size() != connection.participants.size())
        throw std::invalid_argument("Bus: endpoint listed twice in connection at '" + connection.var + "'");

    std::optional<Support> support;
    std::vector<std::size_t> indices;
    for (const auto& pid : connection.participants) {
        auto it = by_id_.find(pid);
        if (it == by_id_.end()) throw std::invalid_argument("Bus: unknown endpoint '" + pid + "'");
        bool declares = false;
        for (const auto& [name, sup] : endpoints_[it->second]->shared_vars()) {
            if (name != connection.var) continue;
            declares = true;
            if (support && !(*support == sup))
                throw std::invalid_argument("Bus: support mismatch at shared variable '" +
                                            connection.var + "'");
            support = sup;
        }
        if (!declares)
            throw std::invalid_argument("Bus: endpoint '" + pid + "' does not declare variable '" +
                                        connection.var + "'");
        indices.push_back(it->second);
    }
    if (support->type == Support::Type::Real &&
        connection.kind == ConnectionKind::HeadToHead)
        throw std::invalid_argument(
            "Bus: head-to-head connections are restricted to categorical supports");

    auto& entry = shared_[connection.var];
    entry.second = *support;
    for (std::size_t idx : indices)
        if (std::find(entry.first.begin(), entry.first.end(), idx) == entry.first.end())
            entry.first.push_back(idx);
    // deterministic participant order: sort by endpoint id
    std::sort(entry.first.begin(), entry.first.end(), [&](std::size_t a, std::size_t b) {
        return endpoints_[a]->id() < endpoints_[b]->id();
    });
    connections_.push_back(connection);
}

CategoricalDist Bus::consensus_for(const std::string& var) {
    const auto& [participants, support] = shared_.at(var);
    const std::size_t k = static_cast<std::size_t>(support.dim);
    std::vector<double> logp(k, 0.0);
    for (std::size_t idx : participants) {
        const Belief belief = endpoints_[idx]->emit_factor(var);
        const auto& dist = belief.categorical();
        if (dist.size() != k)
            throw std::invalid_argument("Bus: factor support mismatch at '" + var + "'");
        for (std::size_t c = 0; c < k; ++c) logp[c] += dist.log_density(c);
    }
    if (log_sum_exp(logp) == kNegInf) throw DegenerateConsensusError(var);
    if (damping_ < 1.0) {
        auto prev = previous_consensus_.find(var);
        if (prev != previous_consensus_.end()) {
            for (std::size_t c = 0; c < k; ++c)
                logp[c] = damping_ * logp[c] + (1.0 - damping_) * prev->second.log_density(c);
            if (log_sum_exp(logp) == kNegInf) throw DegenerateConsensusError(var);
        }
    }
    return CategoricalDist::from_log_weights(logp);
}

RoundReport Bus::run_round(ExchangeMode mode, RngStream& rng) {
    if (endpoints_.empty()) throw std::logic_error("Bus: no registered modules");
    started_ = true;
    RoundReport report;
    report.round = ++round_;

    for (std::size_t i = 0; i < endpoints_.size(); ++i)
        endpoints_[i]->local_update(streams_[i]);

    // shared variables processed sequentially in name order: in sample mode
    // this makes the round a systematic single-site Gibbs scan
    for (auto& [var, entry] : shared_) {
        const CategoricalDist consensus = consensus_for(var);
        Belief outgoing{var, consensus};
        if (mode == ExchangeMode::SampleExchange) {
            const std::size_t draw = rng.categorical(consensus.probs());
            outgoing.dist = CategoricalDist::point_mass(consensus.size(), draw);
        }
        for (std::size_t idx : entry.first) endpoints_[idx]->install_message(var, outgoing);

        auto prev = previous_consensus_.find(var);
        double skl = std::numeric_limits<double>::infinity();
        if (prev != previous_consensus_.end()) {
            skl = 0.0;
            for (std::size_t c = 0; c < consensus.size(); ++c) {
                const double p = consensus[c], q = prev->second[c];
                if (p > 0.0 && q > 0.0)
                    skl += (p - q) * (std::log(p) - std::log(q));
                else if (p != q)
                    skl = std::numeric_limits<double>::infinity();
            }
        }
        report.symmetric_kl[var] = skl;
        report.consensus.emplace(var, consensus);
        previous_consensus_.insert_or_assign(var, consensus);
    }
    return report;
}

ConvergenceReport Bus::run_until(ExchangeMode mode, int max_rounds, double tol, RngStream& rng) {
    ConvergenceReport out;
    for (int r = 0; r < max_rounds; ++r) {
        out.last = run_round(mode, rng);
        out.rounds = r + 1;
        double max_kl = 0.0;
        for (const auto& [var, kl] : out.last.symmetric_kl) max_kl = std::max(max_kl, kl);
        if (max_kl <= tol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

std::vector<GraphicalModel> decompose_reference(const GraphicalModel& model,
                                                const std::vector<std::string>& cut) {
    std::set<std::size_t> cut_set;
    for (const auto& name : cut) cut_set.insert(model.node_index(name));

    // connected components of the non-cut subgraph (all edge kinds, undirected)
    const std::size_t n = model.nodes().size();
    std::vector<int> comp(n, -1);
    std::vector<std::vector<std::size_t>> undirected(n);
    for (const auto& e : model.edges()) {
        const std::size_t a = model.node_index(e.src), b = model.node_index(e.dst);
        if (cut_set.count(a) || cut_set.count(b)) continue;
        undirected[a].push_back(b);
        undirected[b].push_back(a);
    }
    int n_comp = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (comp[i] >= 0 || cut_set.count(i)) continue;
        std::vector<std::size_t> stack{i};
        comp[i] = n_comp;
        while (!stack.empty()) {
            const std::size_t v = stack.back();
            stack.pop_back();
            for (std::size_t w : undirected[v])
                if (comp[w] < 0) {
                    comp[w] = n_comp;
                    stack.push_back(w);
                }
        }
        ++n_comp;
    }

    std::vector<std::vector<EdgeDesc>> edges_by_comp(static_cast<std::size_t>(n_comp));
    std::vector<EdgeDesc> cut_to_cut;
    for (const auto& e : model.edges()) {
        const std::size_t a = model.node_index(e.src), b = model.node_index(e.dst);
        const bool ca = cut_set.count(a) > 0, cb = cut_set.count(b) > 0;
        if (ca && cb) {
            cut_to_cut.push_back(e);
        } else {
            const int c = ca ? comp[b] : comp[a];
            edges_by_comp[static_cast<std::size_t>(c)].push_back(e);
        }
    }

    std::vector<GraphicalModel> out;
    auto build = [&](const std::vector<EdgeDesc>& edges) {
        std::set<std::string> names;
        for (const auto& e : edges) {
            names.insert(e.src);
            names.insert(e.dst);
        }
        std::vector<NodeDesc> nodes;
        for (const auto& node : model.nodes())
            if (names.count(node.name)) nodes.push_back(node);
        out.push_back(GraphicalModel(std::move(nodes), edges));
    };
    for (int c = 0; c < n_comp; ++c) {
        // isolated non-cut nodes without edges form no sub-model on their own
        if (!edges_by_comp[static_cast<std::size_t>(c)].empty())
            build(edges_by_comp[static_cast<std::size_t>(c)]);
    }
    for (const auto& e : cut_to_cut) build({e});

    if (out.size() < 2)
        throw std::invalid_argument("decompose_reference: cut produces fewer than two sub-models");
    for (std::size_t ci : cut_set) {
        const auto& name = model.nodes()[ci].name;
        int incident = 0;
        for (const auto& sub : out)
            if (sub.has_node(name)) ++incident;
        if (incident == 0)
            throw std::invalid_argument("decompose_reference: cut node '" + name +
                                        "' leaves an empty sub-model");
    }
    return out;
}

}  // namespace mpgm::serket
