#pragma once

#include "mpgm/hmm/hmm_model.hpp"
#include "mpgm/mixture/gmm.hpp"
#include "mpgm/mixture/mlda.hpp"
#include "mpgm/serket/bus.hpp"

#include <map>
#include <memory>

namespace mpgm::serket {

/// Fixed likelihood factors from observed labels: the factor over a shared
/// categorical variable with observed label y is confusion(k, y), k = 1..K.
class CategoricalEvidenceEndpoint : public ModuleEndpoint {
public:
    CategoricalEvidenceEndpoint(std::string id, Eigen::MatrixXd confusion,
                                std::map<std::string, int> observed_labels);

    std::string id() const override { return id_; }
    std::vector<std::pair<std::string, Support>> shared_vars() const override;
    void local_update(RngStream&) override {}
    Belief emit_factor(const std::string& var) override;
    void install_message(const std::string&, const Belief&) override {}

private:
    std::string id_;
    Eigen::MatrixXd confusion_;  // K x L
    std::map<std::string, int> labels_;
};

/// Gaussian-mixture endpoint sharing per-datum assignment variables.
/// With rb_samples > 0, local_update runs that many internal Gibbs sweeps and
/// emit_factor returns the Rao-Blackwellized average of the local conditional
/// (for DistributionExchange); with rb_samples == 0 the module emits the
/// conditional at its current state (a valid Gibbs factor for SampleExchange).
class GmmEndpoint : public ModuleEndpoint {
public:
    GmmEndpoint(std::string id, mixture::GmmState state, std::string var_prefix, int rb_samples);

    std::string id() const override { return id_; }
    std::vector<std::pair<std::string, Support>> shared_vars() const override;
    void local_update(RngStream& rng) override;
    Belief emit_factor(const std::string& var) override;
    void install_message(const std::string& var, const Belief& message) override;

    const mixture::GmmState& state() const { return state_; }

private:
    int datum_of(const std::string& var) const;

    std::string id_;
    mixture::GmmState state_;
    std::string prefix_;
    int rb_samples_;
    std::vector<std::vector<double>> rb_accum_;  // per datum, per component
    int rb_count_ = 0;
};

/// Multimodal-LDA endpoint sharing designated token-site topics.
class MldaEndpoint : public ModuleEndpoint {
public:
    MldaEndpoint(std::string id, mixture::MldaState state,
                 std::vector<std::pair<std::string, mixture::MldaSite>> shared_sites,
                 int rb_samples);

    std::string id() const override { return id_; }
    std::vector<std::pair<std::string, Support>> shared_vars() const override;
    void local_update(RngStream& rng) override;
    Belief emit_factor(const std::string& var) override;
    void install_message(const std::string& var, const Belief& message) override;

    const mixture::MldaState& state() const { return state_; }

private:
    const mixture::MldaSite& site_of(const std::string& var) const;

    std::string id_;
    mixture::MldaState state_;
    std::vector<std::pair<std::string, mixture::MldaSite>> sites_;
    int rb_samples_;
    std::map<std::string, std::vector<double>> rb_accum_;
    int rb_count_ = 0;
};

/// HMM endpoint sharing its hidden state at every step. Inference is exact:
/// the emitted factor for step t is the smoothed conditional given the
/// module's own observations and the messages installed at all other steps.
class HmmEndpoint : public ModuleEndpoint {
public:
    HmmEndpoint(std::string id, hmm::HmmParams params, std::vector<int> obs,
                std::string var_prefix);

    std::string id() const override { return id_; }
    std::vector<std::pair<std::string, Support>> shared_vars() const override;
    void local_update(RngStream&) override {}
    Belief emit_factor(const std::string& var) override;
    void install_message(const std::string& var, const Belief& message) override;

private:
    int step_of(const std::string& var) const;

    std::string id_;
    hmm::HmmParams params_;
    std::vector<int> obs_;
    std::string prefix_;
    Eigen::MatrixXd message_log_;  // T x K accumulated message factors
    std::vector<bool> has_message_;
};

}  // namespace mpgm::serket
