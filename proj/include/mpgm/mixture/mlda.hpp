#pragma once

#include "mpgm/core/distributions.hpp"
#include "mpgm/core/rng.hpp"

#include <map>
#include <string>
#include <vector>

namespace mpgm::mixture {

/// Multimodal LDA: per-object topic proportions theta are shared across all
/// modalities of the object; each (modality, topic) pair has its own word
/// distribution. With one modality this is plain LDA.
struct MldaConfig {
    int n_modalities = 1;
    int n_topics = 1;
    std::vector<int> vocab_sizes;     // per modality
    double alpha = 1.0;               // symmetric document-topic prior
    std::vector<double> beta;         // per-modality symmetric topic-word prior

    MldaConfig(int m, int k, std::vector<int> vocab, double a, std::vector<double> b);
};

struct MldaObject {
    std::string id;
    std::vector<std::vector<int>> tokens;  // per modality
};

using MldaCorpus = std::vector<MldaObject>;

/// Address of one token: (object, modality, position).
struct MldaSite {
    int object = 0;
    int modality = 0;
    int token = 0;
    auto operator<=>(const MldaSite&) const = default;
};

class MldaState {
public:
    MldaState(MldaConfig config, MldaCorpus corpus, RngStream& rng);

    const MldaConfig& config() const { return config_; }
    const MldaCorpus& corpus() const { return corpus_; }
    int n_objects() const { return static_cast<int>(corpus_.size()); }

    /// One collapsed Gibbs sweep over every (unclamped) token assignment.
    void gibbs_sweep(RngStream& rng);

    int assignment(const MldaSite& site) const;
    void set_assignment(const MldaSite& site, int topic);
    void set_clamped(const MldaSite& site, bool clamped);

    /// Leave-one-out full conditional of a site's topic, including any
    /// installed incoming message. A point-mass message pins the assignment.
    CategoricalDist shared_belief(const MldaSite& site) const;
    /// The same conditional without the incoming message.
    CategoricalDist local_factor(const MldaSite& site) const;
    void install_message(const MldaSite& site, const CategoricalDist& message);

    /// Posterior-mean topic proportions of one object.
    std::vector<double> theta(int object) const;
    /// Posterior-mean word distribution of (modality, topic).
    std::vector<double> phi(int modality, int topic) const;

    /// Collapsed log joint ln p(tokens, assignments).
    double log_joint() const;

    bool caches_consistent() const;

    /// Predictive distribution over the vocabulary of `missing_modality` for
    /// a new object with the given observed tokens (empty vectors for
    /// unobserved modalities; the missing modality must be empty). Exact
    /// enumeration over the new object's topic assignments when feasible,
    /// otherwise Gibbs fold-in driven by `rng`.
    std::vector<double> predict_modality(const std::vector<std::vector<int>>& observed,
                                         int missing_modality, RngStream& rng) const;

private:
    std::vector<double> conditional_log_weights(const MldaSite& site, bool include_message) const;
    void remove_site(const MldaSite& site);
    void add_site(const MldaSite& site);
    int site_index(const MldaSite& site) const;

    MldaConfig config_;
    MldaCorpus corpus_;
    std::vector<std::vector<std::vector<int>>> z_;       // [object][modality][token]
    Eigen::MatrixXd doc_topic_;                          // D x K counts, all modalities
    std::vector<Eigen::MatrixXd> topic_word_;            // per modality: K x V counts
    std::vector<Eigen::VectorXd> topic_totals_;          // per modality: K
    std::map<MldaSite, std::vector<double>> messages_;   // incoming log factors
    std::map<MldaSite, bool> clamped_;
};

}  // namespace mpgm::mixture
