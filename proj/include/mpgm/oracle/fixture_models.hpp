#pragma once

// Small undecomposed joint models used as test fixtures. Their log-joint
// evaluations are written naively (fresh counts, plain loops) and depend on
// core types only, so enumeration and Gibbs results obtained from them are
// independent of the module inference paths they are used to check.

#include "mpgm/core/distributions.hpp"
#include "mpgm/hmm/hmm_model.hpp"

#include <Eigen/Dense>

#include <vector>

namespace mpgm::oracle {

/// Mixture with fixed Gaussian components, mixing weights integrated out
/// under a symmetric Dirichlet, and an optional noisy label per datum.
struct GmmLabelFixture {
    double weight_alpha = 1.0;
    std::vector<GaussianParams> components;
    Eigen::MatrixXd data;      // N x D
    Eigen::MatrixXd confusion; // K x L; empty = no label channel
    std::vector<int> labels;   // per datum, -1 = unlabeled

    int n_data() const { return static_cast<int>(data.rows()); }
    int n_components() const { return static_cast<int>(components.size()); }
    double log_joint(const std::vector<int>& assignment) const;
};

/// Multimodal LDA fixture with an optional noisy label observing the topic
/// of one designated site per object.
struct MldaLabelFixture {
    int n_modalities = 1;
    int n_topics = 1;
    std::vector<int> vocab_sizes;
    double alpha = 1.0;
    std::vector<double> beta;
    std::vector<std::vector<std::vector<int>>> tokens;  // [object][modality][token]
    Eigen::MatrixXd confusion;  // K x L; empty = no label channel
    std::vector<int> labels;    // per object, -1 = unlabeled
    int label_modality = 0;     // designated site: (object, label_modality, token 0)

    /// Sites flattened object-major, then modality, then token position.
    std::size_t n_sites() const;
    double log_joint(const std::vector<int>& flat_assignment) const;
};

/// HMM whose hidden state is additionally observed through a noisy label
/// channel at some steps.
struct HmmLabelFixture {
    hmm::HmmParams params;
    std::vector<int> obs;
    Eigen::MatrixXd confusion;  // K x L; empty = no label channel
    std::vector<int> labels;    // per step, -1 = unlabeled

    double log_joint(const std::vector<int>& path) const;
};

}  // namespace mpgm::oracle
