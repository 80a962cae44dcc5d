#include "mpgm/serket/endpoints.hpp"

#include "mpgm/core/logspace.hpp"
#include "mpgm/hmm/inference.hpp"

#include <stdexcept>

namespace mpgm::serket {

CategoricalEvidenceEndpoint::CategoricalEvidenceEndpoint(std::string id, Eigen::MatrixXd confusion,
                                                         std::map<std::string, int> observed_labels)
    : id_(std::move(id)), confusion_(std::move(confusion)), labels_(std::move(observed_labels)) {
    for (Eigen::Index k = 0; k < confusion_.rows(); ++k) {
        double sum = 0.0;
        for (Eigen::Index l = 0; l < confusion_.cols(); ++l) {
            if (!(confusion_(k, l) >= 0.0))
                throw std::invalid_argument("CategoricalEvidenceEndpoint: negative confusion entry");
            sum += confusion_(k, l);
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("CategoricalEvidenceEndpoint: confusion rows must sum to 1");
    }
    for (const auto& [var, y] : labels_)
        if (y < 0 || y >= confusion_.cols())
            throw std::invalid_argument("CategoricalEvidenceEndpoint: label out of range at '" + var + "'");
}

std::vector<std::pair<std::string, Support>> CategoricalEvidenceEndpoint::shared_vars() const {
    std::vector<std::pair<std::string, Support>> out;
    for (const auto& [var, y] : labels_)
        out.emplace_back(var, Support::categorical(static_cast<int>(confusion_.rows())));
    return out;
}

Belief CategoricalEvidenceEndpoint::emit_factor(const std::string& var) {
    auto it = labels_.find(var);
    if (it == labels_.end())
        throw std::invalid_argument("CategoricalEvidenceEndpoint: unknown variable '" + var + "'");
    std::vector<double> f(static_cast<std::size_t>(confusion_.rows()));
    for (Eigen::Index k = 0; k < confusion_.rows(); ++k)
        f[static_cast<std::size_t>(k)] = confusion_(k, it->second);
    return Belief{var, CategoricalDist::normalized(std::move(f))};
}

GmmEndpoint::GmmEndpoint(std::string id, mixture::GmmState state, std::string var_prefix,
                         int rb_samples)
    : id_(std::move(id)), state_(std::move(state)), prefix_(std::move(var_prefix)),
      rb_samples_(rb_samples) {
    rb_accum_.assign(static_cast<std::size_t>(state_.n_data()),
                     std::vector<double>(static_cast<std::size_t>(state_.n_components()), 0.0));
}

std::vector<std::pair<std::string, Support>> GmmEndpoint::shared_vars() const {
    std::vector<std::pair<std::string, Support>> out;
    for (int i = 0; i < state_.n_data(); ++i)
        out.emplace_back(prefix_ + std::to_string(i), Support::categorical(state_.n_components()));
    return out;
}

int GmmEndpoint::datum_of(const std::string& var) const {
    if (var.rfind(prefix_, 0) != 0)
        throw std::invalid_argument("GmmEndpoint: unknown variable '" + var + "'");
    const int i = std::stoi(var.substr(prefix_.size()));
    if (i < 0 || i >= state_.n_data())
        throw std::invalid_argument("GmmEndpoint: variable index out of range in '" + var + "'");
    return i;
}

void GmmEndpoint::local_update(RngStream& rng) {
    if (rb_samples_ <= 0) {
        state_.gibbs_sweep(rng);
        return;
    }
    for (auto& acc : rb_accum_) std::fill(acc.begin(), acc.end(), 0.0);
    rb_count_ = 0;
    for (int s = 0; s < rb_samples_; ++s) {
        state_.gibbs_sweep(rng);
        ++rb_count_;
        for (int i = 0; i < state_.n_data(); ++i) {
            const auto f = state_.local_factor(i);
            for (std::size_t k = 0; k < f.size(); ++k)
                rb_accum_[static_cast<std::size_t>(i)][k] += f[k];
        }
    }
}

Belief GmmEndpoint::emit_factor(const std::string& var) {
    const int i = datum_of(var);
    if (rb_samples_ <= 0 || rb_count_ == 0) return Belief{var, state_.local_factor(i)};
    std::vector<double> mean = rb_accum_[static_cast<std::size_t>(i)];
    for (double& v : mean) v /= rb_count_;
    return Belief{var, CategoricalDist::normalized(std::move(mean))};
}

void GmmEndpoint::install_message(const std::string& var, const Belief& message) {
    state_.install_message(datum_of(var), message.categorical());
}

MldaEndpoint::MldaEndpoint(std::string id, mixture::MldaState state,
                           std::vector<std::pair<std::string, mixture::MldaSite>> shared_sites,
                           int rb_samples)
    : id_(std::move(id)), state_(std::move(state)), sites_(std::move(shared_sites)),
      rb_samples_(rb_samples) {}

std::vector<std::pair<std::string, Support>> MldaEndpoint::shared_vars() const {
    std::vector<std::pair<std::string, Support>> out;
    for (const auto& [var, site] : sites_)
        out.emplace_back(var, Support::categorical(state_.config().n_topics));
    return out;
}

const mixture::MldaSite& MldaEndpoint::site_of(const std::string& var) const {
    for (const auto& [name, site] : sites_)
        if (name == var) return site;
    throw std::invalid_argument("MldaEndpoint: unknown variable '" + var + "'");
}

void MldaEndpoint::local_update(RngStream& rng) {
    if (rb_samples_ <= 0) {
        state_.gibbs_sweep(rng);
        return;
    }
    rb_accum_.clear();
    rb_count_ = 0;
    for (int s = 0; s < rb_samples_; ++s) {
        state_.gibbs_sweep(rng);
        ++rb_count_;
        for (const auto& [var, site] : sites_) {
            const auto f = state_.local_factor(site);
            auto& acc = rb_accum_[var];
            if (acc.empty()) acc.assign(f.size(), 0.0);
            for (std::size_t k = 0; k < f.size(); ++k) acc[k] += f[k];
        }
    }
}

Belief MldaEndpoint::emit_factor(const std::string& var) {
    const auto& site = site_of(var);
    auto it = rb_accum_.find(var);
    if (rb_samples_ <= 0 || rb_count_ == 0 || it == rb_accum_.end())
        return Belief{var, state_.local_factor(site)};
    std::vector<double> mean = it->second;
    for (double& v : mean) v /= rb_count_;
    return Belief{var, CategoricalDist::normalized(std::move(mean))};
}

void MldaEndpoint::install_message(const std::string& var, const Belief& message) {
    state_.install_message(site_of(var), message.categorical());
}

HmmEndpoint::HmmEndpoint(std::string id, hmm::HmmParams params, std::vector<int> obs,
                         std::string var_prefix)
    : id_(std::move(id)), params_(std::move(params)), obs_(std::move(obs)),
      prefix_(std::move(var_prefix)) {
    const auto t = static_cast<Eigen::Index>(obs_.size());
    message_log_ = Eigen::MatrixXd::Zero(t, params_.n_states());
    has_message_.assign(obs_.size(), false);
}

std::vector<std::pair<std::string, Support>> HmmEndpoint::shared_vars() const {
    std::vector<std::pair<std::string, Support>> out;
    for (std::size_t t = 0; t < obs_.size(); ++t)
        out.emplace_back(prefix_ + std::to_string(t),
                         Support::categorical(static_cast<int>(params_.n_states())));
    return out;
}

int HmmEndpoint::step_of(const std::string& var) const {
    if (var.rfind(prefix_, 0) != 0)
        throw std::invalid_argument("HmmEndpoint: unknown variable '" + var + "'");
    const int t = std::stoi(var.substr(prefix_.size()));
    if (t < 0 || t >= static_cast<int>(obs_.size()))
        throw std::invalid_argument("HmmEndpoint: step out of range in '" + var + "'");
    return t;
}

Belief HmmEndpoint::emit_factor(const std::string& var) {
    const int t = step_of(var);
    // exact smoothed conditional given own observations and the messages at
    // every other step (leaving this variable's own message out)
    Eigen::MatrixXd extra = message_log_;
    extra.row(t).setZero();
    const auto smoothed = hmm::forward_backward(params_, obs_, extra);
    std::vector<double> f(static_cast<std::size_t>(params_.n_states()));
    for (Eigen::Index k = 0; k < params_.n_states(); ++k)
        f[static_cast<std::size_t>(k)] = smoothed.marginals(t, k);
    return Belief{var, CategoricalDist::normalized(std::move(f))};
}

void HmmEndpoint::install_message(const std::string& var, const Belief& message) {
    const int t = step_of(var);
    const auto& dist = message.categorical();
    if (static_cast<Eigen::Index>(dist.size()) != params_.n_states())
        throw std::invalid_argument("HmmEndpoint: message support mismatch");
    for (Eigen::Index k = 0; k < params_.n_states(); ++k)
        message_log_(t, k) = dist.log_density(static_cast<std::size_t>(k));
    has_message_[static_cast<std::size_t>(t)] = true;
}

}  // namespace mpgm::serket
