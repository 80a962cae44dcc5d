#include "mpgm/hmm/inference.hpp"

#include "mpgm/core/logspace.hpp"

#include <cmath>
#include <stdexcept>

namespace mpgm::hmm {

namespace {

void check_obs(const HmmParams& hmm, const std::vector<int>& obs) {
    if (obs.empty()) throw std::invalid_argument("hmm: empty observation sequence");
    for (int o : obs)
        if (o < 0 || o >= hmm.n_symbols())
            throw std::domain_error("hmm: observation symbol out of range");
}

// Log-space forward pass with per-step normalization. Returns normalized
// per-step filtering weights (log) and the accumulated log-likelihood.
struct Forward {
    Eigen::MatrixXd log_alpha;  // T x K, each row normalized via log-sum-exp
    double log_likelihood = 0.0;
};

Forward forward_pass(const HmmParams& hmm, const std::vector<int>& obs,
                     const std::optional<Eigen::MatrixXd>& extra) {
    const auto T = static_cast<Eigen::Index>(obs.size());
    const Eigen::Index K = hmm.n_states();
    if (extra && (extra->rows() != T || extra->cols() != K))
        throw std::invalid_argument("hmm: extra factor matrix must be T x K");
    Eigen::MatrixXd log_trans = hmm.transition.array().log().matrix();
    Forward fwd;
    fwd.log_alpha.resize(T, K);
    std::vector<double> buf(static_cast<std::size_t>(K));
    for (Eigen::Index t = 0; t < T; ++t) {
        for (Eigen::Index k = 0; k < K; ++k) {
            double lp;
            if (t == 0) {
                lp = std::log(hmm.initial[static_cast<std::size_t>(k)]);
            } else {
                for (Eigen::Index j = 0; j < K; ++j)
                    buf[static_cast<std::size_t>(j)] = fwd.log_alpha(t - 1, j) + log_trans(j, k);
                lp = log_sum_exp(buf);
            }
            lp += std::log(hmm.emission(k, obs[static_cast<std::size_t>(t)]));
            if (extra) lp += (*extra)(t, k);
            fwd.log_alpha(t, k) = lp;
        }
        for (Eigen::Index k = 0; k < K; ++k) buf[static_cast<std::size_t>(k)] = fwd.log_alpha(t, k);
        const double norm = log_sum_exp(buf);
        if (norm == kNegInf) throw std::runtime_error("hmm: zero-probability observation sequence");
        fwd.log_alpha.row(t).array() -= norm;
        fwd.log_likelihood += norm;
    }
    return fwd;
}

}  // namespace

Smoothed forward_backward(const HmmParams& hmm, const std::vector<int>& obs,
                          const std::optional<Eigen::MatrixXd>& extra) {
    check_obs(hmm, obs);
    const auto T = static_cast<Eigen::Index>(obs.size());
    const Eigen::Index K = hmm.n_states();
    const Forward fwd = forward_pass(hmm, obs, extra);
    const Eigen::MatrixXd log_trans = hmm.transition.array().log().matrix();

    Eigen::MatrixXd log_beta = Eigen::MatrixXd::Zero(T, K);
    std::vector<double> buf(static_cast<std::size_t>(K));
    for (Eigen::Index t = T - 2; t >= 0; --t) {
        for (Eigen::Index k = 0; k < K; ++k) {
            for (Eigen::Index j = 0; j < K; ++j) {
                double term = log_trans(k, j) +
                              std::log(hmm.emission(j, obs[static_cast<std::size_t>(t + 1)])) +
                              log_beta(t + 1, j);
                if (extra) term += (*extra)(t + 1, j);
                buf[static_cast<std::size_t>(j)] = term;
            }
            log_beta(t, k) = log_sum_exp(buf);
        }
        // normalize for numerical stability; constants cancel in the marginals
        const double mx = log_beta.row(t).maxCoeff();
        log_beta.row(t).array() -= mx;
    }

    Smoothed out;
    out.log_likelihood = fwd.log_likelihood;
    out.marginals.resize(T, K);
    for (Eigen::Index t = 0; t < T; ++t) {
        for (Eigen::Index k = 0; k < K; ++k)
            buf[static_cast<std::size_t>(k)] = fwd.log_alpha(t, k) + log_beta(t, k);
        const auto p = normalized_from_log(buf);
        for (Eigen::Index k = 0; k < K; ++k) out.marginals(t, k) = p[static_cast<std::size_t>(k)];
    }
    return out;
}

std::vector<int> viterbi(const HmmParams& hmm, const std::vector<int>& obs) {
    check_obs(hmm, obs);
    const auto T = static_cast<Eigen::Index>(obs.size());
    const Eigen::Index K = hmm.n_states();
    const Eigen::MatrixXd log_trans = hmm.transition.array().log().matrix();

    Eigen::MatrixXd delta(T, K);
    Eigen::MatrixXi back(T, K);
    for (Eigen::Index k = 0; k < K; ++k)
        delta(0, k) = std::log(hmm.initial[static_cast<std::size_t>(k)]) +
                      std::log(hmm.emission(k, obs[0]));
    for (Eigen::Index t = 1; t < T; ++t) {
        for (Eigen::Index k = 0; k < K; ++k) {
            double best = kNegInf;
            Eigen::Index arg = 0;
            for (Eigen::Index j = 0; j < K; ++j) {
                const double cand = delta(t - 1, j) + log_trans(j, k);
                if (cand > best) {
                    best = cand;
                    arg = j;
                }
            }
            delta(t, k) = best + std::log(hmm.emission(k, obs[static_cast<std::size_t>(t)]));
            back(t, k) = static_cast<int>(arg);
        }
    }
    std::vector<int> path(static_cast<std::size_t>(T));
    Eigen::Index best_k = 0;
    delta.row(T - 1).maxCoeff(&best_k);
    path[static_cast<std::size_t>(T - 1)] = static_cast<int>(best_k);
    for (Eigen::Index t = T - 1; t > 0; --t)
        path[static_cast<std::size_t>(t - 1)] = back(t, path[static_cast<std::size_t>(t)]);
    return path;
}

BaumWelchResult baum_welch(const HmmParams& init, const std::vector<std::vector<int>>& sequences,
                           int max_iters, double tol) {
    if (sequences.empty()) throw std::invalid_argument("baum_welch: empty observation set");
    for (const auto& s : sequences) check_obs(init, s);
    const Eigen::Index K = init.n_states();
    const Eigen::Index V = init.n_symbols();

    HmmParams params = init;
    BaumWelchResult result{params, {}, false};
    double prev_ll = kNegInf;

    for (int iter = 0; iter < max_iters; ++iter) {
        std::vector<double> pi_counts(static_cast<std::size_t>(K), 0.0);
        Eigen::MatrixXd trans_counts = Eigen::MatrixXd::Zero(K, K);
        Eigen::MatrixXd emit_counts = Eigen::MatrixXd::Zero(K, V);
        double ll = 0.0;

        const Eigen::MatrixXd log_trans = params.transition.array().log().matrix();
        for (const auto& obs : sequences) {
            const auto T = static_cast<Eigen::Index>(obs.size());
            const Forward fwd = forward_pass(params, obs, std::nullopt);
            ll += fwd.log_likelihood;

            Eigen::MatrixXd log_beta = Eigen::MatrixXd::Zero(T, K);
            std::vector<double> buf(static_cast<std::size_t>(K));
            for (Eigen::Index t = T - 2; t >= 0; --t) {
                for (Eigen::Index k = 0; k < K; ++k) {
                    for (Eigen::Index j = 0; j < K; ++j)
                        buf[static_cast<std::size_t>(j)] =
                            log_trans(k, j) +
                            std::log(params.emission(j, obs[static_cast<std::size_t>(t + 1)])) +
                            log_beta(t + 1, j);
                    log_beta(t, k) = log_sum_exp(buf);
                }
                log_beta.row(t).array() -= log_beta.row(t).maxCoeff();
            }

            for (Eigen::Index t = 0; t < T; ++t) {
                for (Eigen::Index k = 0; k < K; ++k)
                    buf[static_cast<std::size_t>(k)] = fwd.log_alpha(t, k) + log_beta(t, k);
                const auto gamma = normalized_from_log(buf);
                for (Eigen::Index k = 0; k < K; ++k) {
                    const double g = gamma[static_cast<std::size_t>(k)];
                    emit_counts(k, obs[static_cast<std::size_t>(t)]) += g;
                    if (t == 0) pi_counts[static_cast<std::size_t>(k)] += g;
                }
            }
            for (Eigen::Index t = 0; t + 1 < T; ++t) {
                std::vector<double> xibuf(static_cast<std::size_t>(K * K));
                for (Eigen::Index j = 0; j < K; ++j)
                    for (Eigen::Index k = 0; k < K; ++k)
                        xibuf[static_cast<std::size_t>(j * K + k)] =
                            fwd.log_alpha(t, j) + log_trans(j, k) +
                            std::log(params.emission(k, obs[static_cast<std::size_t>(t + 1)])) +
                            log_beta(t + 1, k);
                const auto xi = normalized_from_log(xibuf);
                for (Eigen::Index j = 0; j < K; ++j)
                    for (Eigen::Index k = 0; k < K; ++k)
                        trans_counts(j, k) += xi[static_cast<std::size_t>(j * K + k)];
            }
        }

        result.log_likelihood_trace.push_back(ll);
        if (iter > 0 && std::abs(ll - prev_ll) < tol) {
            result.converged = true;
            break;
        }
        prev_ll = ll;

        // M step; rows with zero responsibility keep their previous values.
        std::vector<double> pi(static_cast<std::size_t>(K));
        double pi_sum = 0.0;
        for (double c : pi_counts) pi_sum += c;
        for (Eigen::Index k = 0; k < K; ++k)
            pi[static_cast<std::size_t>(k)] =
                pi_sum > 0.0 ? pi_counts[static_cast<std::size_t>(k)] / pi_sum
                             : params.initial[static_cast<std::size_t>(k)];
        Eigen::MatrixXd trans = params.transition;
        Eigen::MatrixXd emit = params.emission;
        for (Eigen::Index k = 0; k < K; ++k) {
            const double ts = trans_counts.row(k).sum();
            if (ts > 0.0) trans.row(k) = trans_counts.row(k) / ts;
            const double es = emit_counts.row(k).sum();
            if (es > 0.0) emit.row(k) = emit_counts.row(k) / es;
        }
        params = HmmParams(std::move(pi), std::move(trans), std::move(emit));
    }
    result.params = params;
    return result;
}

std::vector<int> ffbs_sample(const HmmParams& hmm, const std::vector<int>& obs, RngStream& rng,
                             const std::optional<Eigen::MatrixXd>& extra) {
    check_obs(hmm, obs);
    const auto T = static_cast<Eigen::Index>(obs.size());
    const Eigen::Index K = hmm.n_states();
    const Forward fwd = forward_pass(hmm, obs, extra);
    const Eigen::MatrixXd log_trans = hmm.transition.array().log().matrix();

    std::vector<int> path(static_cast<std::size_t>(T));
    std::vector<double> logw(static_cast<std::size_t>(K));
    for (Eigen::Index k = 0; k < K; ++k) logw[static_cast<std::size_t>(k)] = fwd.log_alpha(T - 1, k);
    path[static_cast<std::size_t>(T - 1)] = static_cast<int>(rng.categorical_logits(logw));
    for (Eigen::Index t = T - 2; t >= 0; --t) {
        const int next = path[static_cast<std::size_t>(t + 1)];
        for (Eigen::Index k = 0; k < K; ++k)
            logw[static_cast<std::size_t>(k)] = fwd.log_alpha(t, k) + log_trans(k, next);
        path[static_cast<std::size_t>(t)] = static_cast<int>(rng.categorical_logits(logw));
    }
    return path;
}

}  // namespace mpgm::hmm
