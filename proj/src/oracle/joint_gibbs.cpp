#include "mpgm/oracle/joint_gibbs.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mpgm::oracle {

EmpiricalPosterior joint_gibbs(const std::function<double(const std::vector<int>&)>& log_joint,
                               const std::vector<int>& arity, int sweeps, RngStream& rng,
                               int burn_in) {
    if (sweeps < 1) throw std::invalid_argument("joint_gibbs: need at least one sweep");
    EmpiricalPosterior out;
    out.arity = arity;
    out.site_marginals.resize(arity.size());
    for (std::size_t i = 0; i < arity.size(); ++i)
        out.site_marginals[i].assign(static_cast<std::size_t>(arity[i]), 0.0);

    std::vector<int> config(arity.size());
    for (std::size_t i = 0; i < arity.size(); ++i)
        config[i] = static_cast<int>(rng.uniform_int(static_cast<std::size_t>(arity[i])));

    int kept = 0;
    for (int sweep = 0; sweep < burn_in + sweeps; ++sweep) {
        for (std::size_t i = 0; i < arity.size(); ++i) {
            std::vector<double> logw(static_cast<std::size_t>(arity[i]));
            for (int v = 0; v < arity[i]; ++v) {
                config[i] = v;
                logw[static_cast<std::size_t>(v)] = log_joint(config);
            }
            config[i] = static_cast<int>(rng.categorical_logits(logw));
        }
        if (sweep >= burn_in) {
            ++kept;
            out.config_freq[config] += 1.0;
            for (std::size_t i = 0; i < arity.size(); ++i)
                out.site_marginals[i][static_cast<std::size_t>(config[i])] += 1.0;
        }
    }
    for (auto& [cfg, c] : out.config_freq) c /= kept;
    for (auto& marg : out.site_marginals)
        for (double& v : marg) v /= kept;
    return out;
}

}  // namespace mpgm::oracle
