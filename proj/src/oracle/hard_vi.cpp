#include "mpgm/oracle/hard_vi.hpp"

namespace mpgm::oracle {

HardPlan hard_value_iteration(const planning::TabularMdp& mdp) {
    const int s_count = mdp.n_states;
    const int a_count = mdp.n_actions;
    HardPlan plan;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(s_count);
    Eigen::MatrixXd q(s_count, a_count);

    auto one_backup = [&](const Eigen::VectorXd& v_next, double discount) {
        for (int s = 0; s < s_count; ++s)
            for (int a = 0; a < a_count; ++a) {
                double ev = 0.0;
                for (int t = 0; t < s_count; ++t) ev += mdp.transition[a](s, t) * v_next(t);
                q(s, a) = mdp.reward(s, a) + discount * ev;
            }
    };

    if (mdp.horizon) {
        for (int t = 0; t < *mdp.horizon; ++t) {
            one_backup(v, 1.0);
            for (int s = 0; s < s_count; ++s) v(s) = q.row(s).maxCoeff();
        }
        plan.iterations = *mdp.horizon;
    } else {
        const double g = *mdp.gamma;
        for (int iter = 0; iter < 10000000; ++iter) {
            one_backup(v, g);
            double residual = 0.0;
            for (int s = 0; s < s_count; ++s) {
                const double nv = q.row(s).maxCoeff();
                residual = std::max(residual, std::abs(nv - v(s)));
                v(s) = nv;
            }
            plan.iterations = iter + 1;
            if (residual < 1e-12) break;
        }
    }
    plan.q = q;
    plan.v = v;
    plan.greedy.resize(static_cast<std::size_t>(s_count));
    for (int s = 0; s < s_count; ++s) {
        Eigen::Index best = 0;
        q.row(s).maxCoeff(&best);
        plan.greedy[static_cast<std::size_t>(s)] = static_cast<int>(best);
    }
    return plan;
}

}  // namespace mpgm::oracle
