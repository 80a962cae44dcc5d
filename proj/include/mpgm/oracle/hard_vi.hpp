#pragma once

#include "mpgm/planning/tabular_mdp.hpp"

#include <Eigen/Dense>

#include <vector>

namespace mpgm::oracle {

struct HardPlan {
    Eigen::MatrixXd q;  // S x A
    Eigen::VectorXd v;  // S
    std::vector<int> greedy;
    int iterations = 0;
};

/// Max-backup value iteration; discounted case iterates to residual < 1e-12,
/// finite-horizon case does the exact backward recursion.
HardPlan hard_value_iteration(const planning::TabularMdp& mdp);

}  // namespace mpgm::oracle
