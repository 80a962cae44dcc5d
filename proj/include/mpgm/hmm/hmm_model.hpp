#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace mpgm::hmm {

/// Discrete HMM with categorical emissions. transition is K x K and emission
/// K x V; every row must sum to 1 within 1e-9 with nonnegative entries.
struct HmmParams {
    std::vector<double> initial;
    Eigen::MatrixXd transition;
    Eigen::MatrixXd emission;

    HmmParams(std::vector<double> pi, Eigen::MatrixXd trans, Eigen::MatrixXd emit)
        : initial(std::move(pi)), transition(std::move(trans)), emission(std::move(emit)) {
        const auto k = static_cast<Eigen::Index>(initial.size());
        if (k < 1) throw std::invalid_argument("HmmParams: need at least one state");
        if (transition.rows() != k || transition.cols() != k)
            throw std::invalid_argument("HmmParams: transition must be K x K");
        if (emission.rows() != k || emission.cols() < 1)
            throw std::invalid_argument("HmmParams: emission must be K x V");
        validate_row(Eigen::Map<const Eigen::RowVectorXd>(initial.data(), k), "initial");
        for (Eigen::Index i = 0; i < k; ++i) {
            validate_row(transition.row(i), "transition");
            validate_row(emission.row(i), "emission");
        }
    }

    Eigen::Index n_states() const { return transition.rows(); }
    Eigen::Index n_symbols() const { return emission.cols(); }

private:
    template <typename Row>
    static void validate_row(const Row& row, const char* what) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < row.size(); ++j) {
            if (!(row(j) >= 0.0))
                throw std::invalid_argument(std::string(what) + ": negative entry");
            sum += row(j);
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument(std::string(what) + ": row does not sum to 1");
    }
};

}  // namespace mpgm::hmm
