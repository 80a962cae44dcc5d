#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace mpgm {

/// Normalized distribution over K categories. Invariants: K >= 1, entries
/// nonnegative, entries sum to 1 within 1e-9. Checked at construction.
class CategoricalDist {
public:
    explicit CategoricalDist(std::vector<double> probs);

    static CategoricalDist uniform(std::size_t k);
    static CategoricalDist point_mass(std::size_t k, std::size_t at);
    /// Normalize arbitrary nonnegative weights. Throws if total mass is zero.
    static CategoricalDist normalized(std::vector<double> weights);
    static CategoricalDist from_log_weights(std::span<const double> logw);

    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t k) const { return probs_[k]; }
    const std::vector<double>& probs() const { return probs_; }

    /// log p(k); -inf for zero-mass categories, domain error out of range.
    double log_density(std::size_t k) const;

    double entropy() const;

private:
    std::vector<double> probs_;
};

/// Dirichlet concentration parameters; all entries strictly positive.
class DirichletParams {
public:
    explicit DirichletParams(std::vector<double> alpha);
    static DirichletParams symmetric(std::size_t k, double alpha);

    std::size_t size() const { return alpha_.size(); }
    const std::vector<double>& alpha() const { return alpha_; }

    /// log density at a point x on the simplex (sum 1 within 1e-9, entries >= 0).
    double log_density(std::span<const double> x) const;

    /// Conjugate update with category counts (sufficient statistics).
    DirichletParams posterior(std::span<const double> counts) const;

    std::vector<double> mean() const;

private:
    std::vector<double> alpha_;
};

/// Multivariate Gaussian. Covariance must be symmetric within 1e-9 and
/// positive definite (checked by Cholesky factorization at construction).
class GaussianParams {
public:
    GaussianParams(Eigen::VectorXd mean, Eigen::MatrixXd covariance);

    Eigen::Index dim() const { return mean_.size(); }
    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& covariance() const { return cov_; }

    double log_density(const Eigen::VectorXd& x) const;

private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    double log_det_;
};

/// Sufficient statistics of a set of real vectors: (n, sum x, sum x x^T).
/// Batches combine by plain addition, which keeps conjugate updates
/// associative over batches.
struct GaussianSuffStats {
    double n = 0.0;
    Eigen::VectorXd sum;
    Eigen::MatrixXd sum_outer;

    explicit GaussianSuffStats(Eigen::Index dim);
    static GaussianSuffStats of(const Eigen::MatrixXd& rows);

    void add(const Eigen::VectorXd& x);
    void remove(const Eigen::VectorXd& x);
    GaussianSuffStats combined(const GaussianSuffStats& other) const;

    Eigen::Index dim() const { return sum.size(); }
};

/// Normal-inverse-Wishart prior for a Gaussian component. Stored in natural
/// form (kappa, dof, kappa*mean, scale + kappa*mean*mean^T) so that posterior
/// updates are pure additions of sufficient statistics; the canonical
/// parameters are exposed through accessors.
class NiwParams {
public:
    NiwParams(Eigen::VectorXd mean0, double kappa, double dof, Eigen::MatrixXd scale_matrix);

    Eigen::Index dim() const { return scaled_mean_.size(); }
    double kappa() const { return kappa_; }
    double dof() const { return dof_; }
    Eigen::VectorXd mean0() const { return scaled_mean_ / kappa_; }
    Eigen::MatrixXd scale_matrix() const;

    NiwParams posterior(const GaussianSuffStats& stats) const;

    /// Posterior predictive density (multivariate Student-t) of one point.
    double log_predictive(const Eigen::VectorXd& x) const;

    /// log marginal likelihood of the data summarized by stats.
    double log_marginal_likelihood(const GaussianSuffStats& stats) const;

private:
    NiwParams() = default;

    double kappa_ = 0.0;
    double dof_ = 0.0;
    Eigen::VectorXd scaled_mean_;
    Eigen::MatrixXd scatter_;
};

/// log of the multivariate gamma function Gamma_D(a).
double log_multigamma(double a, int d);

}  // namespace mpgm
