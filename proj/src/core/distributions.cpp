#include "mpgm/core/distributions.hpp"

#include "mpgm/core/logspace.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mpgm {

namespace {
constexpr double kSumTol = 1e-9;
}

CategoricalDist::CategoricalDist(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw std::invalid_argument("CategoricalDist: K must be >= 1");
    double sum = 0.0;
    for (double p : probs_) {
        if (!(p >= 0.0)) throw std::invalid_argument("CategoricalDist: negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kSumTol)
        throw std::invalid_argument("CategoricalDist: probabilities sum to " + std::to_string(sum));
}

CategoricalDist CategoricalDist::uniform(std::size_t k) {
    return CategoricalDist(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

CategoricalDist CategoricalDist::point_mass(std::size_t k, std::size_t at) {
    if (at >= k) throw std::invalid_argument("point_mass: index out of range");
    std::vector<double> p(k, 0.0);
    p[at] = 1.0;
    return CategoricalDist(std::move(p));
}

CategoricalDist CategoricalDist::normalized(std::vector<double> weights) {
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("normalized: negative weight");
        sum += w;
    }
    if (sum <= 0.0) throw std::invalid_argument("normalized: zero total mass");
    for (double& w : weights) w /= sum;
    return CategoricalDist(std::move(weights));
}

CategoricalDist CategoricalDist::from_log_weights(std::span<const double> logw) {
    auto p = normalized_from_log(logw);
    double sum = 0.0;
    for (double v : p) sum += v;
    if (sum <= 0.0) throw std::invalid_argument("from_log_weights: zero total mass");
    return CategoricalDist(std::move(p));
}

double CategoricalDist::log_density(std::size_t k) const {
    if (k >= probs_.size()) throw std::domain_error("CategoricalDist: index out of support");
    return probs_[k] > 0.0 ? std::log(probs_[k]) : kNegInf;
}

double CategoricalDist::entropy() const {
    double h = 0.0;
    for (double p : probs_)
        if (p > 0.0) h -= p * std::log(p);
    return h;
}

DirichletParams::DirichletParams(std::vector<double> alpha) : alpha_(std::move(alpha)) {
    if (alpha_.empty()) throw std::invalid_argument("DirichletParams: empty alpha");
    for (double a : alpha_)
        if (!(a > 0.0)) throw std::invalid_argument("DirichletParams: alpha entries must be > 0");
}

DirichletParams DirichletParams::symmetric(std::size_t k, double alpha) {
    return DirichletParams(std::vector<double>(k, alpha));
}

double DirichletParams::log_density(std::span<const double> x) const {
    if (x.size() != alpha_.size()) throw std::domain_error("Dirichlet: dimension mismatch");
    double sum = 0.0;
    for (double v : x) {
        if (!(v >= 0.0)) throw std::domain_error("Dirichlet: point outside the simplex");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kSumTol) throw std::domain_error("Dirichlet: point does not sum to 1");
    double alpha0 = 0.0, lp = 0.0;
    for (std::size_t i = 0; i < alpha_.size(); ++i) {
        alpha0 += alpha_[i];
        lp -= std::lgamma(alpha_[i]);
        if (x[i] > 0.0) {
            lp += (alpha_[i] - 1.0) * std::log(x[i]);
        } else if (alpha_[i] > 1.0) {
            return kNegInf;  // density vanishes on the boundary
        } else if (alpha_[i] < 1.0) {
            throw std::domain_error("Dirichlet: density diverges at simplex boundary");
        }
    }
    return lp + std::lgamma(alpha0);
}

DirichletParams DirichletParams::posterior(std::span<const double> counts) const {
    if (counts.size() != alpha_.size()) throw std::invalid_argument("Dirichlet posterior: dimension mismatch");
    std::vector<double> out(alpha_.size());
    for (std::size_t i = 0; i < alpha_.size(); ++i) {
        if (!(counts[i] >= 0.0)) throw std::invalid_argument("Dirichlet posterior: negative count");
        out[i] = alpha_[i] + counts[i];
    }
    return DirichletParams(std::move(out));
}

std::vector<double> DirichletParams::mean() const {
    double alpha0 = 0.0;
    for (double a : alpha_) alpha0 += a;
    std::vector<double> m(alpha_.size());
    for (std::size_t i = 0; i < alpha_.size(); ++i) m[i] = alpha_[i] / alpha0;
    return m;
}

GaussianParams::GaussianParams(Eigen::VectorXd mean, Eigen::MatrixXd covariance)
    : mean_(std::move(mean)), cov_(std::move(covariance)) {
    if (cov_.rows() != cov_.cols() || cov_.rows() != mean_.size())
        throw std::invalid_argument("GaussianParams: dimension mismatch");
    if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-9)
        throw std::invalid_argument("GaussianParams: covariance not symmetric");
    llt_.compute(cov_);
    if (llt_.info() != Eigen::Success)
        throw std::invalid_argument("GaussianParams: covariance not positive definite");
    log_det_ = 2.0 * llt_.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

double GaussianParams::log_density(const Eigen::VectorXd& x) const {
    if (x.size() != mean_.size()) throw std::domain_error("Gaussian: dimension mismatch");
    const Eigen::VectorXd d = x - mean_;
    const double maha = d.dot(llt_.solve(d));
    return -0.5 * (static_cast<double>(dim()) * std::log(2.0 * M_PI) + log_det_ + maha);
}

GaussianSuffStats::GaussianSuffStats(Eigen::Index dim)
    : sum(Eigen::VectorXd::Zero(dim)), sum_outer(Eigen::MatrixXd::Zero(dim, dim)) {}

GaussianSuffStats GaussianSuffStats::of(const Eigen::MatrixXd& rows) {
    GaussianSuffStats s(rows.cols());
    for (Eigen::Index i = 0; i < rows.rows(); ++i) s.add(rows.row(i).transpose());
    return s;
}

void GaussianSuffStats::add(const Eigen::VectorXd& x) {
    if (x.size() != sum.size()) throw std::invalid_argument("GaussianSuffStats: dimension mismatch");
    n += 1.0;
    sum += x;
    sum_outer += x * x.transpose();
}

void GaussianSuffStats::remove(const Eigen::VectorXd& x) {
    if (x.size() != sum.size()) throw std::invalid_argument("GaussianSuffStats: dimension mismatch");
    n -= 1.0;
    sum -= x;
    sum_outer -= x * x.transpose();
}

GaussianSuffStats GaussianSuffStats::combined(const GaussianSuffStats& other) const {
    if (other.dim() != dim()) throw std::invalid_argument("GaussianSuffStats: dimension mismatch");
    GaussianSuffStats out(dim());
    out.n = n + other.n;
    out.sum = sum + other.sum;
    out.sum_outer = sum_outer + other.sum_outer;
    return out;
}

NiwParams::NiwParams(Eigen::VectorXd mean0, double kappa, double dof, Eigen::MatrixXd scale_matrix) {
    const Eigen::Index d = mean0.size();
    if (scale_matrix.rows() != d || scale_matrix.cols() != d)
        throw std::invalid_argument("NiwParams: dimension mismatch");
    if (!(kappa > 0.0)) throw std::invalid_argument("NiwParams: kappa must be > 0");
    if (!(dof > static_cast<double>(d) - 1.0))
        throw std::invalid_argument("NiwParams: dof must exceed D - 1");
    Eigen::LLT<Eigen::MatrixXd> llt(scale_matrix);
    if ((scale_matrix - scale_matrix.transpose()).cwiseAbs().maxCoeff() > 1e-9 ||
        llt.info() != Eigen::Success)
        throw std::invalid_argument("NiwParams: scale matrix must be SPD");
    kappa_ = kappa;
    dof_ = dof;
    scaled_mean_ = kappa * mean0;
    scatter_ = scale_matrix + scaled_mean_ * mean0.transpose();
}

Eigen::MatrixXd NiwParams::scale_matrix() const {
    return scatter_ - scaled_mean_ * scaled_mean_.transpose() / kappa_;
}

NiwParams NiwParams::posterior(const GaussianSuffStats& stats) const {
    if (stats.dim() != dim()) throw std::invalid_argument("NiwParams posterior: dimension mismatch");
    if (stats.n < 0.0) throw std::invalid_argument("NiwParams posterior: negative count");
    NiwParams out;
    out.kappa_ = kappa_ + stats.n;
    out.dof_ = dof_ + stats.n;
    out.scaled_mean_ = scaled_mean_ + stats.sum;
    out.scatter_ = scatter_ + stats.sum_outer;
    return out;
}

namespace {

double log_det_spd(const Eigen::MatrixXd& m) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) throw std::runtime_error("log_det_spd: matrix not SPD");
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace

double NiwParams::log_predictive(const Eigen::VectorXd& x) const {
    const int d = static_cast<int>(dim());
    if (x.size() != d) throw std::domain_error("NiwParams predictive: dimension mismatch");
    const Eigen::VectorXd mu = mean0();
    const Eigen::MatrixXd psi = scale_matrix();
    const double v = dof_ - d + 1.0;  // Student-t degrees of freedom
    const Eigen::MatrixXd sigma = psi * ((kappa_ + 1.0) / (kappa_ * v));
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) throw std::runtime_error("NiwParams predictive: scale not SPD");
    const Eigen::VectorXd diff = x - mu;
    const double maha = diff.dot(llt.solve(diff));
    const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    return std::lgamma(0.5 * (v + d)) - std::lgamma(0.5 * v) - 0.5 * d * std::log(v * M_PI) -
           0.5 * log_det - 0.5 * (v + d) * std::log1p(maha / v);
}

double NiwParams::log_marginal_likelihood(const GaussianSuffStats& stats) const {
    const int d = static_cast<int>(dim());
    const NiwParams post = posterior(stats);
    return -0.5 * stats.n * d * std::log(M_PI) +
           0.5 * d * (std::log(kappa_) - std::log(post.kappa_)) +
           0.5 * dof_ * log_det_spd(scale_matrix()) -
           0.5 * post.dof_ * log_det_spd(post.scale_matrix()) +
           log_multigamma(0.5 * post.dof_, d) - log_multigamma(0.5 * dof_, d);
}

double log_multigamma(double a, int d) {
    double r = 0.25 * d * (d - 1) * std::log(M_PI);
    for (int j = 1; j <= d; ++j) r += std::lgamma(a + 0.5 * (1.0 - j));
    return r;
}

}  // namespace mpgm
