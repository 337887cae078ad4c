#ifndef HGMM_GAUSSIAN_HPP
#define HGMM_GAUSSIAN_HPP

#include <optional>

#include <Eigen/Core>

namespace hgmm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Sample mean and maximum-likelihood covariance.
struct Moments {
  Vector mean;
  Matrix covariance;
};

/// Weighted (or unweighted) moments of the rows of `points`.
///
/// The covariance divides by the total weight (or the row count), never by
/// N - 1, so the result matches an EM M-step on the same weights.
/// Throws std::invalid_argument("empty sample") when `points` has no rows and
/// std::invalid_argument("degenerate weights") when the weights sum to zero.
Moments estimate_moments(const Matrix& points,
                         const std::optional<Vector>& weights = std::nullopt);

/// Adds the smallest ridge eps * I from the schedule
/// eps_0 = max(1e-6 * mean(diag), 1e-10), eps_{k+1} = 10 * eps_k
/// that makes `covariance` Cholesky-factorizable. Inputs that already
/// factorize are returned unchanged, so regularize is idempotent.
/// Throws std::runtime_error("irreparably singular covariance") after 20
/// escalations.
Matrix regularize(const Matrix& covariance);

/// True when `covariance` admits a numerically usable Cholesky factor: every
/// pivot is positive and above 1e-12 of the largest diagonal entry.
bool is_factorizable(const Matrix& covariance);

/// N(mean, covariance) with a cached lower Cholesky factor.
///
/// Construction regularizes the covariance, so every instance is usable for
/// density evaluation. Instances are immutable.
class GaussianComponent {
 public:
  GaussianComponent(Vector mean, const Matrix& covariance);

  /// Rebuilds a component from an already factorizable covariance without
  /// regularizing it again (used by deserialization). Throws if the
  /// covariance does not factorize.
  static GaussianComponent from_exact(Vector mean, Matrix covariance);

  static GaussianComponent from_moments(const Moments& moments) {
    return GaussianComponent(moments.mean, moments.covariance);
  }

  Eigen::Index dim() const { return mean_.size(); }
  const Vector& mean() const { return mean_; }
  const Matrix& covariance() const { return covariance_; }
  const Matrix& chol_factor() const { return chol_; }
  double log_det() const { return log_det_; }

  /// -d/2 ln(2 pi) - log_det/2 - (x - mean)' Sigma^-1 (x - mean) / 2, via a
  /// triangular solve. Throws std::invalid_argument on dimension mismatch.
  double log_density(const Eigen::Ref<const Vector>& x) const;

  /// log_density of every row of `points`.
  Vector log_density_rows(const Matrix& points) const;

 private:
  struct Exact {};
  GaussianComponent(Exact, Vector mean, Matrix covariance);

  Vector mean_;
  Matrix covariance_;
  Matrix chol_;
  double log_det_ = 0.0;
};

}  // namespace hgmm

#endif  // HGMM_GAUSSIAN_HPP
