#ifndef HGMM_MIXTURE_HPP
#define HGMM_MIXTURE_HPP

#include <random>
#include <stdexcept>
#include <vector>

#include "hgmm/gaussian.hpp"

namespace hgmm {

/// Gaussian mixture with an extra frozen background component:
///
///   p(x) = alpha * N(x; background) + sum_i (1 - alpha) * w_i * N(x; component_i)
///
/// Only alpha, the weights and the estimated components are updated by EM;
/// the background comes from the caller and is never re-estimated.
struct BackgroundMixture {
  double alpha = 0.0;
  GaussianComponent background;
  Vector weights;
  std::vector<GaussianComponent> components;
  bool background_enabled = true;

  std::size_t size() const { return components.size(); }
  Eigen::Index dim() const { return background.dim(); }

  /// Prior of column j: column 0 is the background, 1..n the components.
  double prior(std::size_t column) const;

  /// Throws std::logic_error if a mixture invariant is broken.
  void check_invariants() const;
};

/// m x (n + 1) posterior matrix; column 0 belongs to the background.
using Responsibilities = Matrix;

/// Column index produced by hard_assign: 0 is the background, 1..n components.
inline constexpr int kBackgroundLabel = 0;
using Assignment = std::vector<int>;

/// Raised by m_step when the estimated components receive no mass at all.
class BackgroundTakeover : public std::runtime_error {
 public:
  BackgroundTakeover() : std::runtime_error("all data claimed by background") {}
};

/// Means are n distinct rows sampled without replacement, every covariance
/// is a copy of the background covariance, and all n + 1 priors are equal
/// (alpha = 0 and w_i = 1/n when the background is disabled).
/// Throws std::invalid_argument("insufficient distinct points").
BackgroundMixture initialize(const Matrix& data, const GaussianComponent& background,
                             std::size_t n, bool background_enabled, std::mt19937_64& rng);

double mixture_log_density(const BackgroundMixture& mix, const Eigen::Ref<const Vector>& x);

/// log(prior_j) + log N(x_t; component_j) for every row and column; zero
/// priors give -inf.
Matrix weighted_log_densities(const BackgroundMixture& mix, const Matrix& data);

struct EStep {
  Responsibilities responsibilities;
  double log_likelihood = 0.0;
};

/// Posterior responsibilities plus the data log-likelihood under `mix`,
/// both from one log-sum-exp pass.
EStep expectation(const BackgroundMixture& mix, const Matrix& data);

Responsibilities e_step(const BackgroundMixture& mix, const Matrix& data);

/// Maximization step with the background frozen. Components whose
/// responsibility mass falls below 1e-8 * m keep their previous parameters
/// and get a weight floor of 1e-8 before renormalization. A component whose
/// covariance needed a ridge also keeps its previous parameters when those
/// give a higher responsibility-weighted log-density.
BackgroundMixture m_step(const Matrix& data, const Responsibilities& resp,
                         const BackgroundMixture& previous);

double log_likelihood(const BackgroundMixture& mix, const Matrix& data);

struct EmResult {
  BackgroundMixture mixture;
  double log_likelihood = 0.0;
  /// Log-likelihood of the initial mixture followed by the value after every
  /// completed iteration.
  std::vector<double> trace;
  /// True when an M-step found no mass on the estimated components; the
  /// mixture is the last one before that step.
  bool background_takeover = false;
};

/// initialize + exactly `iters` EM iterations, with no convergence exit.
EmResult run_em(const Matrix& data, const GaussianComponent& background, std::size_t n,
                std::size_t iters, bool background_enabled, std::mt19937_64& rng);

/// Best of `restarts` independent run_em calls by final log-likelihood;
/// the earliest restart wins ties.
EmResult fit_best_of(const Matrix& data, const GaussianComponent& background, std::size_t n,
                     std::size_t iters, std::size_t restarts, bool background_enabled,
                     std::mt19937_64& rng);

/// Argmax column of prior * density per row, lowest index on ties.
Assignment hard_assign(const BackgroundMixture& mix, const Matrix& data);

}  // namespace hgmm

#endif  // HGMM_MIXTURE_HPP
