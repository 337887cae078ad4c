#include "hgmm/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <exception>
#include <limits>
#include <utility>

#include "hgmm/dataset.hpp"

namespace hgmm {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kCollapseFraction = 1e-8;
constexpr double kWeightFloor = 1e-8;

double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

}  // namespace

double BackgroundMixture::prior(std::size_t column) const {
  if (column == 0) return background_enabled ? alpha : 0.0;
  return (1.0 - alpha) * weights(static_cast<Eigen::Index>(column - 1));
}

void BackgroundMixture::check_invariants() const {
  if (components.empty() || weights.size() != static_cast<Eigen::Index>(components.size()))
    throw std::logic_error("mixture needs one weight per component");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::logic_error("alpha outside [0, 1]");
  if (!background_enabled && alpha != 0.0)
    throw std::logic_error("alpha must be 0 with the background disabled");
  if ((weights.array() < 0.0).any() || (weights.array() > 1.0).any())
    throw std::logic_error("weight outside [0, 1]");
  if (std::abs(weights.sum() - 1.0) > 1e-9) throw std::logic_error("weights do not sum to 1");
  for (const auto& c : components)
    if (c.dim() != background.dim()) throw std::logic_error("component dimension mismatch");
}

BackgroundMixture initialize(const Matrix& data, const GaussianComponent& background,
                             std::size_t n, bool background_enabled, std::mt19937_64& rng) {
  if (n < 1) throw std::invalid_argument("need at least one component");
  if (data.cols() != background.dim()) throw std::invalid_argument("dimension mismatch");
  std::vector<Eigen::Index> pool = distinct_row_indices(data);
  if (pool.size() < n) throw std::invalid_argument("insufficient distinct points");

  // Partial Fisher-Yates: the first n slots become a uniform sample.
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }

  BackgroundMixture mix{
      .alpha = background_enabled ? 1.0 / static_cast<double>(n + 1) : 0.0,
      .background = background,
      .weights = Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)),
      .components = {},
      .background_enabled = background_enabled,
  };
  mix.components.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    mix.components.emplace_back(data.row(pool[i]).transpose(), background.covariance());
  return mix;
}

double mixture_log_density(const BackgroundMixture& mix, const Eigen::Ref<const Vector>& x) {
  if (x.size() != mix.dim()) throw std::invalid_argument("dimension mismatch");
  const std::size_t count = mix.size() + 1;
  std::vector<double> t(count);
  double peak = kNegInf;
  for (std::size_t j = 0; j < count; ++j) {
    const double p = mix.prior(j);
    if (p <= 0.0) {
      t[j] = kNegInf;
      continue;
    }
    const auto& c = j == 0 ? mix.background : mix.components[j - 1];
    t[j] = std::log(p) + c.log_density(x);
    peak = std::max(peak, t[j]);
  }
  if (peak == kNegInf) return kNegInf;
  double sum = 0.0;
  for (std::size_t j = 0; j < count; ++j)
    if (t[j] != kNegInf) sum += std::exp(t[j] - peak);
  return peak + std::log(sum);
}

Matrix weighted_log_densities(const BackgroundMixture& mix, const Matrix& data) {
  if (data.cols() != mix.dim()) throw std::invalid_argument("dimension mismatch");
  const auto cols = static_cast<Eigen::Index>(mix.size() + 1);
  Matrix out(data.rows(), cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    const double lp = safe_log(mix.prior(static_cast<std::size_t>(j)));
    if (lp == kNegInf) {
      out.col(j).setConstant(kNegInf);
      continue;
    }
    const auto& c = j == 0 ? mix.background : mix.components[static_cast<std::size_t>(j - 1)];
    out.col(j) = c.log_density_rows(data).array() + lp;
  }
  return out;
}

EStep expectation(const BackgroundMixture& mix, const Matrix& data) {
  EStep out;
  out.responsibilities = weighted_log_densities(mix, data);
  auto& r = out.responsibilities;
  for (Eigen::Index t = 0; t < r.rows(); ++t) {
    const double peak = r.row(t).maxCoeff();
    if (peak == kNegInf || !std::isfinite(peak))
      throw std::runtime_error("unrepresentable density");
    double sum = 0.0;
    for (Eigen::Index j = 0; j < r.cols(); ++j) {
      const double e = r(t, j) == kNegInf ? 0.0 : std::exp(r(t, j) - peak);
      r(t, j) = e;
      sum += e;
    }
    r.row(t) /= sum;
    out.log_likelihood += peak + std::log(sum);
  }
  return out;
}

Responsibilities e_step(const BackgroundMixture& mix, const Matrix& data) {
  return expectation(mix, data).responsibilities;
}

BackgroundMixture m_step(const Matrix& data, const Responsibilities& resp,
                         const BackgroundMixture& previous) {
  const auto n = static_cast<Eigen::Index>(previous.size());
  if (resp.rows() != data.rows() || resp.cols() != n + 1)
    throw std::invalid_argument("responsibility shape does not match data and mixture");
  const double m = static_cast<double>(data.rows());
  if (data.rows() == 0) return previous;

  const Vector mass = resp.colwise().sum().transpose();
  const double component_mass = mass.tail(n).sum();
  if (!(component_mass > 0.0)) throw BackgroundTakeover();

  BackgroundMixture next{
      .alpha = previous.background_enabled ? mass(0) / m : 0.0,
      .background = previous.background,
      .weights = Vector(n),
      .components = {},
      .background_enabled = previous.background_enabled,
  };
  next.alpha = std::clamp(next.alpha, 0.0, 1.0);
  next.components.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = mass(i + 1);
    const auto& prev = previous.components[static_cast<std::size_t>(i)];
    if (s < kCollapseFraction * m) {
      next.components.push_back(prev);
      next.weights(i) = std::max(s / component_mass, kWeightFloor);
      continue;
    }
    const Vector r = resp.col(i + 1);
    const Moments moments = estimate_moments(data, r);
    GaussianComponent candidate = GaussianComponent::from_moments(moments);
    // A ridged covariance is no longer the maximizer; keep the previous
    // parameters when they score better so the likelihood cannot drop.
    if (candidate.covariance() != moments.covariance &&
        r.dot(candidate.log_density_rows(data)) < r.dot(prev.log_density_rows(data)))
      candidate = prev;
    next.components.push_back(std::move(candidate));
    next.weights(i) = s / component_mass;
  }
  next.weights /= next.weights.sum();
  return next;
}

double log_likelihood(const BackgroundMixture& mix, const Matrix& data) {
  if (data.rows() == 0) return 0.0;
  const Matrix terms = weighted_log_densities(mix, data);
  double total = 0.0;
  for (Eigen::Index t = 0; t < terms.rows(); ++t) {
    const double peak = terms.row(t).maxCoeff();
    if (peak == kNegInf) return kNegInf;
    double sum = 0.0;
    for (Eigen::Index j = 0; j < terms.cols(); ++j)
      if (terms(t, j) != kNegInf) sum += std::exp(terms(t, j) - peak);
    total += peak + std::log(sum);
  }
  return total;
}

EmResult run_em(const Matrix& data, const GaussianComponent& background, std::size_t n,
                std::size_t iters, bool background_enabled, std::mt19937_64& rng) {
  EmResult result{.mixture = initialize(data, background, n, background_enabled, rng),
                  .log_likelihood = 0.0,
                  .trace = {},
                  .background_takeover = false};
  result.trace.reserve(iters + 1);
  for (std::size_t it = 0; it < iters; ++it) {
    EStep e = expectation(result.mixture, data);
    result.trace.push_back(e.log_likelihood);
    try {
      result.mixture = m_step(data, e.responsibilities, result.mixture);
    } catch (const BackgroundTakeover&) {
      result.background_takeover = true;
      result.log_likelihood = e.log_likelihood;
      return result;
    }
  }
  result.log_likelihood = log_likelihood(result.mixture, data);
  result.trace.push_back(result.log_likelihood);
  return result;
}

EmResult fit_best_of(const Matrix& data, const GaussianComponent& background, std::size_t n,
                     std::size_t iters, std::size_t restarts, bool background_enabled,
                     std::mt19937_64& rng) {
  if (restarts < 1) throw std::invalid_argument("need at least one restart");
  std::optional<EmResult> best;
  std::exception_ptr last_error;
  for (std::size_t r = 0; r < restarts; ++r) {
    try {
      EmResult run = run_em(data, background, n, iters, background_enabled, rng);
      if (!best || run.log_likelihood > best->log_likelihood) best = std::move(run);
    } catch (const std::exception&) {
      last_error = std::current_exception();
    }
  }
  if (!best) std::rethrow_exception(last_error);
  return std::move(*best);
}

Assignment hard_assign(const BackgroundMixture& mix, const Matrix& data) {
  const Matrix terms = weighted_log_densities(mix, data);
  Assignment labels(static_cast<std::size_t>(data.rows()), 1);
  for (Eigen::Index t = 0; t < terms.rows(); ++t) {
    int best = -1;
    double best_value = kNegInf;
    for (Eigen::Index j = 0; j < terms.cols(); ++j) {
      if (terms(t, j) == kNegInf) continue;
      if (best < 0 || terms(t, j) > best_value) {
        best = static_cast<int>(j);
        best_value = terms(t, j);
      }
    }
    labels[static_cast<std::size_t>(t)] = best < 0 ? 1 : best;
  }
  return labels;
}

}  // namespace hgmm
