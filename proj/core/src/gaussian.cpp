#include "hgmm/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include <Eigen/Cholesky>

namespace hgmm {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // ln(2 pi)
constexpr double kPivotFloor = 1e-12;
constexpr int kMaxEscalations = 20;

// Lower Cholesky factor or nullopt when the matrix is not numerically SPD.
std::optional<Matrix> try_cholesky(const Matrix& a) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Matrix l = llt.matrixL();
  const double scale = a.diagonal().maxCoeff();
  const double floor = kPivotFloor * std::max(scale, 0.0);
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    const double pivot = l(i, i) * l(i, i);
    if (!(pivot > floor) || !std::isfinite(pivot)) return std::nullopt;
  }
  return l;
}

}  // namespace

Moments estimate_moments(const Matrix& points, const std::optional<Vector>& weights) {
  if (points.rows() == 0) throw std::invalid_argument("empty sample");
  if (points.cols() == 0) throw std::invalid_argument("dimension must be at least 1");

  Vector w;
  if (weights) {
    if (weights->size() != points.rows())
      throw std::invalid_argument("weights length does not match point count");
    if ((weights->array() < 0.0).any())
      throw std::invalid_argument("weights must be nonnegative");
    w = *weights;
  } else {
    w = Vector::Ones(points.rows());
  }
  const double total = w.sum();
  if (!(total > 0.0)) throw std::invalid_argument("degenerate weights");

  Moments m;
  m.mean = (points.transpose() * w) / total;
  const Matrix centered = points.rowwise() - m.mean.transpose();
  m.covariance = (centered.transpose() * w.asDiagonal() * centered) / total;
  // Force exact symmetry; the product above can differ in the last ulp.
  m.covariance = 0.5 * (m.covariance + m.covariance.transpose()).eval();
  return m;
}

bool is_factorizable(const Matrix& covariance) {
  return try_cholesky(covariance).has_value();
}

Matrix regularize(const Matrix& covariance) {
  if (covariance.rows() != covariance.cols() || covariance.rows() == 0)
    throw std::invalid_argument("covariance must be a non-empty square matrix");
  if (!covariance.allFinite()) throw std::runtime_error("irreparably singular covariance");
  if (is_factorizable(covariance)) return covariance;

  double eps = std::max(1e-6 * covariance.diagonal().mean(), 1e-10);
  const auto identity = Matrix::Identity(covariance.rows(), covariance.cols());
  for (int step = 0; step <= kMaxEscalations; ++step, eps *= 10.0) {
    Matrix candidate = covariance + eps * identity;
    if (is_factorizable(candidate)) return candidate;
  }
  throw std::runtime_error("irreparably singular covariance");
}

GaussianComponent::GaussianComponent(Vector mean, const Matrix& covariance)
    : GaussianComponent(Exact{}, std::move(mean), regularize(covariance)) {}

GaussianComponent GaussianComponent::from_exact(Vector mean, Matrix covariance) {
  return GaussianComponent(Exact{}, std::move(mean), std::move(covariance));
}

GaussianComponent::GaussianComponent(Exact, Vector mean, Matrix covariance)
    : mean_(std::move(mean)), covariance_(std::move(covariance)) {
  if (mean_.size() == 0) throw std::invalid_argument("dimension must be at least 1");
  if (covariance_.rows() != mean_.size() || covariance_.cols() != mean_.size())
    throw std::invalid_argument("covariance shape does not match mean");
  auto l = try_cholesky(covariance_);
  if (!l) throw std::runtime_error("covariance is not positive definite");
  chol_ = std::move(*l);
  log_det_ = 2.0 * chol_.diagonal().array().log().sum();
}

double GaussianComponent::log_density(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != mean_.size()) throw std::invalid_argument("dimension mismatch");
  const Vector z = chol_.triangularView<Eigen::Lower>().solve(x - mean_);
  const double d = static_cast<double>(mean_.size());
  return -0.5 * d * kLog2Pi - 0.5 * log_det_ - 0.5 * z.squaredNorm();
}

Vector GaussianComponent::log_density_rows(const Matrix& points) const {
  if (points.cols() != mean_.size()) throw std::invalid_argument("dimension mismatch");
  Matrix centered = (points.rowwise() - mean_.transpose()).transpose();
  chol_.triangularView<Eigen::Lower>().solveInPlace(centered);
  const double d = static_cast<double>(mean_.size());
  const double constant = -0.5 * d * kLog2Pi - 0.5 * log_det_;
  return (constant - 0.5 * centered.colwise().squaredNorm().array()).matrix().transpose();
}

}  // namespace hgmm
