#include "hgmm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hgmm {

GroundTruth GroundTruth::from_dataset(const Dataset& ds) {
  if (!ds.has_labels()) throw std::invalid_argument("dataset has no class labels");
  return GroundTruth{ds.labels, ds.noise};
}

std::string_view normalization_name(FNormalization norm) {
  return norm == FNormalization::kAllObjects ? "all" : "labeled";
}

FNormalization parse_normalization(std::string_view name) {
  if (name == "all") return FNormalization::kAllObjects;
  if (name == "labeled") return FNormalization::kLabeledObjects;
  throw std::invalid_argument("unknown F normalization '" + std::string(name) +
                              "' (expected all or labeled)");
}

FMeasureReport f_measure(const Dendrogram& tree, const GroundTruth& truth, FNormalization norm) {
  const std::size_t m = truth.labels.size();
  if (truth.noise.size() != m) throw std::invalid_argument("noise flags do not match labels");
  if (m != tree.data_size) throw std::invalid_argument("labels do not cover the tree's instances");

  std::vector<std::string> names;
  std::vector<int> class_of(m, -1);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& l = truth.labels[i];
    if (!l) {
      if (!truth.noise[i])
        throw std::invalid_argument("instance " + std::to_string(i) + " has neither class nor noise flag");
      continue;
    }
    auto it = std::find(names.begin(), names.end(), *l);
    if (it == names.end()) it = names.insert(names.end(), *l);
    class_of[i] = static_cast<int>(it - names.begin());
  }
  if (names.empty()) throw std::invalid_argument("no classes in ground truth");
  const std::size_t classes = names.size();

  // Subtree sizes and class counts; children always have larger ids.
  const std::size_t nodes = tree.nodes.size();
  std::vector<double> group_size(nodes, 0.0);
  std::vector<std::vector<double>> counts(nodes, std::vector<double>(classes, 0.0));
  for (std::size_t id = 0; id < nodes; ++id) {
    for (Eigen::Index idx : tree.nodes[id].attached) {
      group_size[id] += 1.0;
      const int c = class_of[static_cast<std::size_t>(idx)];
      if (c >= 0) counts[id][static_cast<std::size_t>(c)] += 1.0;
    }
  }
  for (std::size_t id = nodes; id-- > 0;) {
    const auto& parent = tree.nodes[id].parent;
    if (!parent) continue;
    if (*parent >= id) throw std::invalid_argument("node ids are not in creation order");
    group_size[*parent] += group_size[id];
    for (std::size_t c = 0; c < classes; ++c) counts[*parent][c] += counts[id][c];
  }

  std::vector<double> class_size(classes, 0.0);
  for (int c : class_of)
    if (c >= 0) class_size[static_cast<std::size_t>(c)] += 1.0;

  FMeasureReport report;
  report.normalization = norm;
  double weighted = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    ClassScore best;
    for (std::size_t id = 0; id < nodes; ++id) {
      const double hits = counts[id][c];
      if (hits == 0.0 || group_size[id] == 0.0) continue;
      const double precision = hits / group_size[id];
      const double recall = hits / class_size[c];
      const double f = 2.0 * precision * recall / (precision + recall);
      if (f > best.best_f) best = {f, id};
    }
    report.per_class[names[c]] = best;
    report.class_sizes[names[c]] = static_cast<std::size_t>(class_size[c]);
    weighted += class_size[c] * best.best_f;
  }
  const double labeled = std::accumulate(class_size.begin(), class_size.end(), 0.0);
  const double denominator = norm == FNormalization::kAllObjects ? static_cast<double>(m) : labeled;
  report.total_objects = static_cast<std::size_t>(denominator);
  report.overall = weighted / denominator;
  return report;
}

std::string_view alternative_name(Alternative alt) {
  switch (alt) {
    case Alternative::kTwoSided: return "two-sided";
    case Alternative::kGreater: return "greater";
    case Alternative::kLess: return "less";
  }
  return "?";
}

namespace {

// Coefficients of the Gaussian binomial [nx + ny choose nx]_q: entry u counts
// the orderings whose U statistic equals u.
std::vector<double> u_null_counts(std::size_t nx, std::size_t ny) {
  const std::size_t a = std::min(nx, ny);
  const std::size_t b = std::max(nx, ny);
  std::vector<double> poly(a * b + 1, 0.0);
  poly[0] = 1.0;
  std::size_t degree = 0;
  // [b + i choose i] = [b + i - 1 choose i - 1] * (1 - q^(b+i)) / (1 - q^i)
  for (std::size_t i = 1; i <= a; ++i) {
    const std::size_t shift = b + i;
    const std::size_t new_degree = degree + b;
    for (std::size_t k = std::min(new_degree + i, poly.size() - 1) + 1; k-- > shift;)
      poly[k] -= poly[k - shift];
    for (std::size_t k = i; k < poly.size(); ++k) poly[k] += poly[k - i];
    degree = new_degree;
  }
  return poly;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

double exact_u_cdf(double u, std::size_t nx, std::size_t ny) {
  if (u < 0.0) return 0.0;
  const auto counts = u_null_counts(nx, ny);
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  const auto upto = static_cast<std::size_t>(std::floor(u + 1e-9));
  if (upto + 1 >= counts.size()) return 1.0;
  double acc = 0.0;
  for (std::size_t k = 0; k <= upto; ++k) acc += counts[k];
  return acc / total;
}

UTestResult mann_whitney_u(std::span<const double> xs, std::span<const double> ys,
                           Alternative alternative, double alpha) {
  if (xs.empty() || ys.empty()) throw std::invalid_argument("empty sample");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");

  const std::size_t nx = xs.size();
  const std::size_t ny = ys.size();
  const std::size_t total = nx + ny;
  std::vector<std::pair<double, bool>> pooled;  // (value, from xs)
  pooled.reserve(total);
  for (double v : xs) pooled.emplace_back(v, true);
  for (double v : ys) pooled.emplace_back(v, false);
  std::sort(pooled.begin(), pooled.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  double rank_sum_x = 0.0;
  double tie_term = 0.0;  // sum of t^3 - t over tie groups
  bool ties = false;
  for (std::size_t i = 0; i < total;) {
    std::size_t j = i + 1;
    while (j < total && pooled[j].first == pooled[i].first) ++j;
    const double t = static_cast<double>(j - i);
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      if (pooled[k].second) rank_sum_x += midrank;
    if (j - i > 1) {
      ties = true;
      tie_term += t * t * t - t;
    }
    i = j;
  }

  UTestResult res;
  res.alternative = alternative;
  res.alpha = alpha;
  const double dnx = static_cast<double>(nx);
  const double dny = static_cast<double>(ny);
  res.u_statistic = rank_sum_x - dnx * (dnx + 1.0) / 2.0;
  const double u = res.u_statistic;

  if (!ties && std::min(nx, ny) <= kExactUThreshold) {
    res.exact = true;
    const double lower = exact_u_cdf(u, nx, ny);              // P(U <= u)
    const double upper = 1.0 - exact_u_cdf(u - 1.0, nx, ny);  // P(U >= u)
    switch (alternative) {
      case Alternative::kGreater: res.p_value = upper; break;
      case Alternative::kLess: res.p_value = lower; break;
      case Alternative::kTwoSided: res.p_value = std::min(1.0, 2.0 * std::min(lower, upper)); break;
    }
  } else {
    const double n = static_cast<double>(total);
    const double mean = dnx * dny / 2.0;
    const double variance = dnx * dny / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (!(variance > 0.0)) {
      res.p_value = 1.0;
    } else {
      const double sd = std::sqrt(variance);
      switch (alternative) {
        case Alternative::kGreater: res.p_value = normal_sf((u - mean - 0.5) / sd); break;
        case Alternative::kLess: res.p_value = 1.0 - normal_sf((u - mean + 0.5) / sd); break;
        case Alternative::kTwoSided:
          res.p_value = std::min(1.0, 2.0 * normal_sf((std::abs(u - mean) - 0.5) / sd));
          break;
      }
    }
  }
  res.p_value = std::clamp(res.p_value, 0.0, 1.0);
  res.reject_at_alpha = res.p_value < alpha;
  return res;
}

Alternative choose_tail(double mean_x, double mean_y) {
  if (std::abs(mean_x - mean_y) <= 1e-12) return Alternative::kTwoSided;
  return mean_x > mean_y ? Alternative::kGreater : Alternative::kLess;
}

}  // namespace hgmm
