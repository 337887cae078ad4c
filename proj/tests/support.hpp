// Test-only helpers and independent oracles. Nothing here calls into the
// library code paths it is used to check.
#ifndef HGMM_TESTS_SUPPORT_HPP
#define HGMM_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hgmm/hierarchy.hpp"

namespace hgmm::testing {

#ifndef HGMM_DATA_DIR
#define HGMM_DATA_DIR "data"
#endif

inline std::string data_path(const std::string& file) { return std::string(HGMM_DATA_DIR) + "/" + file; }

inline Matrix random_spd(Eigen::Index d, std::mt19937_64& rng, double jitter = 0.2) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = normal(rng);
  Matrix s = a * a.transpose() + jitter * Matrix::Identity(d, d);
  return 0.5 * (s + s.transpose());
}

inline Vector random_vector(Eigen::Index d, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = normal(rng);
  return v;
}

/// Gaussian blobs with labels; rows are grouped by blob.
inline Matrix blobs(const std::vector<Vector>& centers, int per_blob, double sigma,
                    std::mt19937_64& rng) {
  const auto d = centers.front().size();
  Matrix out(static_cast<Eigen::Index>(centers.size()) * per_blob, d);
  std::normal_distribution<double> normal(0.0, sigma);
  Eigen::Index r = 0;
  for (const auto& c : centers)
    for (int p = 0; p < per_blob; ++p, ++r)
      for (Eigen::Index j = 0; j < d; ++j) out(r, j) = c(j) + normal(rng);
  return out;
}

/// Univariate normal density written out directly.
inline double scalar_normal_pdf(double x, double mean, double var) {
  return std::exp(-0.5 * (x - mean) * (x - mean) / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

/// Bivariate normal density from the closed form with correlation.
inline double bivariate_pdf(double x, double y, const Vector& mean, const Matrix& cov) {
  const double sx = std::sqrt(cov(0, 0));
  const double sy = std::sqrt(cov(1, 1));
  const double rho = cov(0, 1) / (sx * sy);
  const double zx = (x - mean(0)) / sx;
  const double zy = (y - mean(1)) / sy;
  const double q = (zx * zx - 2.0 * rho * zx * zy + zy * zy) / (1.0 - rho * rho);
  return std::exp(-0.5 * q) / (2.0 * std::numbers::pi * sx * sy * std::sqrt(1.0 - rho * rho));
}

/// Brute-force hierarchical F: for every node, walk the subtree to collect
/// its group, then score every class against it.
inline double brute_force_f(const Dendrogram& tree, const std::vector<std::optional<std::string>>& labels,
                            bool labeled_denominator) {
  std::set<std::string> classes;
  for (const auto& l : labels)
    if (l) classes.insert(*l);
  std::map<std::string, double> size;
  for (const auto& l : labels)
    if (l) size[*l] += 1.0;
  std::map<std::string, double> best;
  for (const auto& node : tree.nodes) {
    std::vector<Eigen::Index> group;
    std::vector<std::size_t> stack{node.id};
    while (!stack.empty()) {
      const auto& n = tree.nodes[stack.back()];
      stack.pop_back();
      group.insert(group.end(), n.attached.begin(), n.attached.end());
      for (auto c : n.children) stack.push_back(c);
    }
    for (const auto& c : classes) {
      double hits = 0.0;
      for (auto i : group)
        if (labels[static_cast<std::size_t>(i)] && *labels[static_cast<std::size_t>(i)] == c) hits += 1.0;
      double f = 0.0;
      if (hits > 0.0) {
        const double p = hits / static_cast<double>(group.size());
        const double r = hits / size[c];
        f = 2.0 * p * r / (p + r);
      }
      best[c] = std::max(best[c], f);
    }
  }
  double labeled = 0.0, total = 0.0;
  for (const auto& c : classes) {
    total += size[c] * best[c];
    labeled += size[c];
  }
  return total / (labeled_denominator ? labeled : static_cast<double>(labels.size()));
}

/// Exact rank-sum p-value by enumerating every split of the pooled ranks.
/// `alt`: 0 two-sided, 1 greater, 2 less.
inline double enumerate_u_pvalue(const std::vector<double>& xs, const std::vector<double>& ys, int alt) {
  std::vector<double> pooled = xs;
  pooled.insert(pooled.end(), ys.begin(), ys.end());
  const std::size_t n = pooled.size();
  const std::size_t nx = xs.size();
  auto u_of = [&](const std::vector<bool>& in_x) {
    double u = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (in_x[i])
        for (std::size_t j = 0; j < n; ++j)
          if (!in_x[j] && pooled[i] > pooled[j]) u += 1.0;
    return u;
  };
  std::vector<bool> observed(n, false);
  for (std::size_t i = 0; i < nx; ++i) observed[i] = true;
  const double u_obs = u_of(observed);

  double le = 0.0, ge = 0.0, count = 0.0;
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(nx), true);
  std::sort(pick.begin(), pick.end());  // lexicographically first permutation
  do {
    const double u = u_of(pick);
    count += 1.0;
    if (u <= u_obs) le += 1.0;
    if (u >= u_obs) ge += 1.0;
  } while (std::next_permutation(pick.begin(), pick.end()));
  if (alt == 1) return ge / count;
  if (alt == 2) return le / count;
  return std::min(1.0, 2.0 * std::min(le, ge) / count);
}

/// Random hierarchy over 0..m-1 built by repeatedly splitting a random leaf
/// into an attached part and 1-3 children. Mixtures are left empty.
inline Dendrogram random_tree(std::size_t m, std::size_t splits, std::mt19937_64& rng) {
  Dendrogram tree;
  tree.data_size = m;
  DendrogramNode root;
  for (std::size_t i = 0; i < m; ++i) root.input_indices.push_back(static_cast<Eigen::Index>(i));
  root.attached = root.input_indices;
  tree.nodes.push_back(root);
  std::uniform_int_distribution<int> arity(1, 3);
  for (std::size_t s = 0; s < splits; ++s) {
    std::vector<NodeId> leaves;
    for (const auto& n : tree.nodes)
      if (n.children.empty() && n.input_indices.size() > 1) leaves.push_back(n.id);
    if (leaves.empty()) break;
    const NodeId id = leaves[std::uniform_int_distribution<std::size_t>(0, leaves.size() - 1)(rng)];
    const int k = arity(rng);
    std::vector<IndexSet> parts(static_cast<std::size_t>(k) + 1);
    std::uniform_int_distribution<int> bucket(0, k);
    for (auto i : tree.nodes[id].input_indices) parts[static_cast<std::size_t>(bucket(rng))].push_back(i);
    tree.nodes[id].attached = parts[0];
    for (int c = 1; c <= k; ++c) {
      if (parts[static_cast<std::size_t>(c)].empty()) continue;
      DendrogramNode child;
      child.id = tree.nodes.size();
      child.parent = id;
      child.input_indices = parts[static_cast<std::size_t>(c)];
      child.attached = child.input_indices;
      tree.nodes[id].children.push_back(child.id);
      tree.nodes.push_back(child);
    }
  }
  return tree;
}

/// Random labels over `classes` classes; each row is noise with probability
/// `noise`.
inline std::vector<std::optional<std::string>> random_labels(std::size_t m, int classes, double noise,
                                                             std::mt19937_64& rng) {
  std::uniform_int_distribution<int> cls(0, classes - 1);
  std::bernoulli_distribution is_noise(noise);
  std::vector<std::optional<std::string>> out(m);
  for (auto& l : out)
    if (!is_noise(rng)) l = "c" + std::to_string(cls(rng));
  return out;
}

}  // namespace hgmm::testing

#endif  // HGMM_TESTS_SUPPORT_HPP
