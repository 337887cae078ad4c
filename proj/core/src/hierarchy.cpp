#include "hgmm/hierarchy.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <deque>
#include <stdexcept>

namespace hgmm {
namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

void fnv_mix(std::uint64_t& h, std::uint64_t word) {
  for (int b = 0; b < 8; ++b) {
    h ^= (word >> (8 * b)) & 0xffu;
    h *= kFnvPrime;
  }
}

bool sorted_unique(const IndexSet& s) {
  return std::adjacent_find(s.begin(), s.end(),
                            [](Eigen::Index a, Eigen::Index b) { return a >= b; }) == s.end();
}

}  // namespace

void BuildParams::validate() const {
  if (components < 1) throw std::invalid_argument("n must be at least 1");
  if (restarts < 1) throw std::invalid_argument("R must be at least 1");
  if (min_distinct < components) throw std::invalid_argument("k must be at least n");
}

const DendrogramNode& Dendrogram::node(NodeId id) const {
  if (id >= nodes.size()) throw std::out_of_range("unknown node id " + std::to_string(id));
  return nodes[id];
}

std::string fingerprint(const Matrix& features) {
  std::uint64_t h = kFnvOffset;
  fnv_mix(h, static_cast<std::uint64_t>(features.rows()));
  fnv_mix(h, static_cast<std::uint64_t>(features.cols()));
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
      std::uint64_t bits = 0;
      const double v = features(i, j);
      std::memcpy(&bits, &v, sizeof bits);
      fnv_mix(h, bits);
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool eligible_for_split(const Matrix& points, std::size_t k) {
  return count_distinct_rows(points) >= k;
}

Dendrogram build(const Matrix& features, const BuildParams& params) {
  params.validate();
  if (features.rows() < 1 || features.cols() < 1)
    throw std::invalid_argument("cannot build a tree from an empty dataset");

  Dendrogram tree;
  tree.params = params;
  tree.dataset_fingerprint = fingerprint(features);
  tree.data_size = static_cast<std::size_t>(features.rows());

  DendrogramNode root;
  root.id = 0;
  root.input_indices.resize(tree.data_size);
  for (std::size_t i = 0; i < tree.data_size; ++i)
    root.input_indices[i] = static_cast<Eigen::Index>(i);
  root.attached = root.input_indices;
  tree.nodes.push_back(std::move(root));

  std::size_t budget = params.max_nodes;
  if (params.budget_includes_root) budget = budget > 0 ? budget - 1 : 0;

  std::mt19937_64 rng(params.seed);
  std::deque<NodeId> frontier{0};
  while (!frontier.empty() && tree.created_nodes() < budget) {
    const NodeId id = frontier.front();
    frontier.pop_front();

    const IndexSet input = tree.nodes[id].input_indices;
    const Matrix x = select_rows(features, input);
    if (!eligible_for_split(x, params.min_distinct)) continue;

    std::optional<EmResult> attempt;
    try {
      const GaussianComponent background = GaussianComponent::from_moments(estimate_moments(x));
      attempt = fit_best_of(x, background, params.components, params.em_iters, params.restarts,
                            params.background_enabled, rng);
    } catch (const std::exception&) {
      continue;  // failed nodes stay leaves
    }
    EmResult& fit = *attempt;
    if (fit.background_takeover) continue;

    const Assignment labels = hard_assign(fit.mixture, x);
    std::vector<IndexSet> groups(params.components + 1);
    for (std::size_t t = 0; t < labels.size(); ++t)
      groups[static_cast<std::size_t>(labels[t])].push_back(input[t]);

    std::size_t non_empty = 0;
    for (std::size_t c = 1; c < groups.size(); ++c) non_empty += groups[c].empty() ? 0 : 1;
    if (non_empty == 0) continue;
    if (tree.created_nodes() + non_empty > budget) break;

    DendrogramNode& parent = tree.nodes[id];
    parent.mixture = std::move(fit.mixture);
    parent.log_likelihood = fit.log_likelihood;
    parent.attached = std::move(groups[0]);
    for (std::size_t c = 1; c < groups.size(); ++c) {
      if (groups[c].empty()) continue;
      DendrogramNode child;
      child.id = tree.nodes.size();
      child.parent = id;
      child.input_indices = std::move(groups[c]);
      child.attached = child.input_indices;
      tree.nodes[id].children.push_back(child.id);
      frontier.push_back(child.id);
      tree.nodes.push_back(std::move(child));
    }
  }
  return tree;
}

bool partition_check(const Dendrogram& tree, std::size_t data_size) {
  if (tree.nodes.empty() || tree.root >= tree.nodes.size()) return false;
  const auto& root = tree.nodes[tree.root];
  if (root.parent || root.input_indices.size() != data_size) return false;
  for (std::size_t i = 0; i < data_size; ++i)
    if (root.input_indices[i] != static_cast<Eigen::Index>(i)) return false;

  std::vector<int> seen(tree.nodes.size(), 0);
  std::deque<NodeId> queue{tree.root};
  while (!queue.empty()) {
    const NodeId id = queue.front();
    queue.pop_front();
    if (id >= tree.nodes.size() || seen[id]++) return false;
    const auto& node = tree.nodes[id];
    if (node.id != id || !sorted_unique(node.attached) || !sorted_unique(node.input_indices))
      return false;

    IndexSet combined = node.attached;
    for (NodeId c : node.children) {
      if (c >= tree.nodes.size()) return false;
      const auto& child = tree.nodes[c];
      if (child.parent != id) return false;
      combined.insert(combined.end(), child.input_indices.begin(), child.input_indices.end());
      queue.push_back(c);
    }
    std::sort(combined.begin(), combined.end());
    // Equal sizes plus equal contents rule out overlaps between the parts.
    if (combined != node.input_indices) return false;
  }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

IndexSet gather_subtree(const Dendrogram& tree, NodeId id) {
  IndexSet out;
  std::vector<NodeId> stack{tree.node(id).id};
  while (!stack.empty()) {
    const auto& node = tree.node(stack.back());
    stack.pop_back();
    out.insert(out.end(), node.attached.begin(), node.attached.end());
    stack.insert(stack.end(), node.children.begin(), node.children.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

double hierarchy_log_likelihood(const Dendrogram& tree) {
  double total = 0.0;
  for (const auto& node : tree.nodes)
    if (node.expanded() && node.log_likelihood) total += *node.log_likelihood;
  return total;
}

std::vector<NodeId> internal_nodes(const Dendrogram& tree) {
  std::vector<NodeId> out;
  for (const auto& node : tree.nodes)
    if (!node.children.empty()) out.push_back(node.id);
  return out;
}

}  // namespace hgmm
