#ifndef HGMM_HIERARCHY_HPP
#define HGMM_HIERARCHY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hgmm/dataset.hpp"
#include "hgmm/mixture.hpp"

namespace hgmm {

using NodeId = std::size_t;
using IndexSet = std::vector<Eigen::Index>;  // sorted, unique instance indices

/// Settings for the breadth-first tree construction.
struct BuildParams {
  std::size_t components = 2;  // n: children (and estimated components) per node
  std::size_t em_iters = 50;   // N
  std::size_t restarts = 10;   // R
  std::size_t min_distinct = 3;  // k: a node splits only with >= k distinct rows
  std::size_t max_nodes = 3;   // W: node budget, see budget_includes_root
  bool budget_includes_root = false;
  bool background_enabled = true;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on n < 1, R < 1 or k < n.
  void validate() const;

  /// Default k when the caller does not set one: n + 1.
  static std::size_t default_min_distinct(std::size_t components) { return components + 1; }
};

struct DendrogramNode {
  NodeId id = 0;
  std::optional<NodeId> parent;
  std::optional<BackgroundMixture> mixture;  // set only for expanded nodes
  IndexSet attached;
  std::vector<NodeId> children;
  IndexSet input_indices;
  std::optional<double> log_likelihood;

  bool expanded() const { return mixture.has_value(); }
  bool is_leaf() const { return children.empty(); }
};

struct Dendrogram {
  std::vector<DendrogramNode> nodes;  // nodes[i].id == i, root first
  NodeId root = 0;
  BuildParams params;
  std::string dataset_fingerprint;
  std::size_t data_size = 0;

  const DendrogramNode& node(NodeId id) const;
  /// Nodes other than the root.
  std::size_t created_nodes() const { return nodes.empty() ? 0 : nodes.size() - 1; }
};

/// 64-bit FNV-1a over the dimensions and the bit patterns of every feature
/// value, rendered as 16 hex digits.
std::string fingerprint(const Matrix& features);

/// True iff `points` has at least `k` pairwise distinct rows.
bool eligible_for_split(const Matrix& points, std::size_t k);

/// Breadth-first construction. Each expanded node fits a background mixture
/// whose background component holds the moments of the node's own input
/// rows; background-assigned rows stay attached to the node and every
/// non-empty component spawns a child. A node only expands when all of its
/// children fit in the remaining budget, and construction stops at the first
/// node that does not fit.
Dendrogram build(const Matrix& features, const BuildParams& params);

/// Disjoint-union check of attached sets and child inputs at every node,
/// with the root covering 0..data_size-1.
bool partition_check(const Dendrogram& tree, std::size_t data_size);

/// Attached set of `id` and all of its descendants, sorted.
IndexSet gather_subtree(const Dendrogram& tree, NodeId id);

/// Sum of node_log_likelihood over expanded nodes.
double hierarchy_log_likelihood(const Dendrogram& tree);

/// Ids of nodes with children.
std::vector<NodeId> internal_nodes(const Dendrogram& tree);

}  // namespace hgmm

#endif  // HGMM_HIERARCHY_HPP
