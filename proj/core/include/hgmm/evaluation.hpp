#ifndef HGMM_EVALUATION_HPP
#define HGMM_EVALUATION_HPP

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hgmm/dataset.hpp"
#include "hgmm/hierarchy.hpp"

namespace hgmm {

/// Per-instance ground truth: a class name, or nullopt for injected noise.
struct GroundTruth {
  std::vector<std::optional<std::string>> labels;
  std::vector<bool> noise;

  /// Throws std::invalid_argument when `ds` carries no labels.
  static GroundTruth from_dataset(const Dataset& ds);
};

/// Denominator of the class-size-weighted average of per-class best F.
///
/// kAllObjects divides by every instance, noise included. kLabeledObjects
/// divides by the labeled instances only, so a perfect hierarchy scores 1
/// whatever the amount of noise. Noise is counted in every group size
/// under both settings.
enum class FNormalization { kAllObjects, kLabeledObjects };

std::string_view normalization_name(FNormalization norm);
FNormalization parse_normalization(std::string_view name);

struct ClassScore {
  double best_f = 0.0;
  NodeId best_node = 0;
};

struct FMeasureReport {
  double overall = 0.0;
  std::map<std::string, ClassScore> per_class;
  std::map<std::string, std::size_t> class_sizes;
  std::size_t total_objects = 0;  // denominator used for `overall`
  FNormalization normalization = FNormalization::kAllObjects;
};

/// Hierarchical F-measure. Every node's group is its whole subtree; each
/// class scores the best harmonic mean of precision and recall over all
/// nodes, and the overall value weights those by class size.
FMeasureReport f_measure(const Dendrogram& tree, const GroundTruth& truth,
                         FNormalization norm = FNormalization::kAllObjects);

enum class Alternative { kTwoSided, kGreater, kLess };

std::string_view alternative_name(Alternative alt);

struct UTestResult {
  double u_statistic = 0.0;
  double p_value = 1.0;
  Alternative alternative = Alternative::kTwoSided;
  bool reject_at_alpha = false;
  double alpha = 0.05;
  bool exact = false;
};

/// Largest sample size (of the smaller sample) handled by the exact null
/// distribution when there are no ties.
inline constexpr std::size_t kExactUThreshold = 8;

/// Mann-Whitney U on midranks. `kGreater` tests whether xs tends to exceed
/// ys. Exact p for tie-free data with min(n_x, n_y) <= 8, otherwise the normal
/// approximation with tie-corrected variance and a 0.5 continuity correction.
UTestResult mann_whitney_u(std::span<const double> xs, std::span<const double> ys,
                           Alternative alternative, double alpha = 0.05);

/// P(U <= u) under the null for tie-free samples of sizes nx, ny.
double exact_u_cdf(double u, std::size_t nx, std::size_t ny);

/// Two-sided when the means agree within 1e-12, otherwise one-sided towards
/// the larger mean (kGreater when mean_x is larger).
Alternative choose_tail(double mean_x, double mean_y);

}  // namespace hgmm

#endif  // HGMM_EVALUATION_HPP
