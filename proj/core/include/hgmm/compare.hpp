#ifndef HGMM_COMPARE_HPP
#define HGMM_COMPARE_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hgmm/evaluation.hpp"
#include "hgmm/hierarchy.hpp"

namespace hgmm {

/// Seed of trial `trial` for arm `arm` (0 = background method, 1 = classic):
/// splitmix64(splitmix64(master) + 2 * trial + arm). Both arms and all
/// trials get distinct streams.
std::uint64_t trial_seed(std::uint64_t master, std::size_t trial, int arm);

std::uint64_t splitmix64(std::uint64_t x);

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // sample (n - 1) standard deviation; 0 for fewer than 2 values
};

Summary summarize(std::span<const double> values);

struct TrialOutcome {
  Dendrogram tree;
  double f_measure = 0.0;
  double log_likelihood = 0.0;
};

TrialOutcome run_trial(const Matrix& features, const GroundTruth& truth, const BuildParams& params,
                       FNormalization norm);

struct ArmStats {
  Summary log_likelihood;
  Summary f_measure;
  std::vector<double> f_values;
  std::vector<double> ll_values;
  std::size_t failures = 0;
  std::size_t em_iters = 0;
  std::size_t restarts = 0;
};

enum class Winner { kBackground, kClassic, kDraw };
std::string_view winner_name(Winner w);

struct ComparisonRow {
  std::string dataset;
  std::size_t max_nodes = 0;
  ArmStats background;
  ArmStats classic;
  UTestResult test;
  Winner winner = Winner::kDraw;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
};

struct CompareOptions {
  std::string dataset_name = "data";
  std::vector<std::size_t> max_nodes_values{3};
  BuildParams base;  // max_nodes, seed and background_enabled are set per trial
  std::size_t trials = 100;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  FNormalization normalization = FNormalization::kLabeledObjects;
  /// When non-empty, each arm picks the (N, R) pair with the highest mean
  /// F-measure from this grid instead of using base.em_iters/base.restarts.
  std::vector<std::pair<std::size_t, std::size_t>> grid;
  /// Runs the classic method in both arms (self-comparison sanity check).
  bool classic_both_arms = false;
  /// Gives the classic arm the same trial seeds as the background arm.
  bool shared_seeds = false;
  /// Maximum fraction of failed trials per arm before the run aborts.
  double max_failure_fraction = 0.10;
  /// Called for every successfully built tree.
  std::function<void(const Dendrogram&, bool background_enabled)> on_tree;
};

/// Default (N, R) tuning grid: N in {25, 50, 100} x R in {5, 10, 20}.
std::vector<std::pair<std::size_t, std::size_t>> default_grid();

/// Runs both methods `trials` times per W and compares their F-measures with
/// a rank-sum test whose tail follows choose_tail. Throws std::runtime_error
/// when more than max_failure_fraction of an arm's trials fail.
ComparisonReport run_comparison(const Dataset& ds, const CompareOptions& options);

/// One row per W, six significant digits.
void write_comparison_csv(std::ostream& out, const ComparisonReport& report);

}  // namespace hgmm

#endif  // HGMM_COMPARE_HPP
