#include "hgmm/compare.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>

namespace hgmm {
namespace {

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

ArmStats run_arm(const Dataset& ds, const GroundTruth& truth, const CompareOptions& options,
                 std::size_t max_nodes, int arm, bool background, std::size_t em_iters,
                 std::size_t restarts) {
  ArmStats stats;
  stats.em_iters = em_iters;
  stats.restarts = restarts;
  BuildParams params = options.base;
  params.max_nodes = max_nodes;
  params.background_enabled = background;
  params.em_iters = em_iters;
  params.restarts = restarts;
  for (std::size_t t = 0; t < options.trials; ++t) {
    params.seed = trial_seed(options.seed, t, options.shared_seeds ? 0 : arm);
    try {
      TrialOutcome outcome = run_trial(ds.features, truth, params, options.normalization);
      if (options.on_tree) options.on_tree(outcome.tree, background);
      stats.f_values.push_back(outcome.f_measure);
      stats.ll_values.push_back(outcome.log_likelihood);
    } catch (const std::exception&) {
      ++stats.failures;
    }
  }
  if (static_cast<double>(stats.failures) >
      options.max_failure_fraction * static_cast<double>(options.trials))
    throw std::runtime_error(std::to_string(stats.failures) + " of " +
                             std::to_string(options.trials) + " trials failed at W=" +
                             std::to_string(max_nodes));
  stats.f_measure = summarize(stats.f_values);
  stats.log_likelihood = summarize(stats.ll_values);
  return stats;
}

ArmStats tuned_arm(const Dataset& ds, const GroundTruth& truth, const CompareOptions& options,
                   std::size_t max_nodes, int arm, bool background) {
  if (options.grid.empty())
    return run_arm(ds, truth, options, max_nodes, arm, background, options.base.em_iters,
                   options.base.restarts);
  std::optional<ArmStats> best;
  for (const auto& [iters, restarts] : options.grid) {
    ArmStats s = run_arm(ds, truth, options, max_nodes, arm, background, iters, restarts);
    if (!best || s.f_measure.mean > best->f_measure.mean) best = std::move(s);
  }
  return std::move(*best);
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial, int arm) {
  return splitmix64(splitmix64(master) + 2 * static_cast<std::uint64_t>(trial) +
                    static_cast<std::uint64_t>(arm));
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / (n - 1.0));
  return s;
}

TrialOutcome run_trial(const Matrix& features, const GroundTruth& truth, const BuildParams& params,
                       FNormalization norm) {
  TrialOutcome out{.tree = build(features, params)};
  out.f_measure = f_measure(out.tree, truth, norm).overall;
  out.log_likelihood = hierarchy_log_likelihood(out.tree);
  return out;
}

std::string_view winner_name(Winner w) {
  switch (w) {
    case Winner::kBackground: return "B";
    case Winner::kClassic: return "G";
    case Winner::kDraw: return "draw";
  }
  return "?";
}

std::vector<std::pair<std::size_t, std::size_t>> default_grid() {
  std::vector<std::pair<std::size_t, std::size_t>> grid;
  for (std::size_t iters : {25u, 50u, 100u})
    for (std::size_t restarts : {5u, 10u, 20u}) grid.emplace_back(iters, restarts);
  return grid;
}

ComparisonReport run_comparison(const Dataset& ds, const CompareOptions& options) {
  if (options.trials < 2) throw std::invalid_argument("need at least 2 trials");
  ds.validate();
  const GroundTruth truth = GroundTruth::from_dataset(ds);
  ComparisonReport report;
  for (std::size_t w : options.max_nodes_values) {
    ComparisonRow row;
    row.dataset = options.dataset_name;
    row.max_nodes = w;
    row.background = tuned_arm(ds, truth, options, w, 0, !options.classic_both_arms);
    row.classic = tuned_arm(ds, truth, options, w, 1, false);
    const Alternative tail = choose_tail(row.background.f_measure.mean, row.classic.f_measure.mean);
    row.test = mann_whitney_u(row.background.f_values, row.classic.f_values, tail, options.alpha);
    if (!row.test.reject_at_alpha) {
      row.winner = Winner::kDraw;
    } else if (tail == Alternative::kGreater) {
      row.winner = Winner::kBackground;
    } else if (tail == Alternative::kLess) {
      row.winner = Winner::kClassic;
    } else {
      const double half = 0.5 * static_cast<double>(row.background.f_values.size() *
                                                     row.classic.f_values.size());
      row.winner = row.test.u_statistic > half ? Winner::kBackground : Winner::kClassic;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

void write_comparison_csv(std::ostream& out, const ComparisonReport& report) {
  out << "dataset,W,ll_mean_B,ll_sd_B,ll_mean_G,ll_sd_G,f_mean_B,f_sd_B,f_mean_G,f_sd_G,"
         "N_B,R_B,N_G,R_G,U,p_value,alternative,winner\n";
  for (const auto& r : report.rows) {
    out << r.dataset << ',' << r.max_nodes << ',' << g6(r.background.log_likelihood.mean) << ','
        << g6(r.background.log_likelihood.sd) << ',' << g6(r.classic.log_likelihood.mean) << ','
        << g6(r.classic.log_likelihood.sd) << ',' << g6(r.background.f_measure.mean) << ','
        << g6(r.background.f_measure.sd) << ',' << g6(r.classic.f_measure.mean) << ','
        << g6(r.classic.f_measure.sd) << ',' << r.background.em_iters << ','
        << r.background.restarts << ',' << r.classic.em_iters << ',' << r.classic.restarts << ','
        << g6(r.test.u_statistic) << ',' << g6(r.test.p_value) << ','
        << alternative_name(r.test.alternative) << ',' << winner_name(r.winner) << '\n';
  }
}

}  // namespace hgmm
