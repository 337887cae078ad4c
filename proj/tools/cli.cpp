#include "cli.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hgmm/compare.hpp"
#include "hgmm/dataset.hpp"
#include "hgmm/evaluation.hpp"
#include "hgmm/hierarchy.hpp"
#include "hgmm/serialization.hpp"

namespace hgmm::cli {
namespace {

// Bad flags, unreadable inputs and malformed files all exit with kExitUsage.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

bool to_stdout(const std::string& path) { return path.empty() || path == "-"; }

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (to_stdout(path)) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::ios_base::failure("cannot write '" + path + "'");
  f << text;
  if (!f) throw std::ios_base::failure("write failed for '" + path + "'");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::size_t parse_count(std::string_view s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw UsageError("invalid count '" + std::string(s) + "'");
  return v;
}

// "3", "2-10" or "2,4,6".
std::vector<std::size_t> parse_range(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      out.push_back(parse_count(part));
      continue;
    }
    const auto lo = parse_count(std::string_view(part).substr(0, dash));
    const auto hi = parse_count(std::string_view(part).substr(dash + 1));
    if (hi < lo) throw UsageError("empty range '" + part + "'");
    for (auto w = lo; w <= hi; ++w) out.push_back(w);
  }
  if (out.empty()) throw UsageError("empty --max-nodes");
  return out;
}

struct TreeFlags {
  std::size_t n = 2;
  std::size_t max_nodes = 3;
  std::size_t em_iters = 50;
  std::size_t restarts = 10;
  std::optional<std::size_t> min_distinct;
  bool no_background = false;
  std::string budget = "created";

  void add_to(CLI::App& cmd, bool with_max_nodes) {
    cmd.add_option("--n", n, "Estimated components (children) per node")->capture_default_str();
    if (with_max_nodes)
      cmd.add_option("--max-nodes", max_nodes, "Node budget W")->capture_default_str();
    cmd.add_option("--em-iters", em_iters, "EM iterations N per restart")->capture_default_str();
    cmd.add_option("--restarts", restarts, "EM restarts R per node")->capture_default_str();
    cmd.add_option("--min-distinct", min_distinct,
                   "Distinct rows k a node needs to split (default n + 1)");
    cmd.add_flag("--no-background", no_background, "Classic hierarchical GMM without background");
    cmd.add_option("--budget", budget, "What W counts: total (all nodes) or created (non-root)")
        ->check(CLI::IsMember({"total", "created"}))
        ->capture_default_str();
  }

  BuildParams params(std::uint64_t seed) const {
    BuildParams p;
    p.components = n;
    p.max_nodes = max_nodes;
    p.em_iters = em_iters;
    p.restarts = restarts;
    p.min_distinct = min_distinct.value_or(BuildParams::default_min_distinct(n));
    p.background_enabled = !no_background;
    p.budget_includes_root = budget == "total";
    p.seed = seed;
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    return p;
  }
};

std::optional<std::string> label_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return s;
}

int cmd_fit(const std::string& input, const std::string& label_column, const TreeFlags& flags,
            std::uint64_t seed, const std::string& out_path, std::ostream& out, std::ostream& err) {
  const BuildParams params = flags.params(seed);
  const Dataset ds = load_csv_file(input, label_opt(label_column));
  const Dendrogram tree = build(ds.features, params);
  write_text(out_path, serialize_tree(tree), out);
  std::ostream& log = to_stdout(out_path) ? err : out;
  log << "nodes " << tree.nodes.size() << ", created " << tree.created_nodes()
      << ", log-likelihood " << g6(hierarchy_log_likelihood(tree)) << '\n';
  return kExitOk;
}

int cmd_eval(const std::string& tree_path, const std::string& input,
             const std::string& label_column, const std::string& norm_name,
             const std::string& out_path, std::ostream& out, std::ostream& err) {
  const FNormalization norm = parse_normalization(norm_name);
  const Dendrogram tree = load_tree_file(tree_path);
  const Dataset ds = load_csv_file(input, label_column);
  if (fingerprint(ds.features) != tree.dataset_fingerprint ||
      static_cast<std::size_t>(ds.size()) != tree.data_size) {
    err << "error: tree/data mismatch\n";
    return kExitRuntime;
  }
  const FMeasureReport report = f_measure(tree, GroundTruth::from_dataset(ds), norm);
  std::ostringstream text;
  text << "overall_f," << g6(report.overall) << '\n';
  text << "normalization," << normalization_name(norm) << '\n';
  text << "class,size,best_f,best_node\n";
  for (const auto& [name, score] : report.per_class)
    text << name << ',' << report.class_sizes.at(name) << ',' << g6(score.best_f) << ','
         << score.best_node << '\n';
  write_text(out_path, text.str(), out);
  return kExitOk;
}

int cmd_export(const std::string& tree_path, const std::string& format,
               const std::string& out_path, std::ostream& out) {
  if (format == "json") {
    const std::string doc = read_text(tree_path);
    parse_tree(doc);  // validates
    write_text(out_path, doc, out);
  } else {
    write_text(out_path, tree_to_dot(load_tree_file(tree_path)), out);
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hierarchical Gaussian mixtures with background components"};
  app.require_subcommand(1);

  std::string input, label_column, out_path, tree_path, f_norm = "all";
  std::uint64_t seed = 0;

  // fit
  TreeFlags fit_flags;
  auto* fit = app.add_subcommand("fit", "Build a dendrogram and write its tree document");
  fit->add_option("--input", input, "CSV file")->required();
  fit->add_option("--label-column", label_column, "Column excluded from the features");
  fit_flags.add_to(*fit, true);
  fit->add_option("--seed", seed, "Random seed")->capture_default_str();
  fit->add_option("--out", out_path, "Tree document path (stdout when omitted)");

  // eval
  auto* eval = app.add_subcommand("eval", "Hierarchical F-measure of a tree against labels");
  eval->add_option("--tree", tree_path, "Tree document")->required();
  eval->add_option("--input", input, "Labeled CSV the tree was built from")->required();
  std::string eval_label = "class";
  eval->add_option("--label-column", eval_label, "Class label column")->capture_default_str();
  eval->add_option("--f-norm", f_norm, "F denominator: all objects or labeled objects")
      ->check(CLI::IsMember({"all", "labeled"}))
      ->capture_default_str();
  eval->add_option("--out", out_path, "Output path (stdout when omitted)");

  // compare
  TreeFlags cmp_flags;
  auto* compare = app.add_subcommand("compare", "Background vs classic method over repeated trials");
  compare->add_option("--input", input, "Labeled CSV")->required();
  std::string cmp_label = "class";
  compare->add_option("--label-column", cmp_label, "Class label column")->capture_default_str();
  std::string w_range = "2-10";
  compare->add_option("--max-nodes", w_range, "W values: 3, 2-10 or 2,4,6")->capture_default_str();
  cmp_flags.add_to(*compare, false);
  std::size_t trials = 100;
  double alpha = 0.05;
  double cmp_ratio = 0.0;
  bool sweep = false;
  std::string name;
  compare->add_option("--trials", trials, "Trials T per method and W")->capture_default_str();
  compare->add_option("--alpha", alpha, "Significance level")->capture_default_str();
  compare->add_option("--ratio", cmp_ratio,
                      "Inject this fraction of uniform noise once before the trials (0 = none)")
      ->capture_default_str();
  compare->add_flag("--sweep", sweep, "Tune (N, R) per method over N in {25,50,100}, R in {5,10,20}");
  std::string cmp_norm = "labeled";
  compare->add_option("--f-norm", cmp_norm, "F denominator: all objects or labeled objects")
      ->check(CLI::IsMember({"all", "labeled"}))
      ->capture_default_str();
  compare->add_option("--name", name, "Dataset name in the report (default: file stem)");
  compare->add_option("--seed", seed, "Master seed")->capture_default_str();
  compare->add_option("--out", out_path, "CSV report path (stdout when omitted)");

  // toy
  auto* toy = app.add_subcommand("toy", "Generate a 2-d toy dataset (LC, LN or HN)");
  std::string kind;
  toy->add_option("--kind", kind, "LC, LN or HN")->required()->check(
      CLI::IsMember({"LC", "LN", "HN", "lc", "ln", "hn"}));
  toy->add_option("--seed", seed, "Random seed")->capture_default_str();
  toy->add_option("--out", out_path, "CSV path (stdout when omitted)");

  // noise
  auto* noise = app.add_subcommand("noise", "Append uniform bounding-box noise to a dataset");
  double ratio = 0.5;
  noise->add_option("--input", input, "CSV file")->required();
  noise->add_option("--label-column", label_column, "Class label column");
  noise->add_option("--ratio", ratio, "Noise rows per original row")->capture_default_str();
  noise->add_option("--seed", seed, "Random seed")->capture_default_str();
  noise->add_option("--out", out_path, "CSV path (stdout when omitted)");

  // export
  auto* exporter = app.add_subcommand("export", "Render a tree document as dot or json");
  std::string format = "dot";
  exporter->add_option("--input,--tree", tree_path, "Tree document")->required();
  exporter->add_option("--format", format, "dot or json")->capture_default_str();
  exporter->add_option("--out", out_path, "Output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*fit) return cmd_fit(input, label_column, fit_flags, seed, out_path, out, err);
    if (*eval) return cmd_eval(tree_path, input, eval_label, f_norm, out_path, out, err);
    if (*exporter) {
      if (format != "dot" && format != "json") throw UsageError("unknown format '" + format + "'");
      return cmd_export(tree_path, format, out_path, out);
    }
    if (*toy) {
      std::ostringstream csv;
      save_csv(csv, generate_toy(parse_toy_kind(kind), seed));
      write_text(out_path, csv.str(), out);
      return kExitOk;
    }
    if (*noise) {
      const Dataset ds = load_csv_file(input, label_opt(label_column));
      std::mt19937_64 rng(seed);
      std::ostringstream csv;
      save_csv(csv, inject_uniform_noise(ds, ratio, rng));
      write_text(out_path, csv.str(), out);
      return kExitOk;
    }
    if (*compare) {
      CompareOptions opts;
      opts.max_nodes_values = parse_range(w_range);
      opts.base = cmp_flags.params(seed);
      opts.trials = trials;
      opts.alpha = alpha;
      opts.seed = seed;
      opts.normalization = parse_normalization(cmp_norm);
      if (sweep) opts.grid = default_grid();
      opts.dataset_name = name.empty() ? std::filesystem::path(input).stem().string() : name;
      if (trials < 2) throw UsageError("--trials must be at least 2");
      if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
      Dataset ds = load_csv_file(input, cmp_label);
      if (cmp_ratio > 0.0) {
        std::mt19937_64 rng(splitmix64(seed ^ 0x6e6f697365ull));
        ds = inject_uniform_noise(ds, cmp_ratio, rng);
      }
      std::ostringstream csv;
      write_comparison_csv(csv, run_comparison(ds, opts));
      write_text(out_path, csv.str(), out);
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CsvError& e) {
    err << "error: " << input << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const TreeFormatError& e) {
    err << "error: " << tree_path << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace hgmm::cli
