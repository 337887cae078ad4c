#include "hgmm/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace hgmm {
namespace {

bool row_less(const Matrix& p, Eigen::Index a, Eigen::Index b) {
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    if (p(a, j) < p(b, j)) return true;
    if (p(b, j) < p(a, j)) return false;
  }
  return false;
}

bool row_equal(const Matrix& p, Eigen::Index a, Eigen::Index b) {
  return (p.row(a).array() == p.row(b).array()).all();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::size_t Dataset::noise_count() const {
  return static_cast<std::size_t>(std::count(noise.begin(), noise.end(), true));
}

std::vector<std::string> Dataset::class_names() const {
  std::vector<std::string> names;
  for (const auto& l : labels) {
    if (l && std::find(names.begin(), names.end(), *l) == names.end()) names.push_back(*l);
  }
  return names;
}

void Dataset::validate() const {
  if (features.rows() < 1 || features.cols() < 1)
    throw std::invalid_argument("dataset needs at least one row and one column");
  if (!features.allFinite()) throw std::invalid_argument("non-finite feature value");
  if (noise.size() != static_cast<std::size_t>(features.rows()))
    throw std::invalid_argument("noise flags do not cover every row");
  if (!labels.empty()) {
    if (labels.size() != noise.size())
      throw std::invalid_argument("labels do not cover every row");
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i].has_value() == noise[i])
        throw std::invalid_argument("row " + std::to_string(i) +
                                    " must carry exactly one of class label or noise flag");
    }
  }
}

Matrix select_rows(const Matrix& features, const std::vector<Eigen::Index>& indices) {
  Matrix out(static_cast<Eigen::Index>(indices.size()), features.cols());
  for (std::size_t r = 0; r < indices.size(); ++r)
    out.row(static_cast<Eigen::Index>(r)) = features.row(indices[r]);
  return out;
}

std::vector<Eigen::Index> distinct_row_indices(const Matrix& points) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return row_less(points, a, b); });
  std::vector<Eigen::Index> firsts;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == 0 || !row_equal(points, order[i - 1], order[i])) firsts.push_back(order[i]);
  }
  std::sort(firsts.begin(), firsts.end());
  return firsts;
}

std::size_t count_distinct_rows(const Matrix& points) {
  return distinct_row_indices(points).size();
}

Dataset load_csv(std::istream& in, const std::optional<std::string>& label_column) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, header_line)) {
    ++line_no;
    if (!trim(header_line).empty()) break;
  }
  if (trim(header_line).empty()) throw CsvError("missing header row", 0);
  header = split_fields(header_line);

  std::optional<std::size_t> label_idx;
  if (label_column) {
    for (std::size_t j = 0; j < header.size(); ++j)
      if (header[j] == *label_column) label_idx = j;
    if (!label_idx) throw CsvError("label column '" + *label_column + "' not found in header", line_no);
  }

  Dataset ds;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (j != label_idx) ds.column_names.emplace_back(header[j]);
  if (label_column) ds.label_column = *label_column;
  const auto d = static_cast<Eigen::Index>(ds.column_names.size());
  if (d < 1) throw CsvError("no feature columns", line_no);

  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size())
      throw CsvError("expected " + std::to_string(header.size()) + " fields, found " +
                         std::to_string(fields.size()),
                     line_no);
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (label_idx && j == *label_idx) {
        if (fields[j].empty()) throw CsvError("empty label", line_no);
        if (fields[j] == kNoiseToken) {
          ds.labels.emplace_back(std::nullopt);
          ds.noise.push_back(true);
        } else {
          ds.labels.emplace_back(std::string(fields[j]));
          ds.noise.push_back(false);
        }
        continue;
      }
      const auto v = parse_double(fields[j]);
      if (!v || !std::isfinite(*v))
        throw CsvError("non-numeric value '" + std::string(fields[j]) + "' in column '" +
                           std::string(header[j]) + "'",
                       line_no);
      values.push_back(*v);
    }
    if (!label_idx) ds.noise.push_back(false);
  }
  const auto m = static_cast<Eigen::Index>(values.size()) / d;
  if (m == 0) throw CsvError("no data rows", 0);
  ds.features = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), m, d);
  return ds;
}

Dataset load_csv_file(const std::string& path, const std::optional<std::string>& label_column) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
  return load_csv(in, label_column);
}

void save_csv(std::ostream& out, const Dataset& ds) {
  const auto d = ds.dim();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (j) out << ',';
    if (static_cast<std::size_t>(j) < ds.column_names.size())
      out << ds.column_names[static_cast<std::size_t>(j)];
    else
      out << 'x' << j;
  }
  if (ds.has_labels()) out << ',' << (ds.label_column.empty() ? "class" : ds.label_column);
  out << '\n';
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (j) out << ',';
      out << format_g17(ds.features(i, j));
    }
    if (ds.has_labels()) {
      const auto& l = ds.labels[static_cast<std::size_t>(i)];
      out << ',' << (l ? std::string_view(*l) : kNoiseToken);
    }
    out << '\n';
  }
}

void save_csv_file(const std::string& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write '" + path + "'");
  save_csv(out, ds);
  if (!out) throw std::ios_base::failure("write failed for '" + path + "'");
}

Dataset inject_uniform_noise(const Dataset& ds, double ratio, std::mt19937_64& rng) {
  if (!(ratio > 0.0)) throw std::invalid_argument("noise ratio must be positive");
  if (ds.size() < 2) throw std::invalid_argument("noise injection needs at least 2 instances");
  const auto m = ds.size();
  // The epsilon keeps products such as 0.1 * 450 from flooring one short.
  const auto extra = static_cast<Eigen::Index>(std::floor(ratio * static_cast<double>(m) + 1e-9));

  Dataset out = ds;
  if (out.noise.size() != static_cast<std::size_t>(m)) out.noise.assign(static_cast<std::size_t>(m), false);
  if (extra == 0) return out;

  const Vector lo = ds.features.colwise().minCoeff();
  const Vector hi = ds.features.colwise().maxCoeff();
  out.features.conservativeResize(m + extra, Eigen::NoChange);
  for (Eigen::Index i = m; i < m + extra; ++i) {
    for (Eigen::Index j = 0; j < ds.dim(); ++j) {
      if (lo(j) == hi(j)) {
        out.features(i, j) = lo(j);
      } else {
        std::uniform_real_distribution<double> u(lo(j), hi(j));
        out.features(i, j) = u(rng);
      }
    }
    out.noise.push_back(true);
  }
  if (ds.has_labels()) {
    out.labels.resize(static_cast<std::size_t>(m + extra));
  }
  return out;
}

ToyKind parse_toy_kind(std::string_view name) {
  if (name == "LC" || name == "lc") return ToyKind::kLargeCenter;
  if (name == "LN" || name == "ln") return ToyKind::kLowNoise;
  if (name == "HN" || name == "hn") return ToyKind::kHighNoise;
  throw std::invalid_argument("unknown toy kind '" + std::string(name) + "' (expected LC, LN or HN)");
}

std::string_view toy_kind_name(ToyKind kind) {
  switch (kind) {
    case ToyKind::kLargeCenter: return "LC";
    case ToyKind::kLowNoise: return "LN";
    case ToyKind::kHighNoise: return "HN";
  }
  return "?";
}

Dataset generate_toy(ToyKind kind, std::uint64_t seed, const ToyConfig& config) {
  std::mt19937_64 rng(seed);
  std::vector<std::array<double, 2>> centers;
  std::vector<double> sigmas;
  std::vector<int> counts;
  double noise_fraction = config.low_noise_fraction;

  if (kind == ToyKind::kLargeCenter) {
    centers = {{0.0, 0.0}, {-config.side_offset, 0.0}, {config.side_offset, 0.0}};
    sigmas = {config.center_sigma, config.side_sigma, config.side_sigma};
    counts = {config.center_points, config.side_points, config.side_points};
  } else {
    for (int c = 0; c < config.ring_clusters; ++c) {
      const double angle = 2.0 * std::numbers::pi * c / config.ring_clusters;
      centers.push_back({config.ring_radius * std::cos(angle), config.ring_radius * std::sin(angle)});
      sigmas.push_back(config.ring_sigma);
      counts.push_back(config.ring_points);
    }
    if (kind == ToyKind::kHighNoise) noise_fraction = config.high_noise_fraction;
  }

  int total = 0;
  for (int c : counts) total += c;
  Dataset ds;
  ds.features.resize(total, 2);
  ds.column_names = {"x", "y"};
  ds.label_column = "class";
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Index row = 0;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (int p = 0; p < counts[c]; ++p, ++row) {
      ds.features(row, 0) = centers[c][0] + sigmas[c] * normal(rng);
      ds.features(row, 1) = centers[c][1] + sigmas[c] * normal(rng);
      ds.labels.emplace_back("cluster" + std::to_string(c));
      ds.noise.push_back(false);
    }
  }
  return inject_uniform_noise(ds, noise_fraction, rng);
}

}  // namespace hgmm
