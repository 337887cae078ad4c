#ifndef HGMM_DATASET_HPP
#define HGMM_DATASET_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hgmm/gaussian.hpp"

namespace hgmm {

/// Label value that marks an injected noise instance in flat files.
inline constexpr std::string_view kNoiseToken = "__noise__";

/// Row-major instance matrix plus optional ground truth.
///
/// `labels` is either empty (unlabeled data) or has one entry per row;
/// an entry is nullopt exactly when the row is flagged as noise.
struct Dataset {
  Matrix features;
  std::vector<std::optional<std::string>> labels;
  std::vector<bool> noise;
  std::vector<std::string> column_names;
  std::string label_column;

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }
  bool has_labels() const { return !labels.empty(); }
  std::size_t noise_count() const;

  /// Distinct class names in order of first appearance.
  std::vector<std::string> class_names() const;

  /// Throws std::invalid_argument when an invariant does not hold.
  void validate() const;
};

/// Rows of `features` selected by `indices`, in order.
Matrix select_rows(const Matrix& features, const std::vector<Eigen::Index>& indices);

/// Number of pairwise distinct rows (exact equality of every coordinate).
std::size_t count_distinct_rows(const Matrix& points);

/// Indices of the first occurrence of every distinct row, in row order.
std::vector<Eigen::Index> distinct_row_indices(const Matrix& points);

/// Parse failure with a 1-based line number (0 when not line specific).
class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Reads a comma-separated table with a header row. When `label_column` is
/// given, that column becomes the class label and every other column must be
/// numeric; the value __noise__ flags the row as noise.
Dataset load_csv(std::istream& in, const std::optional<std::string>& label_column);
Dataset load_csv_file(const std::string& path, const std::optional<std::string>& label_column);

/// Writes features with 17 significant digits, followed by the label column
/// (named `label_column`, or "class") when the dataset is labeled.
void save_csv(std::ostream& out, const Dataset& ds);
void save_csv_file(const std::string& path, const Dataset& ds);

/// Appends floor(ratio * m) noise rows drawn uniformly from the per-dimension
/// bounding box of the original rows. Originals are left untouched.
Dataset inject_uniform_noise(const Dataset& ds, double ratio, std::mt19937_64& rng);

enum class ToyKind { kLargeCenter, kLowNoise, kHighNoise };

/// Generator settings for the 2-d toy sets. Defaults reproduce the three
/// standard variants; every field can be overridden.
struct ToyConfig {
  int center_points = 300;
  double center_sigma = 1.0;
  int side_points = 75;
  double side_sigma = 0.25;
  double side_offset = 4.0;
  int ring_clusters = 5;
  int ring_points = 60;
  double ring_sigma = 0.2;
  double ring_radius = 3.0;
  double low_noise_fraction = 0.10;
  double high_noise_fraction = 0.50;
};

ToyKind parse_toy_kind(std::string_view name);
std::string_view toy_kind_name(ToyKind kind);

Dataset generate_toy(ToyKind kind, std::uint64_t seed, const ToyConfig& config = {});

}  // namespace hgmm

#endif  // HGMM_DATASET_HPP
