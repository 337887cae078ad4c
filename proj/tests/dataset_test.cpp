#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "hgmm/dataset.hpp"
#include "support.hpp"

namespace hgmm {
namespace {

Dataset parse(const std::string& text, std::optional<std::string> label = "class") {
  std::istringstream in(text);
  return load_csv(in, label);
}

TEST(LoadCsv, Iris) {
  const Dataset ds = load_csv_file(testing::data_path("iris.csv"), "class");
  EXPECT_EQ(ds.size(), 150);
  EXPECT_EQ(ds.dim(), 4);
  EXPECT_EQ(ds.class_names().size(), 3u);
  EXPECT_EQ(ds.noise_count(), 0u);
  EXPECT_NO_THROW(ds.validate());
}

TEST(LoadCsv, Wine) {
  const Dataset ds = load_csv_file(testing::data_path("wine.csv"), "class");
  EXPECT_EQ(ds.size(), 178);
  EXPECT_EQ(ds.dim(), 13);
  EXPECT_EQ(ds.class_names().size(), 3u);
}

TEST(LoadCsv, SingleRow) {
  const Dataset ds = parse("a,b,class\n1.5,2,A\n");
  EXPECT_EQ(ds.size(), 1);
  EXPECT_EQ(ds.features(0, 0), 1.5);
  EXPECT_EQ(*ds.labels[0], "A");
  EXPECT_EQ(ds.column_names, (std::vector<std::string>{"a", "b"}));
}

TEST(LoadCsv, NoiseToken) {
  const Dataset ds = parse("a,class\n1,A\n2,__noise__\n");
  EXPECT_FALSE(ds.labels[1].has_value());
  EXPECT_TRUE(ds.noise[1]);
  EXPECT_EQ(ds.noise_count(), 1u);
}

TEST(LoadCsv, Unlabeled) {
  const Dataset ds = parse("a,b\n1,2\n3,4\n", std::nullopt);
  EXPECT_FALSE(ds.has_labels());
  EXPECT_EQ(ds.size(), 2);
}

TEST(LoadCsv, ErrorsCarryLineNumbers) {
  try {
    parse("a,b,class\n1,2,A\n1,x,B\n");
    FAIL();
  } catch (const CsvError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("(line 3)"), std::string::npos);
  }
  try {
    parse("a,b,class\n1,2,A\n1,2\n");
    FAIL();
  } catch (const CsvError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse("a,b\n1,2\n", "class"), CsvError);
  EXPECT_THROW(parse(""), CsvError);
  EXPECT_THROW(parse("a,class\n"), CsvError);
}

TEST(LoadCsv, MissingFileNamesPath) {
  try {
    load_csv_file("/nonexistent/file.csv", "class");
    FAIL();
  } catch (const std::ios_base::failure& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/file.csv"), std::string::npos);
  }
}

TEST(SaveCsv, RoundTripIsLossless) {
  const Dataset ds = generate_toy(ToyKind::kLowNoise, 3);
  std::ostringstream out;
  save_csv(out, ds);
  const Dataset back = parse(out.str(), "class");
  EXPECT_EQ(back.features, ds.features);
  EXPECT_EQ(back.labels, ds.labels);
  EXPECT_EQ(back.noise, ds.noise);
}

TEST(InjectNoise, RowCounts) {
  std::mt19937_64 rng(2);
  const Dataset iris = load_csv_file(testing::data_path("iris.csv"), "class");
  const Dataset noisy = inject_uniform_noise(iris, 0.5, rng);
  EXPECT_EQ(noisy.size(), 225);
  EXPECT_EQ(noisy.noise_count(), 75u);

  Dataset extra = iris;
  extra.features.conservativeResize(151, Eigen::NoChange);
  extra.features.row(150) = iris.features.row(0);
  extra.labels.push_back(iris.labels[0]);
  extra.noise.push_back(false);
  EXPECT_EQ(inject_uniform_noise(extra, 0.5, rng).size(), 226);

  Dataset tiny = parse("a,class\n1,A\n2,B\n");
  EXPECT_EQ(inject_uniform_noise(tiny, 0.4, rng).size(), 2);
}

TEST(InjectNoise, StaysInBoundingBoxAndKeepsOriginals) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Dataset ds;
    const Eigen::Index m = 5 + trial, d = 1 + trial % 4;
    ds.features.resize(m, d);
    for (Eigen::Index i = 0; i < m; ++i) ds.features.row(i) = testing::random_vector(d, rng, 1.0 + trial);
    if (trial % 5 == 0) ds.features.col(0).setConstant(2.5);  // degenerate dimension
    ds.noise.assign(static_cast<std::size_t>(m), false);
    const double ratio = 0.1 * (1 + trial % 10);
    const Dataset out = inject_uniform_noise(ds, ratio, rng);
    EXPECT_EQ(out.size(), m + static_cast<Eigen::Index>(std::floor(ratio * static_cast<double>(m) + 1e-9)));
    EXPECT_EQ(out.features.topRows(m), ds.features);
    const Vector lo = ds.features.colwise().minCoeff().transpose();
    const Vector hi = ds.features.colwise().maxCoeff().transpose();
    for (Eigen::Index i = m; i < out.size(); ++i) {
      EXPECT_TRUE(out.noise[static_cast<std::size_t>(i)]);
      for (Eigen::Index j = 0; j < d; ++j) {
        EXPECT_GE(out.features(i, j), lo(j));
        EXPECT_LE(out.features(i, j), hi(j));
      }
    }
  }
}

TEST(InjectNoise, RejectsNegativeRatio) {
  std::mt19937_64 rng(4);
  EXPECT_THROW(inject_uniform_noise(parse("a,class\n1,A\n"), -0.1, rng), std::invalid_argument);
}

TEST(Toy, CountsAndDeterminism) {
  const Dataset lc = generate_toy(ToyKind::kLargeCenter, 1);
  EXPECT_EQ(lc.size(), 495);
  EXPECT_EQ(lc.noise_count(), 45u);
  const Dataset ln = generate_toy(ToyKind::kLowNoise, 1);
  EXPECT_EQ(ln.size(), 330);
  EXPECT_EQ(ln.noise_count(), 30u);
  const Dataset hn = generate_toy(ToyKind::kHighNoise, 1);
  EXPECT_EQ(hn.size(), 450);
  EXPECT_EQ(hn.noise_count(), 150u);
  EXPECT_EQ(hn.class_names().size(), 5u);

  EXPECT_EQ(generate_toy(ToyKind::kHighNoise, 1).features, hn.features);
  EXPECT_NE(generate_toy(ToyKind::kHighNoise, 2).features, hn.features);
  for (auto kind : {ToyKind::kLargeCenter, ToyKind::kLowNoise, ToyKind::kHighNoise})
    EXPECT_EQ(parse_toy_kind(toy_kind_name(kind)), kind);
  EXPECT_THROW(parse_toy_kind("nope"), std::invalid_argument);
}

TEST(Rows, DistinctCounting) {
  Matrix x(5, 2);
  x << 1, 1, 2, 2, 1, 1, 3, 3, 2, 2;
  EXPECT_EQ(count_distinct_rows(x), 3u);
  EXPECT_EQ(distinct_row_indices(x), (std::vector<Eigen::Index>{0, 1, 3}));
  EXPECT_EQ(select_rows(x, {3, 0}).row(0), x.row(3));
}

}  // namespace
}  // namespace hgmm
