#include <doctest.h>

#include <zlib.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "bandit_forge/datasets.hpp"
#include "bandit_forge/errors.hpp"
#include "support.hpp"

using namespace bforge;

namespace {

MultilabelDataset parse(const std::string& text, ParseOptions opts = {}) {
  std::istringstream in(text);
  return parse_xc(in, opts);
}

template <class E>
std::size_t error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const E& e) {
    return e.line();
  }
  FAIL("no error raised");
  return 0;
}

}  // namespace

TEST_SUITE("datasets") {

TEST_CASE("parses the small example") {
  const auto ds = parse("2 3 2\n0,1 0:1.5 2:-1\n1 1:2\n");
  REQUIRE(ds.n_rows() == 2);
  CHECK(ds.n_features == 3);
  CHECK(ds.n_labels == 2);
  CHECK(ds.rows[0].labels == std::vector<std::uint32_t>{0, 1});
  CHECK(ds.rows[0].features.to_dense() == std::vector<double>{1.5, 0.0, -1.0});
  CHECK(ds.rows[1].labels == std::vector<std::uint32_t>{1});
  CHECK(ds.rows[1].features.to_dense() == std::vector<double>{0.0, 2.0, 0.0});
  CHECK(ds.rows[0].has_label(1));
  CHECK_FALSE(ds.rows[1].has_label(0));
}

TEST_CASE("leading whitespace means no labels; empty lines are empty rows") {
  const auto ds = parse("3 2 2\n 0:1\n\n1,0,1\n");
  CHECK(ds.rows[0].labels.empty());
  CHECK(ds.rows[0].features.nnz() == 1);
  CHECK(ds.rows[1].labels.empty());
  CHECK(ds.rows[1].features.nnz() == 0);
  CHECK(ds.rows[2].labels == std::vector<std::uint32_t>{0, 1});
}

TEST_CASE("one-based indices") {
  const auto ds = parse("1 3 2\n2 3:4\n", {1, 1});
  CHECK(ds.rows[0].labels == std::vector<std::uint32_t>{1});
  CHECK(ds.rows[0].features.to_dense() == std::vector<double>{0.0, 0.0, 4.0});
  CHECK_THROWS_AS(parse("1 3 2\n0 1:1\n", {1, 0}), IndexOutOfRange);
  CHECK_THROWS_AS(parse("1 3 2\n0 1:1\n", {2, 0}), InvalidArgument);
}

TEST_CASE("parse errors carry line numbers") {
  CHECK_THROWS_AS(parse(""), HeaderMalformed);
  CHECK_THROWS_AS(parse("2 3\n"), HeaderMalformed);
  CHECK_THROWS_AS(parse("x 3 2\n"), HeaderMalformed);
  CHECK(error_line<IndexOutOfRange>("2 3 2\n0 0:1\n2 0:1\n") == 3);
  CHECK(error_line<IndexOutOfRange>("1 3 2\n0 3:1\n") == 2);
  CHECK(error_line<ValueUnparsable>("2 3 2\n0 0:1\n0 1:abc\n") == 3);
  CHECK(error_line<ValueUnparsable>("1 3 2\n0 1\n") == 2);
  CHECK(error_line<ValueUnparsable>("1 3 2\n0 2:1 1:1\n") == 2);
  CHECK_THROWS_AS(parse("3 3 2\n0 0:1\n"), RowCountMismatch);
  CHECK_THROWS_AS(parse("1 3 2\n0 0:1\n1 0:1\n"), RowCountMismatch);
}

TEST_CASE("write then parse round-trips") {
  auto ds = testing::synthetic_multilabel(60, 12, 5, 3);
  ds.rows[4].labels.clear();
  std::ostringstream out;
  write_xc(out, ds);
  CHECK(parse(out.str()) == ds);
}

TEST_CASE("load_xc reads plain and gzip files") {
  const auto ds = testing::synthetic_multilabel(40, 8, 4, 4);
  std::ostringstream out;
  write_xc(out, ds);
  const auto dir = testing::scratch_dir("datasets_load");
  {
    std::ofstream f(dir / "plain.txt");
    f << out.str();
  }
  gzFile gz = gzopen((dir / "packed.txt.gz").string().c_str(), "wb");
  REQUIRE(gz);
  const std::string text = out.str();
  gzwrite(gz, text.data(), static_cast<unsigned>(text.size()));
  gzclose(gz);
  CHECK(load_xc(dir / "plain.txt") == ds);
  CHECK(load_xc(dir / "packed.txt.gz") == ds);
  CHECK_THROWS_AS(load_xc(dir / "missing.txt"), ParseError);
}

TEST_CASE("shuffle_rows") {
  const auto one = testing::synthetic_multilabel(1, 4, 2, 5);
  CHECK(shuffle_rows(one, 9) == one);

  const auto ds = testing::synthetic_multilabel(200, 6, 3, 5);
  const auto a = shuffle_rows(ds, 1);
  CHECK(a == shuffle_rows(ds, 1));
  CHECK_FALSE(a == shuffle_rows(ds, 2));
  CHECK_FALSE(a == ds);
  auto order = shuffle_order(200, 1);
  for (std::size_t i = 0; i < order.size(); ++i) CHECK(a.rows[i] == ds.rows[order[i]]);
  std::sort(order.begin(), order.end());
  for (std::size_t i = 0; i < order.size(); ++i) CHECK(order[i] == i);
}

TEST_CASE("restrict_arms") {
  const auto ds = testing::synthetic_multilabel(100, 6, 5, 6, 6, 0.5);
  const auto same = restrict_arms(ds, 5, 3);
  CHECK(same.data == ds);
  CHECK(same.kept == std::vector<std::uint32_t>{0, 1, 2, 3, 4});

  const auto sub = restrict_arms(ds, 2, 11);
  REQUIRE(sub.kept.size() == 2);
  CHECK(sub.kept[0] < sub.kept[1]);
  CHECK(sub.data.n_labels == 2);
  CHECK(sub.data.n_rows() == ds.n_rows());
  for (std::size_t i = 0; i < ds.n_rows(); ++i) {
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(sub.data.rows[i].has_label(j) == ds.rows[i].has_label(sub.kept[j]));
  }
  CHECK_THROWS_AS(restrict_arms(ds, 6, 1), SubsetTooLarge);
  CHECK_THROWS_AS(restrict_arms(ds, 0, 1), SubsetTooLarge);

  MultilabelDataset sparse = parse("3 2 4\n0 0:1\n0,1 1:1\n1 0:2\n");
  const auto dead = restrict_arms(sparse, 4, 0);
  CHECK(dead.data.label_counts()[3] == 0);

  // Every label eventually gets drawn across seeds.
  std::set<std::uint32_t> seen;
  for (std::uint64_t s = 0; s < 50; ++s)
    for (auto l : sample_arm_subset(5, 1, s)) seen.insert(l);
  CHECK(seen.size() == 5);
}

TEST_CASE("drop_most_common_labels") {
  const auto ds = parse("4 1 3\n0,1 0:1\n1 0:1\n1,2 0:1\n2 0:1\n");
  const auto r = drop_most_common_labels(ds, 1);
  CHECK(r.kept == std::vector<std::uint32_t>{0, 2});
  CHECK(r.data.rows[0].labels == std::vector<std::uint32_t>{0});
  CHECK(r.data.rows[1].labels.empty());
  CHECK(r.data.rows[2].labels == std::vector<std::uint32_t>{1});
  // Tie between labels 0 and 2 after label 1: the lower index goes first.
  CHECK(drop_most_common_labels(ds, 2).kept == std::vector<std::uint32_t>{0});
  CHECK_THROWS_AS(drop_most_common_labels(ds, 3), SubsetTooLarge);
}

TEST_CASE("dataset_stats") {
  const auto ds = parse("4 2 3\n0,1 0:1\n1 0:1\n1,2 0:1\n 1:1\n");
  const auto st = dataset_stats(ds);
  CHECK(st.n_rows == 4);
  CHECK(st.n_features == 2);
  CHECK(st.n_labels == 3);
  CHECK(st.labels_per_obs == doctest::Approx(5.0 / 4.0));
  CHECK(st.obs_per_label == doctest::Approx(5.0 / 3.0));
  CHECK(st.most_common_label == 1);
  CHECK(st.most_common_frac == doctest::Approx(0.75));
}

}
