#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "bandit_forge/context.hpp"

namespace bforge {

struct MultilabelRow {
  Context features;
  /// Sorted, duplicate-free label indices. May be empty.
  std::vector<std::uint32_t> labels;

  bool has_label(std::size_t label) const noexcept;
  friend bool operator==(const MultilabelRow&, const MultilabelRow&) = default;
};

struct MultilabelDataset {
  std::size_t n_features = 0;
  std::size_t n_labels = 0;
  std::vector<MultilabelRow> rows;

  std::size_t n_rows() const noexcept { return rows.size(); }
  /// Number of rows carrying each label.
  std::vector<std::size_t> label_counts() const;

  friend bool operator==(const MultilabelDataset&, const MultilabelDataset&) = default;
};

struct ParseOptions {
  /// Index base of label ids in the file (0 or 1).
  int label_base = 0;
  /// Index base of feature ids in the file (0 or 1).
  int feature_base = 0;
};

/// Reads the Extreme Classification repository text format:
///
///   n_rows n_features n_labels
///   l1,l2,... f1:v1 f2:v2 ...
///
/// A line starting with whitespace has an empty label set. Throws
/// HeaderMalformed, IndexOutOfRange, ValueUnparsable, or RowCountMismatch.
MultilabelDataset parse_xc(std::istream& in, const ParseOptions& opts = {});

/// parse_xc over a file; gzip-compressed input is detected and inflated.
MultilabelDataset load_xc(const std::filesystem::path& path, const ParseOptions& opts = {});

/// Writes 0-based XC text that parse_xc reads back to an equal dataset.
void write_xc(std::ostream& out, const MultilabelDataset& ds);

/// Uniform row permutation, deterministic in `seed`.
MultilabelDataset shuffle_rows(const MultilabelDataset& ds, std::uint64_t seed);

/// The permutation shuffle_rows applies: row i of the result is row
/// order[i] of the input.
std::vector<std::size_t> shuffle_order(std::size_t n, std::uint64_t seed);

/// The label subset restrict_arms keeps, ascending.
std::vector<std::uint32_t> sample_arm_subset(std::size_t n_labels, std::size_t k_subset,
                                             std::uint64_t seed);

struct ArmRestriction {
  MultilabelDataset data;
  /// kept[j] is the original label index now numbered j.
  std::vector<std::uint32_t> kept;
};

/// Keeps a uniformly drawn subset of k_subset labels, renumbered in
/// ascending original order. Rows are kept even if left label-free.
/// SubsetTooLarge unless 1 <= k_subset <= n_labels.
ArmRestriction restrict_arms(const MultilabelDataset& ds, std::size_t k_subset, std::uint64_t seed);

/// Drops the n_drop most frequent labels (ties to the lower index).
ArmRestriction drop_most_common_labels(const MultilabelDataset& ds, std::size_t n_drop);

struct DatasetStats {
  std::size_t n_rows = 0;
  std::size_t n_features = 0;
  std::size_t n_labels = 0;
  double labels_per_obs = 0.0;
  double obs_per_label = 0.0;
  std::size_t most_common_label = 0;
  double most_common_frac = 0.0;
};

DatasetStats dataset_stats(const MultilabelDataset& ds);

}  // namespace bforge
