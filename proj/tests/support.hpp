#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "bandit_forge/datasets.hpp"
#include "bandit_forge/rng.hpp"

namespace bforge::testing {

// Multilabel data from k fixed linear scorers: label a is on when
// w_a . x > cut. Rows carry `nnz` random features out of `dim`.
inline MultilabelDataset synthetic_multilabel(std::size_t n_rows, std::size_t dim, std::size_t k,
                                              std::uint64_t seed, std::size_t nnz = 6, double cut = 1.5) {
  RngStream rng(seed, 1);
  std::vector<std::vector<double>> w(k, std::vector<double>(dim));
  for (auto& row : w) {
    for (double& v : row) v = rng.normal();
  }
  MultilabelDataset ds;
  ds.n_features = dim;
  ds.n_labels = k;
  for (std::size_t i = 0; i < n_rows; ++i) {
    std::vector<double> x(dim, 0.0);
    for (std::size_t j = 0; j < nnz; ++j) x[rng.uniform_index(dim)] = rng.normal();
    MultilabelRow row;
    row.features = Context::dense(x);
    for (std::size_t a = 0; a < k; ++a) {
      double s = 0.0;
      for (std::size_t j = 0; j < dim; ++j) s += w[a][j] * x[j];
      if (s > cut) row.labels.push_back(static_cast<std::uint32_t>(a));
    }
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

inline std::vector<double> random_dense(RngStream& rng, std::size_t dim, double scale = 1.0) {
  std::vector<double> v(dim);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("bandit_forge_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline bool rel_close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-12});
}

}  // namespace bforge::testing
