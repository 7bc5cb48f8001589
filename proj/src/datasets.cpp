#include "bandit_forge/datasets.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "bandit_forge/errors.hpp"
#include "bandit_forge/rng.hpp"

namespace bforge {

bool MultilabelRow::has_label(std::size_t label) const noexcept {
  return std::binary_search(labels.begin(), labels.end(), static_cast<std::uint32_t>(label));
}

std::vector<std::size_t> MultilabelDataset::label_counts() const {
  std::vector<std::size_t> counts(n_labels, 0);
  for (const auto& row : rows) {
    for (auto l : row.labels) counts[l] += 1;
  }
  return counts;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

template <class T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::uint32_t parse_index(std::string_view tok, int base, std::size_t bound, std::size_t line_no,
                          const char* what) {
  long long v = 0;
  if (!parse_number(tok, v)) {
    throw ValueUnparsable(std::string("unparsable ") + what + " index '" + std::string(tok) + "'",
                          line_no);
  }
  v -= base;
  if (v < 0 || static_cast<unsigned long long>(v) >= bound) {
    throw IndexOutOfRange(std::string(what) + " index " + std::string(tok) + " out of range [" +
                              std::to_string(base) + ", " + std::to_string(bound + base) + ")",
                          line_no);
  }
  return static_cast<std::uint32_t>(v);
}

MultilabelRow parse_row(std::string_view line, std::size_t line_no, const MultilabelDataset& ds,
                        const ParseOptions& opts) {
  MultilabelRow row;
  auto tokens = split_ws(line);
  std::size_t first_feature = 0;
  const bool has_label_field =
      !line.empty() && !is_space(line.front()) && !tokens.empty() &&
      tokens.front().find(':') == std::string_view::npos;
  if (has_label_field) {
    std::string_view field = tokens.front();
    std::size_t pos = 0;
    while (pos <= field.size()) {
      const std::size_t comma = std::min(field.find(',', pos), field.size());
      const auto tok = field.substr(pos, comma - pos);
      if (!tok.empty()) row.labels.push_back(parse_index(tok, opts.label_base, ds.n_labels, line_no, "label"));
      pos = comma + 1;
    }
    std::sort(row.labels.begin(), row.labels.end());
    row.labels.erase(std::unique(row.labels.begin(), row.labels.end()), row.labels.end());
    first_feature = 1;
  }

  std::vector<std::uint32_t> idx;
  std::vector<double> val;
  for (std::size_t t = first_feature; t < tokens.size(); ++t) {
    const auto tok = tokens[t];
    const auto colon = tok.find(':');
    if (colon == std::string_view::npos) {
      throw ValueUnparsable("feature token '" + std::string(tok) + "' lacks ':'", line_no);
    }
    const std::uint32_t f = parse_index(tok.substr(0, colon), opts.feature_base, ds.n_features,
                                        line_no, "feature");
    double v = 0.0;
    if (!parse_number(tok.substr(colon + 1), v)) {
      throw ValueUnparsable("unparsable feature value '" + std::string(tok) + "'", line_no);
    }
    if (!idx.empty() && f <= idx.back()) {
      throw ValueUnparsable("feature indices must be strictly increasing", line_no);
    }
    idx.push_back(f);
    val.push_back(v);
  }
  row.features = Context(ds.n_features, std::move(idx), std::move(val));
  return row;
}

}  // namespace

MultilabelDataset parse_xc(std::istream& in, const ParseOptions& opts) {
  if ((opts.label_base != 0 && opts.label_base != 1) ||
      (opts.feature_base != 0 && opts.feature_base != 1)) {
    throw InvalidArgument("parse_xc: index bases must be 0 or 1");
  }
  std::string line;
  if (!std::getline(in, line)) throw HeaderMalformed("missing header line");
  const auto head = split_ws(line);
  std::size_t n_rows = 0;
  MultilabelDataset ds;
  if (head.size() != 3 || !parse_number(head[0], n_rows) || !parse_number(head[1], ds.n_features) ||
      !parse_number(head[2], ds.n_labels)) {
    throw HeaderMalformed("header must be 'n_rows n_features n_labels', got '" + line + "'");
  }
  ds.rows.reserve(n_rows);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ds.rows.push_back(parse_row(line, line_no, ds, opts));
  }
  if (ds.rows.size() != n_rows) {
    throw RowCountMismatch("header declares " + std::to_string(n_rows) + " rows, found " +
                           std::to_string(ds.rows.size()));
  }
  return ds;
}

MultilabelDataset load_xc(const std::filesystem::path& path, const ParseOptions& opts) {
  // gzread passes uncompressed files through unchanged, so one reader
  // covers both plain and .gz inputs.
  gzFile f = gzopen(path.string().c_str(), "rb");
  if (!f) throw ParseError("cannot open dataset '" + path.string() + "'");
  std::string text;
  char buf[1 << 16];
  int got = 0;
  while ((got = gzread(f, buf, sizeof buf)) > 0) text.append(buf, static_cast<std::size_t>(got));
  int err = 0;
  const char* msg = got < 0 ? gzerror(f, &err) : nullptr;
  const std::string err_text = msg ? msg : "";
  gzclose(f);
  if (got < 0) throw ParseError("error reading '" + path.string() + "': " + err_text);
  std::istringstream in(std::move(text));
  return parse_xc(in, opts);
}

void write_xc(std::ostream& out, const MultilabelDataset& ds) {
  out << ds.n_rows() << ' ' << ds.n_features << ' ' << ds.n_labels << '\n';
  char num[64];
  for (const auto& row : ds.rows) {
    for (std::size_t i = 0; i < row.labels.size(); ++i) out << (i ? "," : "") << row.labels[i];
    const auto idx = row.features.indices();
    const auto val = row.features.values();
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const auto res = std::to_chars(num, num + sizeof num, val[k]);
      out << ' ' << idx[k] << ':' << std::string_view(num, static_cast<std::size_t>(res.ptr - num));
    }
    out << '\n';
  }
}

std::vector<std::size_t> shuffle_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  RngStream rng(seed, hash_name("shuffle_rows"));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.uniform_index(i)]);
  }
  return order;
}

MultilabelDataset shuffle_rows(const MultilabelDataset& ds, std::uint64_t seed) {
  MultilabelDataset out;
  out.n_features = ds.n_features;
  out.n_labels = ds.n_labels;
  const auto order = shuffle_order(ds.n_rows(), seed);
  out.rows.reserve(order.size());
  for (std::size_t i : order) out.rows.push_back(ds.rows[i]);
  return out;
}

namespace {

ArmRestriction keep_labels(const MultilabelDataset& ds, std::vector<std::uint32_t> kept) {
  std::sort(kept.begin(), kept.end());
  std::vector<std::int64_t> remap(ds.n_labels, -1);
  for (std::size_t j = 0; j < kept.size(); ++j) remap[kept[j]] = static_cast<std::int64_t>(j);
  ArmRestriction out;
  out.data.n_features = ds.n_features;
  out.data.n_labels = kept.size();
  out.data.rows.reserve(ds.n_rows());
  for (const auto& row : ds.rows) {
    MultilabelRow r;
    r.features = row.features;
    for (auto l : row.labels) {
      if (remap[l] >= 0) r.labels.push_back(static_cast<std::uint32_t>(remap[l]));
    }
    out.data.rows.push_back(std::move(r));
  }
  out.kept = std::move(kept);
  return out;
}

}  // namespace

std::vector<std::uint32_t> sample_arm_subset(std::size_t n_labels, std::size_t k_subset,
                                             std::uint64_t seed) {
  if (k_subset < 1 || k_subset > n_labels) {
    throw SubsetTooLarge("arm subset size " + std::to_string(k_subset) + " must lie in [1, " +
                         std::to_string(n_labels) + "]");
  }
  std::vector<std::uint32_t> all(n_labels);
  std::iota(all.begin(), all.end(), 0u);
  RngStream rng(seed, hash_name("restrict_arms"));
  // Partial Fisher-Yates: the first k_subset entries are a uniform sample.
  for (std::size_t i = 0; i < k_subset; ++i) {
    std::swap(all[i], all[i + rng.uniform_index(all.size() - i)]);
  }
  all.resize(k_subset);
  std::sort(all.begin(), all.end());
  return all;
}

ArmRestriction restrict_arms(const MultilabelDataset& ds, std::size_t k_subset, std::uint64_t seed) {
  return keep_labels(ds, sample_arm_subset(ds.n_labels, k_subset, seed));
}

ArmRestriction drop_most_common_labels(const MultilabelDataset& ds, std::size_t n_drop) {
  if (n_drop >= ds.n_labels) {
    throw SubsetTooLarge("drop_most_common_labels: cannot drop every label");
  }
  const auto counts = ds.label_counts();
  std::vector<std::uint32_t> order(ds.n_labels);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return counts[a] > counts[b]; });
  return keep_labels(ds, std::vector<std::uint32_t>(order.begin() + static_cast<std::ptrdiff_t>(n_drop),
                                                    order.end()));
}

DatasetStats dataset_stats(const MultilabelDataset& ds) {
  DatasetStats st;
  st.n_rows = ds.n_rows();
  st.n_features = ds.n_features;
  st.n_labels = ds.n_labels;
  const auto counts = ds.label_counts();
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (st.n_rows > 0) st.labels_per_obs = total / static_cast<double>(st.n_rows);
  if (st.n_labels > 0) {
    st.obs_per_label = total / static_cast<double>(st.n_labels);
    const auto it = std::max_element(counts.begin(), counts.end());
    st.most_common_label = static_cast<std::size_t>(it - counts.begin());
    if (st.n_rows > 0) st.most_common_frac = static_cast<double>(*it) / static_cast<double>(st.n_rows);
  }
  return st;
}

}  // namespace bforge
