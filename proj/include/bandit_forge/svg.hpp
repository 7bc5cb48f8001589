#pragma once

#include <istream>
#include <string>
#include <vector>

namespace bforge {

struct Curve {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct CurveTable {
  /// `#` lines preceding the header, without the leading '#'.
  std::vector<std::string> comments;
  std::vector<Curve> curves;
};

/// Reads cumulative-mean curves from a simulate CSV: either the long format
/// (policy, round, cumulative_mean_reward) or a per-run file (round,
/// cumulative_mean_reward, ...), which yields one curve named `fallback_name`.
/// ParseError on a missing header column, a bad number, or an empty body.
CurveTable read_curves_csv(std::istream& in, const std::string& fallback_name = "run");

/// Static line chart: one polyline per curve, linear axes with labelled
/// ticks, legend in curve order. `comment` becomes the first line.
std::string render_svg(const std::vector<Curve>& curves, const std::string& comment = {});

/// Round tick spacing covering [lo, hi] with roughly `target` ticks.
std::vector<double> nice_ticks(double lo, double hi, int target = 5);

}  // namespace bforge
