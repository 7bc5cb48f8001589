#include "bandit_forge/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <string_view>

#include "bandit_forge/errors.hpp"

namespace bforge {

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

double parse_double(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ValueUnparsable("bad number '" + std::string(s) + "'", line_no);
  }
  return v;
}

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

std::string tick_label(double v) {
  if (v == 0.0) return "0";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
  return std::string(buf, res.ptr);
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// "--" may not appear inside an XML comment.
std::string comment_safe(std::string s) {
  std::size_t pos = 0;
  while ((pos = s.find("--", pos)) != std::string::npos) s.replace(pos, 2, "- -");
  return s;
}

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                                    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

CurveTable read_curves_csv(std::istream& in, const std::string& fallback_name) {
  CurveTable table;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '#') {
      const auto text = line.find_first_not_of(" \t", 1);
      table.comments.push_back(text == std::string::npos ? std::string() : line.substr(text));
      continue;
    }
    if (line.empty()) continue;
    header_line = line;
    break;
  }
  if (header_line.empty()) throw ParseError("CSV has no header");
  header = split_commas(header_line);
  auto col = [&](std::string_view name) -> std::ptrdiff_t {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : it - header.begin();
  };
  const auto c_policy = col("policy");
  const auto c_round = col("round");
  const auto c_value = col("cumulative_mean_reward");
  if (c_round < 0 || c_value < 0) {
    throw HeaderMalformed("CSV header needs 'round' and 'cumulative_mean_reward' columns");
  }

  std::map<std::string, std::size_t> index;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_commas(line);
    if (fields.size() != header.size()) {
      throw ValueUnparsable("expected " + std::to_string(header.size()) + " fields", line_no);
    }
    const std::string name = c_policy >= 0 ? std::string(fields[static_cast<std::size_t>(c_policy)]) : fallback_name;
    auto [it, inserted] = index.try_emplace(name, table.curves.size());
    if (inserted) table.curves.push_back({name, {}, {}});
    auto& curve = table.curves[it->second];
    curve.x.push_back(parse_double(fields[static_cast<std::size_t>(c_round)], line_no));
    curve.y.push_back(parse_double(fields[static_cast<std::size_t>(c_value)], line_no));
  }
  if (table.curves.empty()) throw ParseError("CSV has no data rows");
  return table;
}

std::vector<double> nice_ticks(double lo, double hi, int target) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / std::max(1, target);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  const double first = std::ceil(lo / step - 1e-9) * step;
  for (double v = first; v <= hi + step * 1e-9; v += step) ticks.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
  return ticks;
}

std::string render_svg(const std::vector<Curve>& curves, const std::string& comment) {
  constexpr double W = 800, H = 500, L = 70, R = 200, T = 30, B = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& c : curves) {
    for (double v : c.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : c.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 <= x0) x0 -= 0.5, x1 += 0.5;
  // Flat curves still get a visible y range.
  if (y1 <= y0) {
    const double pad = std::max(0.05, std::abs(y0) * 0.1);
    y0 -= pad;
    y1 += pad;
  }
  y0 = std::min(y0, 0.0);
  const double pw = W - L - R, ph = H - T - B;
  auto sx = [&](double v) { return L + (v - x0) / (x1 - x0) * pw; };
  auto sy = [&](double v) { return T + ph - (v - y0) / (y1 - y0) * ph; };

  std::string s;
  if (!comment.empty()) s += "<!-- " + comment_safe(comment) + " -->\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" viewBox=\"0 0 800 500\" "
       "font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
  s += "<g class=\"axes\" stroke=\"black\">\n";
  s += "<line x1=\"" + fmt(L) + "\" y1=\"" + fmt(T + ph) + "\" x2=\"" + fmt(L + pw) + "\" y2=\"" + fmt(T + ph) + "\"/>\n";
  s += "<line x1=\"" + fmt(L) + "\" y1=\"" + fmt(T) + "\" x2=\"" + fmt(L) + "\" y2=\"" + fmt(T + ph) + "\"/>\n";
  s += "</g>\n<g class=\"ticks\">\n";
  for (double v : nice_ticks(x0, x1)) {
    s += "<line x1=\"" + fmt(sx(v)) + "\" y1=\"" + fmt(T + ph) + "\" x2=\"" + fmt(sx(v)) + "\" y2=\"" +
         fmt(T + ph + 5) + "\" stroke=\"black\"/>";
    s += "<text class=\"xtick\" x=\"" + fmt(sx(v)) + "\" y=\"" + fmt(T + ph + 18) + "\" text-anchor=\"middle\">" +
         tick_label(v) + "</text>\n";
  }
  for (double v : nice_ticks(y0, y1)) {
    s += "<line x1=\"" + fmt(L - 5) + "\" y1=\"" + fmt(sy(v)) + "\" x2=\"" + fmt(L) + "\" y2=\"" + fmt(sy(v)) +
         "\" stroke=\"black\"/>";
    s += "<text class=\"ytick\" x=\"" + fmt(L - 8) + "\" y=\"" + fmt(sy(v) + 4) + "\" text-anchor=\"end\">" +
         tick_label(v) + "</text>\n";
  }
  s += "</g>\n";
  s += "<text x=\"" + fmt(L + pw / 2) + "\" y=\"" + fmt(H - 10) + "\" text-anchor=\"middle\">round</text>\n";
  s += "<text x=\"15\" y=\"" + fmt(T + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 15 " +
       fmt(T + ph / 2) + ")\">cumulative mean reward</text>\n";

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i];
    const char* colour = kPalette[i % std::size(kPalette)];
    s += "<polyline class=\"curve\" data-name=\"" + xml_escape(c.name) + "\" fill=\"none\" stroke=\"" + colour +
         "\" stroke-width=\"1.5\" points=\"";
    // Keep at most ~2000 vertices; the chart cannot show more.
    const std::size_t stride = std::max<std::size_t>(1, c.x.size() / 2000);
    for (std::size_t k = 0; k < c.x.size(); k += stride) {
      s += fmt(sx(c.x[k])) + "," + fmt(sy(c.y[k])) + " ";
    }
    if (!c.x.empty() && (c.x.size() - 1) % stride != 0) s += fmt(sx(c.x.back())) + "," + fmt(sy(c.y.back()));
    s += "\"/>\n";
    const double ly = T + 10 + 18.0 * static_cast<double>(i);
    s += "<line x1=\"" + fmt(W - R + 15) + "\" y1=\"" + fmt(ly) + "\" x2=\"" + fmt(W - R + 35) + "\" y2=\"" + fmt(ly) +
         "\" stroke=\"" + colour + "\" stroke-width=\"2\"/>";
    s += "<text class=\"legend\" x=\"" + fmt(W - R + 40) + "\" y=\"" + fmt(ly + 4) + "\">" + xml_escape(c.name) +
         "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace bforge
