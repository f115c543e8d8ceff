#include "vlspace/svg_report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "json.hpp"
#include "vlspace/error.hpp"
#include "vlspace/fieldio.hpp"

namespace vls {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

const std::array<const char*, 6> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string esc(const std::string& s) {
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

std::string num(double x) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 6);
  return std::string(buf, p);
}

bool to_double(std::string_view s, double& out) {
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

std::string open_svg(const std::string& title) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(title)
     << "</text>\n";
  return os.str();
}

// Viridis-like ramp through five stops.
std::string ramp(double t) {
  static const double stops[5][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(t));
  const double f = t - i;
  char buf[8];
  int rgb[3];
  for (int k = 0; k < 3; ++k) rgb[k] = static_cast<int>(std::lround(stops[i][k] + f * (stops[i + 1][k] - stops[i][k])));
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

}  // namespace

int CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable t;
  std::size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t i = 0;
    while (true) {
      const auto c = line.find(',', i);
      cells.emplace_back(line.substr(i, c == std::string_view::npos ? std::string_view::npos : c - i));
      if (c == std::string_view::npos) break;
      i = c + 1;
    }
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      require(cells.size() == t.header.size(), ErrorCode::Data, "CSV row width differs from the header");
      t.rows.push_back(std::move(cells));
    }
  }
  require(!t.header.empty(), ErrorCode::Data, "empty CSV");
  return t;
}

std::string svg_line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<Series>& series, bool log_y) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  auto ty = [&](double y) { return log_y ? std::log10(y) : y; };
  for (const Series& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (log_y && s.y[i] <= 0.0)) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!(x0 <= x1)) x0 = 0, x1 = 1;
  if (!(y0 <= y1)) y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph; };

  std::ostringstream os;
  os << open_svg(title);
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4.0, fy = y0 + (y1 - y0) * k / 4.0;
    const double gx = kLeft + pw * k / 4.0, gy = kTop + ph * (1.0 - k / 4.0);
    os << "<text x=\"" << gx << "\" y=\"" << kTop + ph + 16 << "\" text-anchor=\"middle\">" << num(fx) << "</text>\n";
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << gy + 4 << "\" text-anchor=\"end\">"
       << (log_y ? "1e" + num(fy) : num(fy)) << "</text>\n";
    os << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + pw << "\" y1=\"" << gy << "\" y2=\"" << gy
       << "\" stroke=\"#ddd\"/>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">" << esc(x_label)
     << "</text>\n";
  os << "<text transform=\"translate(16," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << esc(y_label) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* colour = kPalette[s % kPalette.size()];
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    bool any = false;
    for (std::size_t i = 0; i < series[s].x.size() && i < series[s].y.size(); ++i) {
      const double x = series[s].x[i], y = series[s].y[i];
      if (!std::isfinite(x) || !std::isfinite(y) || (log_y && y <= 0.0)) continue;
      os << (any ? " " : "") << num(px(x)) << "," << num(py(y));
      any = true;
    }
    os << "\"/>\n";
    os << "<text x=\"" << kLeft + 8 << "\" y=\"" << kTop + 14 + 14 * static_cast<double>(s) << "\" fill=\"" << colour
       << "\">" << esc(series[s].name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string svg_heatmap(const std::string& title, std::size_t rows, std::size_t cols,
                        const std::vector<double>& values) {
  require(rows * cols == values.size() && rows > 0 && cols > 0, ErrorCode::Data, "heatmap shape mismatch");
  double lo = INFINITY, hi = -INFINITY;
  for (double v : values)
    if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
  if (!(lo <= hi)) lo = 0, hi = 1;
  const double span = hi > lo ? hi - lo : 1.0;
  const double pw = kWidth - kLeft - kRight - 60, ph = kHeight - kTop - kBottom;
  const double cw = pw / static_cast<double>(cols), ch = ph / static_cast<double>(rows);

  std::ostringstream os;
  os << open_svg(title);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = values[r * cols + c];
      os << "<rect x=\"" << num(kLeft + cw * static_cast<double>(c)) << "\" y=\""
         << num(kTop + ph - ch * static_cast<double>(r + 1)) << "\" width=\"" << num(cw + 0.05) << "\" height=\""
         << num(ch + 0.05) << "\" fill=\"" << ramp((v - lo) / span) << "\"/>\n";
    }
  const double bx = kLeft + pw + 20;
  for (int k = 0; k < 32; ++k)
    os << "<rect x=\"" << bx << "\" y=\"" << num(kTop + ph - ph * (k + 1) / 32.0) << "\" width=\"14\" height=\""
       << num(ph / 32.0 + 0.05) << "\" fill=\"" << ramp((k + 0.5) / 32.0) << "\"/>\n";
  os << "<text x=\"" << bx + 18 << "\" y=\"" << kTop + 8 << "\">" << num(hi) << "</text>\n";
  os << "<text x=\"" << bx + 18 << "\" y=\"" << kTop + ph << "\">" << num(lo) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

namespace {

std::string render_json(std::string_view text, const ReportOptions& opt) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Data, std::string("invalid JSON: ") + e.what());
  }
  require(j.contains("checks") && j["checks"].is_array(), ErrorCode::Data, "not a verify report");
  Series margin{"worst margin (clipped to [-1, 1])", {}, {}};
  Series rate{"pass rate", {}, {}};
  std::string ids;
  double k = 0;
  for (const auto& c : j["checks"]) {
    const double m = c.value("worst_margin", nlohmann::json()).is_number() ? c["worst_margin"].get<double>() : -1.0;
    margin.x.push_back(k);
    margin.y.push_back(std::clamp(m, -1.0, 1.0));
    const double n = c.value("n_cases", 0.0);
    rate.x.push_back(k);
    rate.y.push_back(n > 0 ? c.value("n_pass", 0.0) / n : 1.0);
    ids += (k > 0 ? ", " : "") + std::to_string(static_cast<int>(k)) + " " + c.value("id", std::string("?"));
    k += 1;
  }
  std::string svg = svg_line_plot(opt.title.empty() ? "verify report" : opt.title, "check index", "value",
                                  {margin, rate}, false);
  // Index legend as a comment keeps the plot uncluttered.
  return svg.insert(svg.find('\n') + 1, "<!-- " + esc(ids) + " -->\n");
}

std::string render_csv(std::string_view text, const ReportOptions& opt) {
  const CsvTable t = parse_csv(text);
  require(!t.rows.empty(), ErrorCode::Data, "CSV has no rows");
  int vc = -1;
  if (!opt.column.empty()) {
    vc = t.column(opt.column);
    require(vc >= 0, ErrorCode::Data, "no column named " + opt.column);
  } else if (t.column("value") >= 0) {
    vc = t.column("value");
  } else {
    for (int c = static_cast<int>(t.header.size()) - 1; c >= 0 && vc < 0; --c) {
      double v;
      if (to_double(t.rows[0][static_cast<std::size_t>(c)], v)) vc = c;
    }
    require(vc >= 0, ErrorCode::Data, "CSV has no numeric column");
  }
  auto value = [&](std::size_t r, int c) {
    double v = NAN;
    to_double(t.rows[r][static_cast<std::size_t>(c)], v);
    return v;
  };
  const std::string name = t.header[static_cast<std::size_t>(vc)];
  const std::string title = opt.title.empty() ? name : opt.title;
  const int cx = t.column("x1"), cy = t.column("x2");
  if (cx >= 0 && cy >= 0) {
    std::map<double, std::size_t> xs, ys;
    for (std::size_t r = 0; r < t.rows.size(); ++r) xs.emplace(value(r, cx), 0), ys.emplace(value(r, cy), 0);
    std::size_t i = 0;
    for (auto& [k, v] : xs) v = i++;
    i = 0;
    for (auto& [k, v] : ys) v = i++;
    std::vector<double> grid(xs.size() * ys.size(), NAN);
    for (std::size_t r = 0; r < t.rows.size(); ++r)
      grid[ys[value(r, cy)] * xs.size() + xs[value(r, cx)]] = value(r, vc);
    return svg_heatmap(title, ys.size(), xs.size(), grid);
  }
  Series s{name, {}, {}};
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    s.x.push_back(cx >= 0 ? value(r, cx) : static_cast<double>(r));
    s.y.push_back(value(r, vc));
  }
  return svg_line_plot(title, cx >= 0 ? "x1" : "row", name, {s}, opt.log_y);
}

}  // namespace

std::string render_report(std::string_view text, const std::string& format, const ReportOptions& options) {
  std::string f = format;
  if (f == "auto") {
    const auto b = text.find_first_not_of(" \t\r\n");
    f = b != std::string_view::npos && text[b] == '{' ? "json" : "csv";
  }
  if (f == "json") return render_json(text, options);
  require(f == "csv", ErrorCode::Config, "report format must be csv, json or auto");
  return render_csv(text, options);
}

}  // namespace vls
