#pragma once

// Static SVG diagnostics drawn from CSV tables and verify reports.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace vls {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name, or -1.
  int column(std::string_view name) const;
};

/// Comma-separated, first line is the header; no quoting.
CsvTable parse_csv(std::string_view text);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

std::string svg_line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<Series>& series, bool log_y = false);
/// Row-major values, row 0 drawn at the bottom.
std::string svg_heatmap(const std::string& title, std::size_t rows, std::size_t cols,
                        const std::vector<double>& values);

struct ReportOptions {
  std::string title;
  /// CSV value column; empty picks "value", else the last numeric column.
  std::string column;
  bool log_y = false;
};

/// CSV with x1, x2 columns -> heatmap; with x1 only -> line plot against x1;
/// otherwise against the row index. A verify JSON report -> worst margin
/// per check. `format` is "csv", "json" or "auto" (sniffed from the text).
std::string render_report(std::string_view text, const std::string& format, const ReportOptions& options);

}  // namespace vls
