#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace fairbayes {

using Cell = std::variant<std::monostate, long long, double, std::string>;

struct ReportTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  /// Throws std::invalid_argument when the row width differs from the columns.
  void add_row(std::vector<Cell> row);
  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::string_view column) const;
};

/// Versioned collection of tables. Column sets are fixed per (kind, version).
struct Report {
  std::string kind;
  int version = 1;
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<ReportTable> tables;

  const ReportTable& table(std::string_view name) const;
};

enum class ReportFormat { csv, json, table };

ReportFormat parse_report_format(std::string_view s);

/// One CSV block per table, each preceded by a `# <name>` line.
std::string render_csv(const Report& r);
std::string render_json(const Report& r);
/// Aligned text tables; columns `x_mean` with a matching `x_sd` are shown
/// together as "mean (sd)".
std::string render_table(const Report& r);
std::string render(const Report& r, ReportFormat f);

}  // namespace fairbayes
