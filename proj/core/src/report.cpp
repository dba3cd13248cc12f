#include "fairbayes/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "fairbayes/kv_config.hpp"

namespace fairbayes {

namespace {

std::string csv_cell(const Cell& c) {
  struct V {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(double v) const { return std::isfinite(v) ? format_double(v) : (std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf")); }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string out = "\"";
      for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
      }
      return out + "\"";
    }
  };
  return std::visit(V{}, c);
}

std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pretty_cell(const Cell& c) {
  struct V {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(double v) const { return fixed(v, 4); }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(V{}, c);
}

double as_number(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<long long>(&c)) return static_cast<double>(*i);
  return std::nan("");
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

void ReportTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::invalid_argument("report row width differs from columns of " + name);
  rows.push_back(std::move(row));
}

std::size_t ReportTable::column(std::string_view col) const {
  const auto it = std::find(columns.begin(), columns.end(), col);
  if (it == columns.end()) throw std::out_of_range("table " + name + " has no column " + std::string(col));
  return static_cast<std::size_t>(it - columns.begin());
}

double ReportTable::number(std::size_t row, std::string_view col) const {
  return as_number(rows.at(row).at(column(col)));
}

const ReportTable& Report::table(std::string_view name) const {
  for (const ReportTable& t : tables) {
    if (t.name == name) return t;
  }
  throw std::out_of_range("report has no table " + std::string(name));
}

ReportFormat parse_report_format(std::string_view s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  if (s == "table") return ReportFormat::table;
  throw std::invalid_argument("format must be csv, json or table");
}

std::string render_csv(const Report& r) {
  std::ostringstream out;
  bool first = true;
  for (const ReportTable& t : r.tables) {
    if (!first) out << '\n';
    first = false;
    out << "# " << r.kind << '.' << t.name << " v" << r.version << '\n';
    for (std::size_t j = 0; j < t.columns.size(); ++j) out << (j ? "," : "") << t.columns[j];
    out << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << csv_cell(row[j]);
      out << '\n';
    }
  }
  return out.str();
}

std::string render_json(const Report& r) {
  nlohmann::ordered_json j;
  j["format"] = "fairbayes-report";
  j["kind"] = r.kind;
  j["version"] = r.version;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.meta) meta[k] = v;
  j["meta"] = meta;
  nlohmann::ordered_json tables = nlohmann::ordered_json::object();
  for (const ReportTable& t : r.tables) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (std::size_t k = 0; k < row.size(); ++k) {
        const Cell& c = row[k];
        if (const auto* d = std::get_if<double>(&c)) {
          obj[t.columns[k]] = std::isfinite(*d) ? nlohmann::ordered_json(*d) : nlohmann::ordered_json(nullptr);
        } else if (const auto* i = std::get_if<long long>(&c)) {
          obj[t.columns[k]] = *i;
        } else if (const auto* s = std::get_if<std::string>(&c)) {
          obj[t.columns[k]] = *s;
        } else {
          obj[t.columns[k]] = nullptr;
        }
      }
      rows.push_back(std::move(obj));
    }
    tables[t.name] = {{"columns", t.columns}, {"rows", std::move(rows)}};
  }
  j["tables"] = std::move(tables);
  return j.dump(2) + "\n";
}

std::string render_table(const Report& r) {
  std::ostringstream out;
  for (const ReportTable& t : r.tables) {
    // Merge x_mean / x_sd pairs.
    std::vector<std::string> heads;
    std::vector<std::pair<std::size_t, std::size_t>> src;  // (value col, sd col or npos)
    std::vector<bool> is_sd(t.columns.size(), false);
    for (std::size_t j = 0; j < t.columns.size(); ++j) {
      const std::string& c = t.columns[j];
      if (ends_with(c, "_mean")) {
        const std::string base = c.substr(0, c.size() - 5);
        const auto it = std::find(t.columns.begin(), t.columns.end(), base + "_sd");
        if (it != t.columns.end()) is_sd[static_cast<std::size_t>(it - t.columns.begin())] = true;
      }
    }
    for (std::size_t j = 0; j < t.columns.size(); ++j) {
      if (is_sd[j]) continue;
      const std::string& c = t.columns[j];
      std::size_t sd = std::string::npos;
      std::string head = c;
      if (ends_with(c, "_mean")) {
        const std::string base = c.substr(0, c.size() - 5);
        const auto it = std::find(t.columns.begin(), t.columns.end(), base + "_sd");
        if (it != t.columns.end()) {
          sd = static_cast<std::size_t>(it - t.columns.begin());
          head = base;
        }
      }
      heads.push_back(head);
      src.emplace_back(j, sd);
    }
    std::vector<std::vector<std::string>> cells;
    for (const auto& row : t.rows) {
      std::vector<std::string> line;
      for (const auto& [v, sd] : src) {
        std::string s = pretty_cell(row[v]);
        if (sd != std::string::npos) s += " (" + fixed(as_number(row[sd]), 3) + ")";
        line.push_back(std::move(s));
      }
      cells.push_back(std::move(line));
    }
    std::vector<std::size_t> width(heads.size());
    for (std::size_t j = 0; j < heads.size(); ++j) {
      width[j] = heads[j].size();
      for (const auto& line : cells) width[j] = std::max(width[j], line[j].size());
    }
    auto emit = [&](const std::vector<std::string>& line) {
      for (std::size_t j = 0; j < line.size(); ++j) {
        if (j) out << "  ";
        out << std::string(width[j] - line[j].size(), ' ') << line[j];
      }
      out << '\n';
    };
    out << r.kind << " / " << t.name << '\n';
    emit(heads);
    std::size_t total = 0;
    for (std::size_t w : width) total += w;
    out << std::string(total + 2 * (width.empty() ? 0 : width.size() - 1), '-') << '\n';
    for (const auto& line : cells) emit(line);
    out << '\n';
  }
  return out.str();
}

std::string render(const Report& r, ReportFormat f) {
  switch (f) {
    case ReportFormat::csv: return render_csv(r);
    case ReportFormat::json: return render_json(r);
    case ReportFormat::table: return render_table(r);
  }
  return {};
}

}  // namespace fairbayes
