#include "fairbayes/tabular_ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fairbayes/random.hpp"

namespace fairbayes {

namespace {

std::string_view kind_name(ColumnKind k) {
  switch (k) {
    case ColumnKind::numeric: return "numeric";
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::protected_attr: return "protected";
    case ColumnKind::label: return "label";
    case ColumnKind::ignore: return "ignore";
  }
  return "ignore";
}

ColumnKind parse_kind(const std::string& s) {
  if (s == "numeric") return ColumnKind::numeric;
  if (s == "categorical") return ColumnKind::categorical;
  if (s == "protected") return ColumnKind::protected_attr;
  if (s == "label") return ColumnKind::label;
  if (s == "ignore") return ColumnKind::ignore;
  throw std::runtime_error("schema: unknown column kind '" + s + "'");
}

std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  cells.push_back(trim(cur));
  return cells;
}

bool is_missing(const ColumnSchema& schema, const std::string& v) {
  return v.empty() || std::find(schema.missing.begin(), schema.missing.end(), v) != schema.missing.end();
}

bool parse_finite(const std::string& v, double& out) {
  return try_parse_double(v, out) && std::isfinite(out);
}

bool parse_code(const std::string& v, int& out) {
  double d = 0.0;
  if (!parse_finite(v, d) || d < 0.0 || d != std::floor(d) || d > 1e6) return false;
  out = static_cast<int>(d);
  return true;
}

// Binary code of a protected/label cell, or -1 when unusable.
int binary_code(const ColumnSpec& col, const std::string& v) {
  if (col.codes) {
    int c = 0;
    return parse_code(v, c) ? c : -1;
  }
  return std::find(col.positive.begin(), col.positive.end(), v) != col.positive.end() ? 1 : 0;
}

std::vector<std::size_t> resolve_columns(const ColumnSchema& schema, const RawTable& table) {
  std::vector<std::size_t> index;
  for (const ColumnSpec& c : schema.columns) {
    const auto it = std::find(table.header.begin(), table.header.end(), c.name);
    if (it == table.header.end()) {
      if (c.kind == ColumnKind::ignore) {
        index.push_back(table.header.size());
        continue;
      }
      throw std::runtime_error("CSV has no column '" + c.name + "'");
    }
    index.push_back(static_cast<std::size_t>(it - table.header.begin()));
  }
  return index;
}

// True when every used cell of the row is present and parseable.
bool row_usable(const ColumnSchema& schema, const std::vector<std::size_t>& index,
                const std::vector<std::string>& row) {
  for (std::size_t k = 0; k < schema.columns.size(); ++k) {
    const ColumnSpec& c = schema.columns[k];
    if (c.kind == ColumnKind::ignore) continue;
    if (index[k] >= row.size()) return false;
    const std::string& v = row[index[k]];
    if (is_missing(schema, v)) return false;
    double d = 0.0;
    switch (c.kind) {
      case ColumnKind::numeric:
        if (!parse_finite(v, d)) return false;
        break;
      case ColumnKind::label: {
        const int code = binary_code(c, v);
        if (code != 0 && code != 1) return false;
        break;
      }
      case ColumnKind::protected_attr:
        if (binary_code(c, v) < 0) return false;
        break;
      default: break;
    }
  }
  return true;
}

}  // namespace

void ColumnSchema::validate() const {
  int labels = 0, protecteds = 0;
  std::set<std::string> names;
  for (const ColumnSpec& c : columns) {
    if (c.name.empty()) throw std::invalid_argument("schema: empty column name");
    if (!names.insert(c.name).second) throw std::invalid_argument("schema: duplicate column '" + c.name + "'");
    if (c.kind == ColumnKind::label) ++labels;
    if (c.kind == ColumnKind::protected_attr) ++protecteds;
    if ((c.kind == ColumnKind::label || c.kind == ColumnKind::protected_attr) && !c.codes && c.positive.empty()) {
      throw std::invalid_argument("schema: column '" + c.name + "' needs positive values or 'codes'");
    }
  }
  if (labels != 1) throw std::invalid_argument("schema: exactly one label column required");
  if (protecteds != 1) throw std::invalid_argument("schema: exactly one protected column required");
}

const ColumnSpec* ColumnSchema::find(std::string_view name) const {
  for (const ColumnSpec& c : columns) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

KeyValueDoc ColumnSchema::to_doc() const {
  KeyValueDoc doc;
  doc.add("format", "fairbayes-schema");
  doc.add("version", "1");
  std::string miss;
  for (std::size_t i = 0; i < missing.size(); ++i) miss += (i ? "|" : "") + missing[i];
  doc.add("missing", miss);
  for (const ColumnSpec& c : columns) {
    std::string v = c.name + " " + std::string(kind_name(c.kind));
    if (c.kind == ColumnKind::label || c.kind == ColumnKind::protected_attr) {
      v += " ";
      if (c.codes) {
        v += "codes";
      } else {
        for (std::size_t i = 0; i < c.positive.size(); ++i) v += (i ? "|" : "") + c.positive[i];
      }
    }
    doc.add("column", v);
  }
  return doc;
}

ColumnSchema ColumnSchema::from_doc(const KeyValueDoc& doc) {
  if (doc.require("format") != "fairbayes-schema") throw std::runtime_error("not a fairbayes-schema file");
  if (doc.require("version") != "1") throw std::runtime_error("unsupported schema version");
  ColumnSchema s;
  if (auto m = doc.get("missing")) s.missing = m->empty() ? std::vector<std::string>{} : split(*m, '|');
  for (const std::string& line : doc.get_all("column")) {
    std::istringstream in(line);
    std::string name, kind, arg;
    in >> name >> kind;
    std::getline(in, arg);
    arg = trim(arg);
    if (name.empty() || kind.empty()) throw std::runtime_error("schema: malformed column line '" + line + "'");
    ColumnSpec c;
    c.name = name;
    c.kind = parse_kind(kind);
    if (c.kind == ColumnKind::label || c.kind == ColumnKind::protected_attr) {
      if (arg == "codes") {
        c.codes = true;
      } else {
        for (const std::string& v : split(arg, '|')) {
          if (!trim(v).empty()) c.positive.push_back(trim(v));
        }
      }
    } else if (!arg.empty()) {
      throw std::runtime_error("schema: unexpected argument for column '" + name + "'");
    }
    s.columns.push_back(std::move(c));
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(e.what());
  }
  return s;
}

ColumnSchema ColumnSchema::load(const std::filesystem::path& path) {
  return from_doc(KeyValueDoc::read_file(path));
}

void ColumnSchema::save(const std::filesystem::path& path) const { to_doc().write_file(path); }

ColumnSchema ColumnSchema::synthetic(std::size_t dimension) {
  ColumnSchema s;
  for (std::size_t j = 0; j < dimension; ++j) s.columns.push_back({"x" + std::to_string(j), ColumnKind::numeric, {}, false});
  s.columns.push_back({"group", ColumnKind::protected_attr, {}, true});
  s.columns.push_back({"label", ColumnKind::label, {}, true});
  return s;
}

RawTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  RawTable t;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (!have_header) {
      t.header = parse_csv_line(line);
      have_header = true;
    } else {
      t.rows.push_back(parse_csv_line(line));
    }
  }
  if (!have_header) throw std::runtime_error("empty CSV file " + path.string());
  return t;
}

std::vector<std::size_t> usable_rows(const ColumnSchema& schema, const RawTable& table) {
  const auto index = resolve_columns(schema, table);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (row_usable(schema, index, table.rows[i])) out.push_back(i);
  }
  return out;
}

FittedSchema FittedSchema::fit(const ColumnSchema& schema, const RawTable& table,
                               std::span<const std::size_t> train_rows) {
  schema.validate();
  FittedSchema f;
  f.schema_ = schema;
  f.column_index_ = resolve_columns(schema, table);
  std::map<std::string, std::set<std::string>, std::less<>> levels;
  int max_group = 1;
  for (std::size_t r : train_rows) {
    const auto& row = table.rows.at(r);
    if (!row_usable(schema, f.column_index_, row)) continue;
    for (std::size_t k = 0; k < schema.columns.size(); ++k) {
      const ColumnSpec& c = schema.columns[k];
      if (c.kind == ColumnKind::categorical) levels[c.name].insert(row[f.column_index_[k]]);
      if (c.kind == ColumnKind::protected_attr) max_group = std::max(max_group, binary_code(c, row[f.column_index_[k]]));
    }
  }
  f.group_count_ = max_group + 1;
  for (const ColumnSpec& c : schema.columns) {
    if (c.kind == ColumnKind::numeric) {
      f.names_.push_back(c.name);
    } else if (c.kind == ColumnKind::categorical) {
      auto& v = f.vocab_[c.name];
      v.assign(levels[c.name].begin(), levels[c.name].end());
      if (v.empty()) throw std::runtime_error("categorical column '" + c.name + "' has no training values");
      for (const std::string& level : v) f.names_.push_back(c.name + "=" + level);
    }
  }
  if (f.names_.empty()) throw std::runtime_error("schema has no feature columns");
  return f;
}

const std::vector<std::string>& FittedSchema::vocabulary(std::string_view column) const {
  const auto it = vocab_.find(column);
  if (it == vocab_.end()) throw std::invalid_argument("no vocabulary for column '" + std::string(column) + "'");
  return it->second;
}

Dataset FittedSchema::encode(const RawTable& table, std::span<const std::size_t> rows, IngestReport& report) const {
  std::vector<double> values;
  std::vector<int> group, label;
  values.reserve(rows.size() * width());
  std::vector<double> feat(width());
  for (std::size_t r : rows) {
    ++report.rows_read;
    const auto& row = table.rows.at(r);
    if (!row_usable(schema_, column_index_, row)) {
      ++report.rows_dropped;
      continue;
    }
    std::fill(feat.begin(), feat.end(), 0.0);
    std::size_t pos = 0;
    int g = 0, y = 0;
    bool ok = true;
    for (std::size_t k = 0; k < schema_.columns.size(); ++k) {
      const ColumnSpec& c = schema_.columns[k];
      if (c.kind == ColumnKind::ignore) continue;
      const std::string& v = row[column_index_[k]];
      switch (c.kind) {
        case ColumnKind::numeric: parse_finite(v, feat[pos++]); break;
        case ColumnKind::categorical: {
          const auto& vocab = vocab_.find(c.name)->second;
          const auto it = std::lower_bound(vocab.begin(), vocab.end(), v);
          if (it != vocab.end() && *it == v) {
            feat[pos + static_cast<std::size_t>(it - vocab.begin())] = 1.0;
          } else {
            ++report.unseen_categories;
          }
          pos += vocab.size();
          break;
        }
        case ColumnKind::protected_attr:
          g = binary_code(c, v);
          if (g >= group_count_) ok = false;
          break;
        case ColumnKind::label: y = binary_code(c, v); break;
        default: break;
      }
    }
    if (!ok) {
      ++report.rows_dropped;
      continue;
    }
    values.insert(values.end(), feat.begin(), feat.end());
    group.push_back(g);
    label.push_back(y);
  }
  if (label.empty()) throw std::runtime_error("no usable rows after dropping missing values");
  if (report.rows_dropped > 0) {
    report.warnings.push_back(std::to_string(report.rows_dropped) + " rows dropped for missing or unparseable values");
  }
  if (report.unseen_categories > 0) {
    report.warnings.push_back(std::to_string(report.unseen_categories) +
                              " categorical values unseen in training encoded as all zeros");
  }
  const std::size_t n = label.size();
  return Dataset(FeatureMatrix(n, width(), std::move(values)), std::move(group), std::move(label), group_count_);
}

LoadedTable load_csv(const std::filesystem::path& path, const ColumnSchema& schema) {
  const RawTable table = read_csv(path);
  std::vector<std::size_t> all(table.rows.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const FittedSchema fitted = FittedSchema::fit(schema, table, all);
  LoadedTable out;
  out.data = fitted.encode(table, all, out.report);
  out.feature_names = fitted.feature_names();
  return out;
}

SplitSizes split_sizes(std::size_t n, std::array<double, 3> fractions) {
  double sum = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0)) throw std::invalid_argument("split fractions must be nonnegative");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("split fractions must sum to 1");
  SplitSizes s;
  s.train = std::min(n, static_cast<std::size_t>(std::llround(fractions[0] * static_cast<double>(n))));
  s.val = std::min(n - s.train, static_cast<std::size_t>(std::llround(fractions[1] * static_cast<double>(n))));
  s.test = n - s.train - s.val;
  if (fractions[2] == 0.0 && s.test > 0) {
    s.val += s.test;
    s.test = 0;
  }
  return s;
}

std::array<std::vector<std::size_t>, 3> split_indices(std::size_t n, std::array<double, 3> fractions,
                                                      std::uint64_t seed) {
  const SplitSizes s = split_sizes(n, fractions);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(idx);
  std::array<std::vector<std::size_t>, 3> out;
  out[0].assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(s.train));
  out[1].assign(idx.begin() + static_cast<std::ptrdiff_t>(s.train),
                idx.begin() + static_cast<std::ptrdiff_t>(s.train + s.val));
  out[2].assign(idx.begin() + static_cast<std::ptrdiff_t>(s.train + s.val), idx.end());
  return out;
}

SplitResult split(const Dataset& data, std::array<double, 3> fractions, std::uint64_t seed) {
  const auto idx = split_indices(data.size(), fractions, seed);
  static constexpr const char* kNames[3] = {"train", "val", "test"};
  SplitResult r;
  const int groups = data.group_count();
  for (int k = 0; k < 3; ++k) {
    r.parts[k] = data.subset(idx[k]);
    auto& counts = r.stratum_counts[k];
    counts.assign(static_cast<std::size_t>(groups), {0, 0});
    for (std::size_t i : idx[k]) ++counts[data.group()[i]][data.label()[i]];
    if (idx[k].empty()) continue;
    for (int a = 0; a < groups; ++a) {
      for (int y = 0; y < 2; ++y) {
        if (counts[a][y] == 0) {
          r.warnings.push_back(std::string(kNames[k]) + " split has no rows with group " + std::to_string(a) +
                               " and label " + std::to_string(y));
        }
      }
    }
  }
  return r;
}

FetchManifest FetchManifest::load(const std::filesystem::path& path) {
  const KeyValueDoc doc = KeyValueDoc::read_file(path);
  FetchManifest m;
  m.name = doc.get("name").value_or(path.stem().string());
  m.urls = doc.get_all("url");
  m.files = doc.get_all("file");
  m.sha256 = doc.get_all("sha256");
  m.header = doc.get("header").value_or("");
  if (m.urls.empty() || m.urls.size() != m.files.size()) {
    throw std::runtime_error("manifest: every url needs a matching file entry");
  }
  return m;
}

std::optional<std::filesystem::path> data_dir_from_env() {
  const char* v = std::getenv("FAIRBAYES_DATA_DIR");
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::filesystem::path(v);
}

}  // namespace fairbayes
