#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairbayes/core_data.hpp"
#include "fairbayes/kv_config.hpp"

namespace fairbayes {

enum class ColumnKind { numeric, categorical, protected_attr, label, ignore };

/// One CSV column. For `protected_attr` and `label`, `positive` lists the raw
/// values mapped to 1 (every other value maps to 0); with `codes` the column
/// already holds integer codes and is parsed as such.
struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  std::vector<std::string> positive;
  bool codes = false;
};

/// Column roles of a CSV file, stored as a key-value document:
///
///   format = fairbayes-schema
///   version = 1
///   missing = ?
///   column = age numeric
///   column = workclass categorical
///   column = sex protected Male
///   column = income label >50K|>50K.
///   column = fnlwgt ignore
///
/// The protected/label argument is either a '|'-separated list of positive
/// values or the word `codes`.
struct ColumnSchema {
  std::vector<ColumnSpec> columns;
  /// Raw values treated as missing in any column (besides the empty string).
  std::vector<std::string> missing{"?"};

  /// Throws std::invalid_argument unless there is exactly one label and one
  /// protected column and names are unique.
  void validate() const;
  const ColumnSpec* find(std::string_view name) const;

  KeyValueDoc to_doc() const;
  static ColumnSchema from_doc(const KeyValueDoc& doc);
  static ColumnSchema load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  /// Schema of the synthetic CSV export: x0..x{d-1} numeric, group codes, label codes.
  static ColumnSchema synthetic(std::size_t dimension);
};

/// Header plus string cells of a comma-separated file. Quoted fields with
/// doubled quotes are accepted; cells are trimmed.
struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Throws std::runtime_error for a missing or empty file. Rows whose cell
/// count differs from the header are kept as-is and rejected later.
RawTable read_csv(const std::filesystem::path& path);

struct IngestReport {
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
  /// Categorical cells whose value was not in the fitted vocabulary; those
  /// cells are encoded as all zeros.
  std::size_t unseen_categories = 0;
  std::vector<std::string> warnings;
};

/// A schema with categorical vocabularies fitted on training rows.
class FittedSchema {
 public:
  /// Vocabularies come from the rows listed in `train_rows` only. Rows with
  /// missing or unparseable cells are skipped when fitting.
  static FittedSchema fit(const ColumnSchema& schema, const RawTable& table,
                          std::span<const std::size_t> train_rows);

  const ColumnSchema& schema() const noexcept { return schema_; }
  std::size_t width() const noexcept { return names_.size(); }
  const std::vector<std::string>& feature_names() const noexcept { return names_; }
  const std::vector<std::string>& vocabulary(std::string_view column) const;
  int group_count() const noexcept { return group_count_; }

  /// Encodes the listed rows. Rows with a missing or unparseable value are
  /// dropped and counted. Throws std::runtime_error when no row survives.
  Dataset encode(const RawTable& table, std::span<const std::size_t> rows, IngestReport& report) const;

 private:
  ColumnSchema schema_;
  std::vector<std::size_t> column_index_;  // schema column -> table column
  std::map<std::string, std::vector<std::string>, std::less<>> vocab_;
  std::vector<std::string> names_;
  int group_count_ = 2;
};

/// Rows of `table` with every used cell present and parseable.
std::vector<std::size_t> usable_rows(const ColumnSchema& schema, const RawTable& table);

struct LoadedTable {
  Dataset data;
  std::vector<std::string> feature_names;
  IngestReport report;
};

/// Reads, fits the vocabulary on all usable rows and encodes. Throws for a
/// missing file, an absent label or protected column, or zero usable rows.
LoadedTable load_csv(const std::filesystem::path& path, const ColumnSchema& schema);

struct SplitSizes {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;
};

/// Sizes for fractions summing to 1: train and val are rounded, test takes the rest.
SplitSizes split_sizes(std::size_t n, std::array<double, 3> fractions);

/// Seeded shuffle of 0..n-1, then contiguous train/val/test blocks.
std::array<std::vector<std::size_t>, 3> split_indices(std::size_t n, std::array<double, 3> fractions,
                                                      std::uint64_t seed);

struct SplitResult {
  std::array<Dataset, 3> parts;  // train, val, test
  /// Per part, per group, per label.
  std::array<std::vector<std::array<std::size_t, 2>>, 3> stratum_counts;
  std::vector<std::string> warnings;
};

/// Splits rows; empty parts are allowed. A nonempty part missing some
/// (group, label) stratum produces a warning.
SplitResult split(const Dataset& data, std::array<double, 3> fractions, std::uint64_t seed);

/// Fetch manifest: `url`, `file`, optional `sha256`, optional `header`
/// (comma-separated column names to prepend to a header-less file).
struct FetchManifest {
  std::string name;
  std::vector<std::string> urls;
  std::vector<std::string> files;
  std::vector<std::string> sha256;
  std::string header;

  static FetchManifest load(const std::filesystem::path& path);
};

/// Value of the data-cache environment variable FAIRBAYES_DATA_DIR, if set.
std::optional<std::filesystem::path> data_dir_from_env();

}  // namespace fairbayes
