#ifndef SDC_TABLE_H_
#define SDC_TABLE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "nlohmann/json.hpp"

namespace sdc {

enum class Role { kIdentifier, kQuasiIdentifier, kConfidential, kNonConfidential };
enum class Kind { kNumeric, kCategorical };

std::string_view RoleName(Role role);
Role ParseRole(std::string_view name);

// A cell is a number for numeric attributes and NFC-normalized UTF-8 text
// for categorical ones.
using Cell = std::variant<double, std::string>;
using RowId = std::int64_t;

std::string FormatNumber(double value);
std::string CellText(const Cell& cell);
bool IsNumeric(const Cell& cell);

std::string NormalizeNfc(std::string_view text);

struct AttributeSchema {
  std::string name;
  Role role = Role::kQuasiIdentifier;
  Kind kind = Kind::kNumeric;
  // Numeric domain; either bound may be infinite.
  double min = 0.0;
  double max = 0.0;
  // Categorical domain, duplicate-free, NFC-normalized.
  std::vector<std::string> values;

  static AttributeSchema Numeric(std::string name, Role role, double min,
                                 double max);
  static AttributeSchema Categorical(std::string name, Role role,
                                     std::vector<std::string> values);

  bool HasFiniteDomain() const;
  bool Contains(const Cell& cell) const;
  double Width() const { return max - min; }

  friend bool operator==(const AttributeSchema&, const AttributeSchema&) = default;
};

using Schema = std::vector<AttributeSchema>;

// Schema sidecar: {"name": {"role": ..., "kind": "numeric"|"categorical",
// "domain": [min, max] | [values...]}, ...}. Null numeric bounds are
// unbounded. Attribute order is not taken from the document.
Schema SchemaFromJson(const nlohmann::json& doc);
nlohmann::json SchemaToJson(const Schema& schema);

// Rectangular microdata. Immutable once built: the constructor validates
// every cell against the schema and throws kDomainViolation on the first bad
// one. Row ids are internal identities and never serialized.
class MicrodataTable {
 public:
  MicrodataTable() = default;
  MicrodataTable(Schema schema, std::vector<std::vector<Cell>> rows,
                 std::vector<RowId> row_ids = {});

  std::size_t num_rows() const { return rows_.size(); }
  std::size_t num_attributes() const { return schema_.size(); }

  const Schema& schema() const { return schema_; }
  const AttributeSchema& attribute(std::size_t j) const { return schema_[j]; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }
  std::span<const Cell> row(std::size_t i) const { return rows_[i]; }
  const Cell& cell(std::size_t i, std::size_t j) const { return rows_[i][j]; }
  double number(std::size_t i, std::size_t j) const;
  const std::string& text(std::size_t i, std::size_t j) const;

  const std::vector<RowId>& row_ids() const { return row_ids_; }
  RowId row_id(std::size_t i) const { return row_ids_[i]; }

  std::optional<std::size_t> FindAttribute(std::string_view name) const;
  // Throws kUnknownAttribute.
  std::size_t AttributeIndex(std::string_view name) const;
  std::vector<std::size_t> AttributeIndices(
      std::span<const std::string> names) const;
  std::vector<std::size_t> AttributesWithRole(Role role) const;
  std::vector<std::string> AttributeNames(Role role) const;

  // Column j as a vector; requires a numeric attribute.
  Eigen::VectorXd NumericColumn(std::size_t j) const;

  // Same schema and row ids, new cells (validated).
  MicrodataTable WithRows(std::vector<std::vector<Cell>> rows) const;
  // Subset of rows in the given order.
  MicrodataTable SelectRows(std::span<const std::size_t> indices) const;
  // Subset of attributes in the given order.
  MicrodataTable SelectAttributes(std::span<const std::size_t> columns) const;

  // Cell-wise equality of schema, cells and row ids.
  friend bool operator==(const MicrodataTable&, const MicrodataTable&) = default;

 private:
  Schema schema_;
  std::vector<std::vector<Cell>> rows_;
  std::vector<RowId> row_ids_;
};

// Parses CSV bytes against a schema sidecar. Column order follows the CSV
// header; row ids are 0..n-1 in file order. Missing values are rejected.
MicrodataTable LoadTable(std::string_view csv_bytes,
                         const nlohmann::json& schema_descriptor);
MicrodataTable LoadTable(std::string_view csv_bytes, const Schema& schema);

// Header plus one line per row, numbers in shortest round-trip form.
std::string SerializeTable(const MicrodataTable& table);

// Drops identifier-role columns, leaving all other cells untouched.
MicrodataTable SuppressIdentifiers(const MicrodataTable& table);

// Multiset comparison of rows (ignoring row ids) used to check neighbor
// relations between data sets.
enum class NeighborModel { kAddRemove, kReplace };
std::string_view NeighborModelName(NeighborModel model);
NeighborModel ParseNeighborModel(std::string_view name);
bool AreNeighbors(const MicrodataTable& a, const MicrodataTable& b,
                  NeighborModel model);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);

}  // namespace sdc

#endif  // SDC_TABLE_H_
