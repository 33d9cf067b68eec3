#include "sdc/table.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "sdc/csv.h"
#include "sdc/error.h"

namespace sdc {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMalformedCsv: return "MalformedCsv";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kDomainViolation: return "DomainViolation";
    case ErrorCode::kInvalidSchema: return "InvalidSchema";
    case ErrorCode::kInvalidHierarchy: return "InvalidHierarchy";
    case ErrorCode::kUnknownValue: return "UnknownValue";
    case ErrorCode::kLevelOutOfRange: return "LevelOutOfRange";
    case ErrorCode::kUnknownAttribute: return "UnknownAttribute";
    case ErrorCode::kHierarchyMissing: return "HierarchyMissing";
    case ErrorCode::kUnsatisfiable: return "Unsatisfiable";
    case ErrorCode::kSearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case ErrorCode::kTooFewRows: return "TooFewRows";
    case ErrorCode::kMisaligned: return "Misaligned";
    case ErrorCode::kGroupTooSmall: return "GroupTooSmall";
    case ErrorCode::kNoSharedQIs: return "NoSharedQIs";
    case ErrorCode::kEmptyClass: return "EmptyClass";
    case ErrorCode::kSupportMismatch: return "SupportMismatch";
    case ErrorCode::kNonNumeric: return "NonNumeric";
    case ErrorCode::kInvalidT: return "InvalidT";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kUnboundedDomain: return "UnboundedDomain";
    case ErrorCode::kNonPositiveEpsilon: return "NonPositiveEpsilon";
    case ErrorCode::kInvalidAlpha: return "InvalidAlpha";
    case ErrorCode::kInvalidDelta: return "InvalidDelta";
    case ErrorCode::kInvalidRho: return "InvalidRho";
    case ErrorCode::kNotNeighbors: return "NotNeighbors";
    case ErrorCode::kMissingPartition: return "MissingPartition";
    case ErrorCode::kNotMinimalMechanism: return "NotMinimalMechanism";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

std::string_view RoleName(Role role) {
  switch (role) {
    case Role::kIdentifier: return "identifier";
    case Role::kQuasiIdentifier: return "quasi_identifier";
    case Role::kConfidential: return "confidential";
    case Role::kNonConfidential: return "non_confidential";
  }
  return "";
}

Role ParseRole(std::string_view name) {
  if (name == "identifier") return Role::kIdentifier;
  if (name == "quasi_identifier") return Role::kQuasiIdentifier;
  if (name == "confidential") return Role::kConfidential;
  if (name == "non_confidential") return Role::kNonConfidential;
  throw Error(ErrorCode::kInvalidSchema, "unknown role '" + std::string(name) + "'");
}

std::string FormatNumber(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

std::string CellText(const Cell& cell) {
  if (const double* d = std::get_if<double>(&cell)) return FormatNumber(*d);
  return std::get<std::string>(cell);
}

bool IsNumeric(const Cell& cell) { return std::holds_alternative<double>(cell); }

std::string NormalizeNfc(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::kInvalidArgument, "NFC normalizer unavailable");
  }
  const icu::UnicodeString input = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  if (nfc->isNormalized(input, status) && U_SUCCESS(status)) {
    return std::string(text);
  }
  status = U_ZERO_ERROR;
  const icu::UnicodeString normalized = nfc->normalize(input, status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::kInvalidArgument, "cannot normalize '" +
                                                 std::string(text) + "'");
  }
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

AttributeSchema AttributeSchema::Numeric(std::string name, Role role,
                                         double min, double max) {
  if (!(min <= max)) {
    throw Error(ErrorCode::kInvalidSchema,
                "attribute '" + name + "': min must not exceed max");
  }
  AttributeSchema a;
  a.name = std::move(name);
  a.role = role;
  a.kind = Kind::kNumeric;
  a.min = min;
  a.max = max;
  return a;
}

AttributeSchema AttributeSchema::Categorical(std::string name, Role role,
                                             std::vector<std::string> values) {
  if (values.empty()) {
    throw Error(ErrorCode::kInvalidSchema,
                "attribute '" + name + "': empty categorical domain");
  }
  std::unordered_set<std::string> seen;
  for (std::string& v : values) {
    v = NormalizeNfc(v);
    if (!seen.insert(v).second) {
      throw Error(ErrorCode::kInvalidSchema,
                  "attribute '" + name + "': duplicate value '" + v + "'");
    }
  }
  AttributeSchema a;
  a.name = std::move(name);
  a.role = role;
  a.kind = Kind::kCategorical;
  a.values = std::move(values);
  return a;
}

bool AttributeSchema::HasFiniteDomain() const {
  return kind == Kind::kCategorical || (std::isfinite(min) && std::isfinite(max));
}

bool AttributeSchema::Contains(const Cell& cell) const {
  if (kind == Kind::kNumeric) {
    const double* d = std::get_if<double>(&cell);
    return d != nullptr && std::isfinite(*d) && *d >= min && *d <= max;
  }
  const std::string* s = std::get_if<std::string>(&cell);
  return s != nullptr && std::find(values.begin(), values.end(), *s) != values.end();
}

namespace {

double JsonBound(const nlohmann::json& v, double unbounded) {
  if (v.is_null()) return unbounded;
  if (!v.is_number()) {
    throw Error(ErrorCode::kInvalidSchema, "numeric bound must be a number or null");
  }
  return v.get<double>();
}

}  // namespace

Schema SchemaFromJson(const nlohmann::json& doc) {
  if (!doc.is_object()) {
    throw Error(ErrorCode::kInvalidSchema, "schema must be a JSON object");
  }
  Schema schema;
  for (const auto& [name, entry] : doc.items()) {
    if (!entry.is_object() || !entry.contains("role") || !entry.contains("kind")) {
      throw Error(ErrorCode::kInvalidSchema,
                  "attribute '" + name + "' needs role and kind");
    }
    const Role role = ParseRole(entry["role"].get<std::string>());
    const std::string kind = entry["kind"].get<std::string>();
    const nlohmann::json domain = entry.value("domain", nlohmann::json());
    if (kind == "numeric") {
      const double inf = std::numeric_limits<double>::infinity();
      if (domain.is_null()) {
        schema.push_back(AttributeSchema::Numeric(name, role, -inf, inf));
      } else if (domain.is_array() && domain.size() == 2) {
        schema.push_back(AttributeSchema::Numeric(
            name, role, JsonBound(domain[0], -inf), JsonBound(domain[1], inf)));
      } else {
        throw Error(ErrorCode::kInvalidSchema,
                    "attribute '" + name + "': numeric domain is [min, max]");
      }
    } else if (kind == "categorical") {
      if (!domain.is_array()) {
        throw Error(ErrorCode::kInvalidSchema,
                    "attribute '" + name + "': categorical domain is a list");
      }
      std::vector<std::string> values;
      for (const auto& v : domain) {
        values.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      }
      schema.push_back(AttributeSchema::Categorical(name, role, std::move(values)));
    } else {
      throw Error(ErrorCode::kInvalidSchema,
                  "attribute '" + name + "': unknown kind '" + kind + "'");
    }
  }
  return schema;
}

nlohmann::json SchemaToJson(const Schema& schema) {
  nlohmann::json doc = nlohmann::json::object();
  for (const AttributeSchema& a : schema) {
    nlohmann::json entry;
    entry["role"] = RoleName(a.role);
    if (a.kind == Kind::kNumeric) {
      entry["kind"] = "numeric";
      entry["domain"] = {std::isfinite(a.min) ? nlohmann::json(a.min) : nlohmann::json(),
                        std::isfinite(a.max) ? nlohmann::json(a.max) : nlohmann::json()};
    } else {
      entry["kind"] = "categorical";
      entry["domain"] = a.values;
    }
    doc[a.name] = std::move(entry);
  }
  return doc;
}

MicrodataTable::MicrodataTable(Schema schema, std::vector<std::vector<Cell>> rows,
                               std::vector<RowId> row_ids)
    : schema_(std::move(schema)), rows_(std::move(rows)), row_ids_(std::move(row_ids)) {
  std::unordered_set<std::string> names;
  for (const AttributeSchema& a : schema_) {
    if (!names.insert(a.name).second) {
      throw Error(ErrorCode::kInvalidSchema, "duplicate attribute '" + a.name + "'");
    }
  }
  if (row_ids_.empty() && !rows_.empty()) {
    row_ids_.resize(rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i) row_ids_[i] = static_cast<RowId>(i);
  }
  if (row_ids_.size() != rows_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "row id count does not match row count");
  }
  std::vector<std::unordered_set<std::string>> domains(schema_.size());
  for (std::size_t j = 0; j < schema_.size(); ++j) {
    domains[j].insert(schema_[j].values.begin(), schema_[j].values.end());
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].size() != schema_.size()) {
      throw Error(ErrorCode::kDomainViolation,
                  "row " + std::to_string(i) + ": expected " +
                      std::to_string(schema_.size()) + " cells");
    }
    for (std::size_t j = 0; j < schema_.size(); ++j) {
      const AttributeSchema& a = schema_[j];
      const Cell& c = rows_[i][j];
      bool ok;
      if (a.kind == Kind::kNumeric) {
        ok = a.Contains(c);
      } else {
        const std::string* s = std::get_if<std::string>(&c);
        ok = s != nullptr && domains[j].contains(*s);
      }
      if (!ok) {
        throw Error(ErrorCode::kDomainViolation,
                    "row " + std::to_string(i) + ", attribute " + a.name +
                        ": value '" + CellText(c) + "' outside domain");
      }
    }
  }
}

double MicrodataTable::number(std::size_t i, std::size_t j) const {
  const double* d = std::get_if<double>(&rows_[i][j]);
  if (d == nullptr) {
    throw Error(ErrorCode::kNonNumeric, "attribute " + schema_[j].name + " is not numeric");
  }
  return *d;
}

const std::string& MicrodataTable::text(std::size_t i, std::size_t j) const {
  const std::string* s = std::get_if<std::string>(&rows_[i][j]);
  if (s == nullptr) {
    throw Error(ErrorCode::kInvalidArgument,
                "attribute " + schema_[j].name + " is not categorical");
  }
  return *s;
}

std::optional<std::size_t> MicrodataTable::FindAttribute(std::string_view name) const {
  for (std::size_t j = 0; j < schema_.size(); ++j) {
    if (schema_[j].name == name) return j;
  }
  return std::nullopt;
}

std::size_t MicrodataTable::AttributeIndex(std::string_view name) const {
  if (auto j = FindAttribute(name)) return *j;
  throw Error(ErrorCode::kUnknownAttribute, "no attribute '" + std::string(name) + "'");
}

std::vector<std::size_t> MicrodataTable::AttributeIndices(
    std::span<const std::string> names) const {
  std::vector<std::size_t> out;
  out.reserve(names.size());
  for (const std::string& n : names) out.push_back(AttributeIndex(n));
  return out;
}

std::vector<std::size_t> MicrodataTable::AttributesWithRole(Role role) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < schema_.size(); ++j) {
    if (schema_[j].role == role) out.push_back(j);
  }
  return out;
}

std::vector<std::string> MicrodataTable::AttributeNames(Role role) const {
  std::vector<std::string> out;
  for (const AttributeSchema& a : schema_) {
    if (a.role == role) out.push_back(a.name);
  }
  return out;
}

Eigen::VectorXd MicrodataTable::NumericColumn(std::size_t j) const {
  Eigen::VectorXd col(static_cast<Eigen::Index>(rows_.size()));
  for (std::size_t i = 0; i < rows_.size(); ++i) col[static_cast<Eigen::Index>(i)] = number(i, j);
  return col;
}

MicrodataTable MicrodataTable::WithRows(std::vector<std::vector<Cell>> rows) const {
  return MicrodataTable(schema_, std::move(rows), row_ids_);
}

MicrodataTable MicrodataTable::SelectRows(std::span<const std::size_t> indices) const {
  std::vector<std::vector<Cell>> rows;
  std::vector<RowId> ids;
  rows.reserve(indices.size());
  ids.reserve(indices.size());
  for (std::size_t i : indices) {
    rows.push_back(rows_.at(i));
    ids.push_back(row_ids_.at(i));
  }
  MicrodataTable out;
  out.schema_ = schema_;
  out.rows_ = std::move(rows);
  out.row_ids_ = std::move(ids);
  return out;
}

MicrodataTable MicrodataTable::SelectAttributes(std::span<const std::size_t> columns) const {
  MicrodataTable out;
  for (std::size_t j : columns) out.schema_.push_back(schema_.at(j));
  out.rows_.resize(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    out.rows_[i].reserve(columns.size());
    for (std::size_t j : columns) out.rows_[i].push_back(rows_[i][j]);
  }
  out.row_ids_ = row_ids_;
  return out;
}

MicrodataTable LoadTable(std::string_view csv_bytes, const nlohmann::json& schema_descriptor) {
  return LoadTable(csv_bytes, SchemaFromJson(schema_descriptor));
}

MicrodataTable LoadTable(std::string_view csv_bytes, const Schema& schema) {
  const std::vector<CsvRecord> records = ParseCsv(csv_bytes);
  if (records.empty()) throw Error(ErrorCode::kMalformedCsv, "line 1: missing header row");
  const CsvRecord& header = records.front();

  std::map<std::string, const AttributeSchema*> by_name;
  for (const AttributeSchema& a : schema) by_name[a.name] = &a;

  Schema ordered;
  std::set<std::string> seen;
  for (std::size_t j = 0; j < header.size(); ++j) {
    const std::string name = NormalizeNfc(header[j]);
    auto it = by_name.find(name);
    if (it == by_name.end()) {
      throw Error(ErrorCode::kMalformedCsv,
                  "line 1: column '" + name + "' is not declared in the schema");
    }
    if (!seen.insert(name).second) {
      throw Error(ErrorCode::kMalformedCsv, "line 1: duplicate column '" + name + "'");
    }
    ordered.push_back(*it->second);
  }
  for (const AttributeSchema& a : schema) {
    if (!seen.contains(a.name)) throw Error(ErrorCode::kMissingColumn, a.name);
  }

  std::vector<std::vector<Cell>> rows;
  rows.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const std::size_t row = r - 1;
    std::vector<Cell> cells;
    cells.reserve(ordered.size());
    for (std::size_t j = 0; j < ordered.size(); ++j) {
      const std::string& raw = records[r][j];
      const AttributeSchema& a = ordered[j];
      auto violation = [&](const std::string& why) {
        return Error(ErrorCode::kDomainViolation,
                     "row " + std::to_string(row) + ", attribute " + a.name + ": " + why);
      };
      if (raw.empty()) throw violation("missing value");
      if (a.kind == Kind::kNumeric) {
        double value = 0.0;
        auto [end, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
        if (ec != std::errc() || end != raw.data() + raw.size()) {
          throw violation("'" + raw + "' is not a number");
        }
        if (!a.Contains(value)) throw violation("'" + raw + "' outside domain");
        cells.emplace_back(value);
      } else {
        std::string value = NormalizeNfc(raw);
        if (!a.Contains(value)) throw violation("'" + value + "' outside domain");
        cells.emplace_back(std::move(value));
      }
    }
    rows.push_back(std::move(cells));
  }
  return MicrodataTable(std::move(ordered), std::move(rows));
}

std::string SerializeTable(const MicrodataTable& table) {
  std::vector<CsvRecord> records;
  records.reserve(table.num_rows() + 1);
  CsvRecord header;
  for (const AttributeSchema& a : table.schema()) header.push_back(a.name);
  records.push_back(std::move(header));
  for (const auto& row : table.rows()) {
    CsvRecord record;
    record.reserve(row.size());
    for (const Cell& c : row) record.push_back(CellText(c));
    records.push_back(std::move(record));
  }
  return WriteCsv(records);
}

MicrodataTable SuppressIdentifiers(const MicrodataTable& table) {
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < table.num_attributes(); ++j) {
    if (table.attribute(j).role != Role::kIdentifier) keep.push_back(j);
  }
  return table.SelectAttributes(keep);
}

std::string_view NeighborModelName(NeighborModel model) {
  return model == NeighborModel::kAddRemove ? "add_remove" : "replace";
}

NeighborModel ParseNeighborModel(std::string_view name) {
  if (name == "add_remove") return NeighborModel::kAddRemove;
  if (name == "replace") return NeighborModel::kReplace;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown neighbor model '" + std::string(name) + "'");
}

namespace {

std::multiset<std::vector<std::string>> RowMultiset(const MicrodataTable& t) {
  std::multiset<std::vector<std::string>> out;
  for (const auto& row : t.rows()) {
    std::vector<std::string> key;
    for (const Cell& c : row) key.push_back(CellText(c));
    out.insert(std::move(key));
  }
  return out;
}

}  // namespace

bool AreNeighbors(const MicrodataTable& a, const MicrodataTable& b, NeighborModel model) {
  if (a.schema() != b.schema()) return false;
  const auto ra = RowMultiset(a);
  const auto rb = RowMultiset(b);
  std::vector<std::vector<std::string>> only_a, only_b;
  std::set_difference(ra.begin(), ra.end(), rb.begin(), rb.end(), std::back_inserter(only_a));
  std::set_difference(rb.begin(), rb.end(), ra.begin(), ra.end(), std::back_inserter(only_b));
  if (model == NeighborModel::kAddRemove) {
    return only_a.size() + only_b.size() == 1;
  }
  return only_a.size() == 1 && only_b.size() == 1;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

}  // namespace sdc
