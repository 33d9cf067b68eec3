#include "sdc/csv.h"

#include <string>

#include "sdc/error.h"

namespace sdc {

std::vector<CsvRecord> ParseCsv(std::string_view text) {
  std::vector<CsvRecord> records;
  CsvRecord record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  int line = 1;
  int record_line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    if (!records.empty() && record.size() != records.front().size()) {
      throw Error(ErrorCode::kMalformedCsv,
                  "line " + std::to_string(record_line) + ": expected " +
                      std::to_string(records.front().size()) + " fields, got " +
                      std::to_string(record.size()));
    }
    records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_was_quoted) {
          throw Error(ErrorCode::kMalformedCsv,
                      "line " + std::to_string(line) +
                          ": quote inside unquoted field");
        }
        in_quotes = true;
        field_was_quoted = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        [[fallthrough]];
      case '\n':
        end_record();
        ++line;
        record_line = line;
        break;
      default:
        if (field_was_quoted) {
          throw Error(ErrorCode::kMalformedCsv,
                      "line " + std::to_string(line) +
                          ": text after closing quote");
        }
        field.push_back(c);
    }
  }
  if (in_quotes) {
    throw Error(ErrorCode::kMalformedCsv,
                "line " + std::to_string(record_line) + ": unterminated quote");
  }
  // A trailing terminator does not start a new record.
  if (!field.empty() || field_was_quoted || !record.empty()) end_record();
  return records;
}

std::string CsvEscape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string WriteCsv(const std::vector<CsvRecord>& records) {
  std::string out;
  for (const CsvRecord& record : records) {
    for (std::size_t j = 0; j < record.size(); ++j) {
      if (j > 0) out.push_back(',');
      out += CsvEscape(record[j]);
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace sdc
