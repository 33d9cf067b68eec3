#ifndef SDC_CSV_H_
#define SDC_CSV_H_

#include <string>
#include <string_view>
#include <vector>

namespace sdc {

using CsvRecord = std::vector<std::string>;

// RFC-4180 reader: quoted fields, doubled quotes, embedded separators and
// line breaks, CRLF or LF record terminators. Every record must have the
// same field count as the first one. Throws Error(kMalformedCsv) naming the
// 1-based line of the first problem.
std::vector<CsvRecord> ParseCsv(std::string_view text);

// Quotes a field only when it contains a separator, quote or line break.
std::string CsvEscape(std::string_view field);

// Records joined with LF terminators.
std::string WriteCsv(const std::vector<CsvRecord>& records);

}  // namespace sdc

#endif  // SDC_CSV_H_
