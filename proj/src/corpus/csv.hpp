#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace driftdet::detail {

struct CsvRecord {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

// RFC-4180: quoted fields may contain separators, CR/LF and doubled quotes.
// Throws FormatError on an unterminated quote or stray quote in a bare field.
std::vector<CsvRecord> read_csv(std::istream& in);

}  // namespace driftdet::detail
