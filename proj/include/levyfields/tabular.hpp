#pragma once

#include <iosfwd>
#include <string>
#include <vector>

// Minimal CSV layer shared by every emitter: RFC-4180 framing (CRLF record
// ends, double-quote escaping, header row first), '.' decimal point.  The
// reader accepts both CRLF and bare LF so files survive checkout-time
// line-ending translation.

namespace levyfields {

// One record; fields containing comma, quote, or newline come out quoted.
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

// Shortest round-trip decimal form of a double ("%.17g").
std::string format_g17(double value);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Parses a whole CSV document (header row plus records).  Throws
// DomainError on unbalanced quotes or a record whose field count differs
// from the header's.
CsvTable read_csv(std::istream& in);

} // namespace levyfields
