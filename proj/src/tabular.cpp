#include "levyfields/tabular.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

#include "levyfields/errors.hpp"

namespace levyfields {

namespace {

bool needs_quoting(const std::string& field) {
    return field.find_first_of(",\"\r\n") != std::string::npos;
}

std::string quoted(const std::string& field) {
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out << ',';
        out << (needs_quoting(fields[i]) ? quoted(fields[i]) : fields[i]);
    }
    out << "\r\n";
}

std::string format_g17(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::vector<std::string> record{std::string()};
    bool in_quotes = false;
    bool any_char = false;

    auto flush_record = [&] {
        if (table.header.empty()) {
            table.header = record;
        } else {
            if (record.size() != table.header.size())
                throw DomainError("csv record has " + std::to_string(record.size()) +
                                  " fields, header has " + std::to_string(table.header.size()));
            table.rows.push_back(record);
        }
        record.assign(1, std::string());
        any_char = false;
    };

    char c = 0;
    while (in.get(c)) {
        any_char = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    record.back() += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                record.back() += c;
            }
            continue;
        }
        switch (c) {
        case '"': in_quotes = true; break;
        case ',': record.emplace_back(); break;
        case '\r':
            if (in.peek() == '\n') in.get(c);
            flush_record();
            break;
        case '\n': flush_record(); break;
        default: record.back() += c;
        }
    }
    if (in_quotes) throw DomainError("csv ends inside a quoted field");
    // Final record without a trailing newline still counts.
    if (any_char && (record.size() > 1 || !record.back().empty())) flush_record();
    return table;
}

} // namespace levyfields
