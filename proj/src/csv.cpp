//------------------------------------------------------------------------------
// csv.cpp
//------------------------------------------------------------------------------

#include "volcano/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace volcano {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(std::ostream& os, const std::vector<std::string>& head_comments,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows,
               const std::vector<std::string>& trailing_comments) {
    for (const auto& c : head_comments)
        os << c << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i)
            os << ',';
        os << columns[i];
    }
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i)
                os << ',';
            os << format_double(row[i]);
        }
        os << '\n';
    }
    for (const auto& c : trailing_comments)
        os << c << '\n';
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

CsvTable read_csv(std::istream& is) {
    CsvTable tb;
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line.front() == '#') {
            tb.comments.push_back(line);
            continue;
        }
        if (!header_seen) {
            tb.columns = split_fields(line);
            header_seen = true;
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != tb.columns.size())
            throw std::runtime_error("csv: ragged row: " + line);
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) {
            const char* s = f.c_str();
            char* end     = nullptr;
            const double v = std::strtod(s, &end);
            if (end == s || *end != '\0')
                throw std::runtime_error("csv: unparseable cell: " + f);
            row.push_back(v);
        }
        tb.rows.push_back(std::move(row));
    }
    if (!header_seen)
        throw std::runtime_error("csv: missing header row");
    return tb;
}

} // namespace volcano
