#ifndef VOLCANO_CSV_HPP
#define VOLCANO_CSV_HPP

//------------------------------------------------------------------------------
// csv.hpp
//
// Minimal CSV writer/reader pair for the tool's outputs.  Format: UTF-8, LF
// line endings, comment lines prefixed '#', one header row, numeric cells
// printed with 17 significant digits so that write -> read round trips are
// bit-exact.
//------------------------------------------------------------------------------

#include <iosfwd>
#include <string>
#include <vector>

namespace volcano {

// %.17g rendering of a double (shortest form that survives a round trip)
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> comments; // '#' lines in file order, prefix kept
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// meta/comment lines are emitted verbatim (each must already start with '#');
// trailing_comments land after the data rows (event annotations)
void write_csv(std::ostream& os, const std::vector<std::string>& head_comments,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows,
               const std::vector<std::string>& trailing_comments = {});

// parses what write_csv produces; throws std::runtime_error on ragged rows,
// unparseable cells, or a missing header
CsvTable read_csv(std::istream& is);

} // namespace volcano

#endif // VOLCANO_CSV_HPP
