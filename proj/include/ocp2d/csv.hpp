#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ocp {

// CSV dialect: '#'-prefixed metadata lines, one header row, comma-separated
// values with '.' decimal and 17 significant digits (round-trip exact for
// doubles). Re-parsing a table and re-emitting it reproduces the bytes.

struct CsvTable {
    std::vector<std::string> metadata; // without the leading "# "
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Format a double with 17 significant digits (shortest-exact is not used on
/// purpose: a fixed format keeps emitted files stable across libc versions).
std::string format_double(double v);

void write_csv(std::ostream& os, const CsvTable& table);
std::string to_csv_string(const CsvTable& table);

/// Parse a CSV document in the dialect above. Throws std::runtime_error on
/// malformed input.
CsvTable parse_csv(std::istream& is);
CsvTable parse_csv_string(const std::string& text);

/// Inclusive grid "start:stop:step": points start + i*step while they stay
/// within stop + step/2. Throws std::invalid_argument on malformed syntax,
/// zero/negative step, or an empty range.
std::vector<double> parse_grid(const std::string& spec);

} // namespace ocp
