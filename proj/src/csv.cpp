#include "ocp2d/csv.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ocp {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(std::ostream& os, const CsvTable& table) {
    for (const std::string& m : table.metadata) os << "# " << m << "\n";
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) os << ",";
        os << table.header[i];
    }
    os << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ",";
            os << format_double(row[i]);
        }
        os << "\n";
    }
}

std::string to_csv_string(const CsvTable& table) {
    std::ostringstream ss;
    write_csv(ss, table);
    return ss.str();
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

} // namespace

CsvTable parse_csv(std::istream& is) {
    CsvTable table;
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::size_t start = 1;
            if (start < line.size() && line[start] == ' ') ++start;
            table.metadata.push_back(line.substr(start));
            continue;
        }
        if (!header_seen) {
            table.header = split_commas(line);
            header_seen = true;
            continue;
        }
        std::vector<double> row;
        for (const std::string& cell : split_commas(line)) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0')
                throw std::runtime_error("CSV: bad numeric cell '" + cell + "'");
            row.push_back(v);
        }
        if (row.size() != table.header.size())
            throw std::runtime_error("CSV: row width differs from header");
        table.rows.push_back(std::move(row));
    }
    if (!header_seen) throw std::runtime_error("CSV: missing header row");
    return table;
}

CsvTable parse_csv_string(const std::string& text) {
    std::istringstream ss(text);
    return parse_csv(ss);
}

std::vector<double> parse_grid(const std::string& spec) {
    const std::size_t c1 = spec.find(':');
    const std::size_t c2 = c1 == std::string::npos ? std::string::npos
                                                   : spec.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw std::invalid_argument("grid must be start:stop:step");

    const auto parse_num = [](const std::string& t) {
        char* end = nullptr;
        const double v = std::strtod(t.c_str(), &end);
        if (end == t.c_str() || *end != '\0')
            throw std::invalid_argument("grid: bad number '" + t + "'");
        return v;
    };
    const double start = parse_num(spec.substr(0, c1));
    const double stop = parse_num(spec.substr(c1 + 1, c2 - c1 - 1));
    const double step = parse_num(spec.substr(c2 + 1));
    if (!(step > 0.0)) throw std::invalid_argument("grid: step must be > 0");
    if (stop < start) throw std::invalid_argument("grid: stop < start");

    std::vector<double> pts;
    for (long i = 0;; ++i) {
        const double v = start + step * static_cast<double>(i);
        if (v > stop + 0.5 * step) break;
        pts.push_back(v);
        if (pts.size() > 10'000'000)
            throw std::invalid_argument("grid: too many points");
    }
    return pts;
}

} // namespace ocp
