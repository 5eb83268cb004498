#include "tripod/csv.hpp"

#include "tripod/errors.hpp"

#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <sstream>

namespace tripod {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

CsvTable& CsvTable::meta(const std::string& key, const std::string& value) {
    meta_.emplace_back(key, value);
    return *this;
}

CsvTable& CsvTable::meta(const std::string& key, double value) { return meta(key, format_number(value)); }

CsvTable::Row& CsvTable::Row::operator<<(double v) {
    cells_.push_back(format_number(v));
    return *this;
}

CsvTable::Row& CsvTable::Row::operator<<(int v) {
    cells_.push_back(std::to_string(v));
    return *this;
}

CsvTable::Row& CsvTable::Row::operator<<(const std::string& s) {
    std::string cell = s;
    for (char& ch : cell)
        if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
    cells_.push_back(std::move(cell));
    return *this;
}

CsvTable::Row::~Row() noexcept(false) {
    if (cells_.size() != table_.columns_.size()) {
        if (std::uncaught_exceptions() > 0) return;
        throw InvalidArgument("csv row has " + std::to_string(cells_.size()) + " cells, header has " +
                              std::to_string(table_.columns_.size()));
    }
    table_.rows_.push_back(std::move(cells_));
}

std::string CsvTable::body() const {
    std::ostringstream os;
    const auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
        os << '\n';
    };
    line(columns_);
    for (const auto& r : rows_) line(r);
    return os.str();
}

std::string CsvTable::str() const {
    std::string out;
    for (const auto& [k, v] : meta_) out += "# " + k + "=" + v + "\n";
    return out + body();
}

void CsvTable::write(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidArgument("cannot open " + path.string() + " for writing");
    f << str();
    if (!f) throw InvalidArgument("write to " + path.string() + " failed");
}

std::size_t CsvData::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw InvalidArgument("column '" + name + "' not found");
}

CsvData read_csv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw InvalidArgument("cannot open " + path.string());
    CsvData d;
    std::string line;
    int number = 0;
    const auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(cell);
        return out;
    };
    while (std::getline(f, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            const auto eq = line.find('=');
            const auto key_start = line.find_first_not_of("# ");
            if (eq != std::string::npos && key_start < eq)
                d.meta.emplace_back(line.substr(key_start, eq - key_start), line.substr(eq + 1));
            continue;
        }
        if (d.columns.empty()) {
            d.columns = split(line);
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != d.columns.size())
            throw InvalidArgument(path.string() + ":" + std::to_string(number) + ": expected " +
                                  std::to_string(d.columns.size()) + " cells");
        std::vector<double> row;
        for (const auto& c : cells) {
            double v = 0.0;
            const auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
            row.push_back(ec == std::errc() && p == c.data() + c.size() ? v
                                                                         : std::numeric_limits<double>::quiet_NaN());
        }
        d.rows.push_back(std::move(row));
        d.text.push_back(cells);
    }
    if (d.columns.empty()) throw InvalidArgument(path.string() + ": no header row");
    return d;
}

}  // namespace tripod
