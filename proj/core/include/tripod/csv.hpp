#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace tripod {

/// `#` key=value metadata lines, one header row, then data rows. Numbers use
/// the shortest round-trip representation.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);

    CsvTable& meta(const std::string& key, const std::string& value);
    CsvTable& meta(const std::string& key, double value);

    /// Cells are numbers or preformatted strings; the count must match the header.
    class Row {
    public:
        Row& operator<<(double v);
        Row& operator<<(int v);
        Row& operator<<(const std::string& s);
        Row& operator<<(const char* s) { return *this << std::string(s); }
        ~Row() noexcept(false);

    private:
        friend class CsvTable;
        explicit Row(CsvTable& t) : table_(t) {}
        CsvTable& table_;
        std::vector<std::string> cells_;
    };
    Row row() { return Row(*this); }

    const std::vector<std::string>& columns() const { return columns_; }
    std::size_t rows() const { return rows_.size(); }

    std::string str() const;
    /// Data section only: header and rows.
    std::string body() const;
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::pair<std::string, std::string>> meta_;
    std::vector<std::vector<std::string>> rows_;
};

std::string format_number(double v);

struct CsvData {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;  ///< non-numeric cells read as NaN
    std::vector<std::vector<std::string>> text;

    /// Index of a column; throws InvalidArgument when it is missing.
    std::size_t column(const std::string& name) const;
};

/// Reads a table written by CsvTable. Throws InvalidArgument on ragged rows.
CsvData read_csv(const std::filesystem::path& path);

}  // namespace tripod
