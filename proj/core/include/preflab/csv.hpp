#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace preflab {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // throws InputError
};

std::string to_csv_text(const CsvTable& table);
// Throws FormatError with a line number on ragged rows.
CsvTable parse_csv(const std::string& text);

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

// Fixed-precision float formatting so output bytes are reproducible.
std::string csv_num(double v, int precision = 6);

}  // namespace preflab
