#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace confront {

/// CSV emission with a fixed format contract: comma separator, '.' decimal,
/// header row, UTF-8, and round-trip double formatting so identical runs
/// produce byte-identical files.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& cells);

    const std::filesystem::path& path() const { return path_; }

    static std::string format_double(double v);

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_;
};

/// Two-column numeric CSV (optionally with a header row), used for custom
/// reaction and potential tables.
std::pair<std::vector<double>, std::vector<double>> read_two_column_csv(
    const std::filesystem::path& path);

}  // namespace confront
