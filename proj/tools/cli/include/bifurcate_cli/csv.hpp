#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace bifurcate::cli {

/// Shortest form of `v` carrying 17 significant digits, independent of locale.
std::string format_double(double v);

/// Comma-separated writer. Throws std::runtime_error when the file cannot be
/// opened or written.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    CsvWriter& cell(double v);
    CsvWriter& cell(std::string_view s);
    CsvWriter& cell(bool b);
    CsvWriter& cell(std::size_t n);
    void end_row();
    void close();

private:
    void sep();
    std::filesystem::path path_;
    std::ofstream out_;
    bool row_started_ = false;
};

/// Reads a CSV with a header line into its header and rows of numbers.
/// Cells that are not numbers are rejected.
struct NumericTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
NumericTable read_numeric_csv(const std::filesystem::path& path);

}  // namespace bifurcate::cli
