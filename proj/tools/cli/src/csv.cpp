#include "bifurcate_cli/csv.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace bifurcate::cli {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    for (const auto& h : header) cell(std::string_view(h));
    end_row();
}

void CsvWriter::sep() {
    if (row_started_) out_ << ',';
    row_started_ = true;
}

CsvWriter& CsvWriter::cell(double v) {
    sep();
    out_ << format_double(v);
    return *this;
}

CsvWriter& CsvWriter::cell(std::string_view s) {
    sep();
    out_ << s;
    return *this;
}

CsvWriter& CsvWriter::cell(bool b) {
    sep();
    out_ << (b ? '1' : '0');
    return *this;
}

CsvWriter& CsvWriter::cell(std::size_t n) {
    sep();
    out_ << n;
    return *this;
}

void CsvWriter::end_row() {
    out_ << '\n';
    row_started_ = false;
}

void CsvWriter::close() {
    out_.close();
    if (!out_) throw std::runtime_error("failed writing " + path_.string());
}

NumericTable read_numeric_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    NumericTable t;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv " + path.string());
    std::stringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            const auto next = std::min(line.find(',', pos), line.size());
            double v = 0.0;
            const auto res = std::from_chars(line.data() + pos, line.data() + next, v);
            if (res.ec != std::errc() || res.ptr != line.data() + next) {
                throw std::runtime_error("non-numeric cell in " + path.string());
            }
            row.push_back(v);
            pos = next + 1;
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace bifurcate::cli
