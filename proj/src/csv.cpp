#include "bellsim/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace bellsim {

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_i64(std::int64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
    return buf;
}

CsvFile::CsvFile(const std::string& path, const std::vector<std::string>& columns)
    : out_(path, std::ios::binary), arity_(columns.size()) {
    if (!out_) throw std::runtime_error("cannot open output file: " + path);
    row(columns);
}

void CsvFile::row(const std::vector<std::string>& cells) {
    if (cells.size() != arity_)
        throw std::logic_error("CsvFile: row arity does not match header");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
    if (!out_) throw std::runtime_error("CsvFile: write failed");
}

}  // namespace bellsim
