#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace bellsim {

/// Locale-independent, 17 significant digits; round-trips through strtod.
std::string format_g17(double x);

std::string format_i64(std::int64_t v);

/// Minimal CSV emitter: one header row, fixed arity, '\n' line endings,
/// full-precision numeric cells. Identical data produce identical bytes.
class CsvFile {
public:
    CsvFile(const std::string& path, const std::vector<std::string>& columns);

    void row(const std::vector<std::string>& cells);

private:
    std::ofstream out_;
    std::size_t arity_;
};

}  // namespace bellsim
