#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace fvslv {

/// Round-trip exact decimal form of a double (17 significant digits).
std::string format_double(double v);

/// Minimal CSV writer with a fixed header and 17-digit numeric fields.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    void row(std::initializer_list<double> fields);
    void row(const std::vector<double>& fields);

private:
    std::ofstream out_;
    std::size_t columns_;
};

}  // namespace fvslv
