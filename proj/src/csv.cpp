#include "fvslv/csv.hpp"

#include <iomanip>
#include <limits>
#include <sstream>

#include "fvslv/errors.hpp"

namespace fvslv {

std::string format_double(double v) {
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
    return s.str();
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path), columns_(header.size()) {
    if (!out_) throw ConfigError("cannot open " + path.string() + " for writing");
    for (std::size_t k = 0; k < header.size(); ++k) {
        out_ << (k ? "," : "") << header[k];
    }
    out_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> fields) {
    row(std::vector<double>(fields));
}

void CsvWriter::row(const std::vector<double>& fields) {
    if (fields.size() != columns_) throw ArgumentError("CSV row has the wrong number of fields");
    for (std::size_t k = 0; k < fields.size(); ++k) {
        out_ << (k ? "," : "") << format_double(fields[k]);
    }
    out_ << '\n';
}

}  // namespace fvslv
