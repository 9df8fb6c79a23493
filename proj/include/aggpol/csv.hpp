#ifndef AGGPOL_CSV_HPP
#define AGGPOL_CSV_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "aggpol/errors.hpp"

namespace aggpol {

/// Shortest round-trippable decimal form; NaN spelled "nan" regardless of
/// platform printf quirks.
inline std::string csv_format(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Write column-major data as CSV.  All columns must share one length.
inline void write_csv(const std::string& path,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns)
{
    if (header.size() != columns.size())
        throw io_error("write_csv: header/column count mismatch for " + path);
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns)
        if (c.size() != rows)
            throw io_error("write_csv: ragged columns for " + path);

    std::ofstream out(path);
    if (!out)
        throw io_error("write_csv: cannot open " + path);
    for (std::size_t j = 0; j < header.size(); ++j)
        out << (j ? "," : "") << header[j];
    out << '\n';
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j)
            out << (j ? "," : "") << csv_format(columns[j][i]);
        out << '\n';
    }
    if (!out)
        throw io_error("write_csv: write failed for " + path);
}

} // namespace aggpol

#endif // AGGPOL_CSV_HPP
