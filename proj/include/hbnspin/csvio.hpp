#ifndef HBNSPIN_CSVIO_HPP
#define HBNSPIN_CSVIO_HPP

#include "hbnspin/dynamics.hpp"
#include "hbnspin/spectra.hpp"

#include <string>
#include <vector>

namespace hbnspin::io {

/// Deterministic float formatting shared by every CSV writer (%.12g,
/// '.' decimal separator, locale independent).
std::string format_double(double v);

/// Writes rows as CSV with LF line endings, atomically (temp file + rename).
void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows);

void write_spectrum_csv(const std::string& path, const spectra::Spectrum& s);
void write_timetrace_csv(const std::string& path, const dynamics::TimeTrace& t);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Reads a numeric CSV with one header line.  Throws on I/O or parse failure.
CsvTable read_csv(const std::string& path);

spectra::Spectrum read_spectrum_csv(const std::string& path);
dynamics::TimeTrace read_timetrace_csv(const std::string& path);

}  // namespace hbnspin::io

#endif
