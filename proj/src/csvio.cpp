#include "hbnspin/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hbnspin::io {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write file: " + tmp);
        out << header << "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out << ",";
                out << format_double(row[i]);
            }
            out << "\n";
        }
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

void write_spectrum_csv(const std::string& path, const spectra::Spectrum& s) {
    std::vector<std::vector<double>> rows;
    rows.reserve(s.freqs_mhz.size());
    for (std::size_t i = 0; i < s.freqs_mhz.size(); ++i)
        rows.push_back({s.freqs_mhz[i], s.intensity[i]});
    write_csv(path, "frequency_mhz,intensity", rows);
}

void write_timetrace_csv(const std::string& path, const dynamics::TimeTrace& t) {
    std::vector<std::vector<double>> rows;
    rows.reserve(t.t_us.size());
    for (std::size_t i = 0; i < t.t_us.size(); ++i)
        rows.push_back({t.t_us[i], t.population[i]});
    write_csv(path, "time_us,population", rows);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV: " + path);
    {
        std::istringstream hs(line);
        std::string col;
        while (std::getline(hs, col, ',')) table.header.push_back(col);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != table.header.size())
            throw std::runtime_error("ragged CSV row in " + path);
        table.rows.push_back(std::move(row));
    }
    return table;
}

spectra::Spectrum read_spectrum_csv(const std::string& path) {
    const CsvTable t = read_csv(path);
    if (t.header.size() != 2)
        throw std::runtime_error("spectrum CSV must have 2 columns: " + path);
    spectra::Spectrum s;
    for (const auto& row : t.rows) {
        s.freqs_mhz.push_back(row[0]);
        s.intensity.push_back(row[1]);
    }
    return s;
}

dynamics::TimeTrace read_timetrace_csv(const std::string& path) {
    const CsvTable t = read_csv(path);
    if (t.header.size() != 2)
        throw std::runtime_error("time trace CSV must have 2 columns: " + path);
    dynamics::TimeTrace out;
    for (const auto& row : t.rows) {
        out.t_us.push_back(row[0]);
        out.population.push_back(row[1]);
    }
    return out;
}

}  // namespace hbnspin::io
