#include "hbnspin/kvconfig.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hbnspin::io {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

KeyValues KeyValues::parse(const std::string& text) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
        kv.map_[key] = value;
    }
    return kv;
}

KeyValues KeyValues::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string KeyValues::dump() const {
    std::ostringstream out;
    for (const auto& [k, v] : map_) out << k << " = " << v << "\n";
    return out.str();
}

void KeyValues::write_file(const std::string& path) const {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write file: " + tmp);
        out << dump();
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

bool KeyValues::has(const std::string& key) const { return map_.count(key) > 0; }

void KeyValues::set(const std::string& key, const std::string& value) { map_[key] = value; }

void KeyValues::set_double(const std::string& key, double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    map_[key] = buf;
}

void KeyValues::set_long(const std::string& key, long value) {
    map_[key] = std::to_string(value);
}

void KeyValues::set_bool(const std::string& key, bool value) {
    map_[key] = value ? "true" : "false";
}

std::string KeyValues::get_string(const std::string& key) const {
    const auto it = map_.find(key);
    if (it == map_.end()) throw std::invalid_argument("missing config key: " + key);
    return it->second;
}

std::string KeyValues::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = map_.find(key);
    return it == map_.end() ? fallback : it->second;
}

double KeyValues::get_double(const std::string& key) const {
    const std::string v = get_string(key);
    std::size_t pos = 0;
    double out;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key " + key + ": not a number: '" + v + "'");
    }
    if (pos != v.size())
        throw std::invalid_argument("config key " + key + ": trailing characters in '" + v + "'");
    return out;
}

double KeyValues::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long KeyValues::get_long(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get_string(key);
    try {
        return std::stol(v);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key " + key + ": not an integer: '" + v + "'");
    }
}

bool KeyValues::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get_string(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("config key " + key + ": not a boolean: '" + v + "'");
}

std::vector<double> KeyValues::parse_range(const std::string& text) {
    const auto c1 = text.find(':');
    const auto c2 = text.rfind(':');
    if (c1 == std::string::npos || c2 == c1)
        throw std::invalid_argument("range must be start:stop:step, got '" + text + "'");
    const double start = std::stod(text.substr(0, c1));
    const double stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    const double step = std::stod(text.substr(c2 + 1));
    if (!(step > 0) || stop < start)
        throw std::invalid_argument("range requires step > 0 and stop >= start: '" + text + "'");
    std::vector<double> out;
    const int n = static_cast<int>((stop - start) / step + 1e-9) + 1;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(start + step * i);
    return out;
}

std::vector<double> KeyValues::parse_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
}

}  // namespace hbnspin::io
