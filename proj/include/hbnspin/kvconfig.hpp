#ifndef HBNSPIN_KVCONFIG_HPP
#define HBNSPIN_KVCONFIG_HPP

#include <map>
#include <string>
#include <vector>

namespace hbnspin::io {

/// Flat `key = value` text with '#' comments.  Keys are sorted on dump, so
/// dump(parse(text)) is idempotent.  Units live in key names (b0_mT, ...).
class KeyValues {
  public:
    static KeyValues parse(const std::string& text);
    static KeyValues parse_file(const std::string& path);  // throws on I/O failure
    std::string dump() const;
    void write_file(const std::string& path) const;  // atomic: temp + rename

    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);
    void set_double(const std::string& key, double value);   // %.17g, exact roundtrip
    void set_long(const std::string& key, long value);
    void set_bool(const std::string& key, bool value);

    std::string get_string(const std::string& key) const;  // throws if missing
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long get_long(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    /// "start:stop:step" -> inclusive uniform grid.
    static std::vector<double> parse_range(const std::string& text);
    /// Comma-separated doubles.
    static std::vector<double> parse_list(const std::string& text);

    const std::map<std::string, std::string>& entries() const { return map_; }

  private:
    std::map<std::string, std::string> map_;
};

}  // namespace hbnspin::io

#endif
