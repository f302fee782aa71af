#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace arx {

/// Flat YAML mapping of keys to scalars or lists of scalars:
///
///   # comment
///   p: 2
///   a: [-1.2, 0.5]
///   family: gaussian
///   statistics: [qsl:1, cost:2]
///
/// Nested mappings are rejected and duplicate keys are an error. Getters
/// throw ValidationError on a missing key or a malformed value.
class KeyValueDocument {
 public:
  static KeyValueDocument parse(std::istream& in, const std::string& source = "<input>");
  static KeyValueDocument parse_string(const std::string& text);
  static KeyValueDocument load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::vector<std::string> keys() const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<long> get_int_list(const std::string& key) const;
  std::vector<std::string> get_string_list(const std::string& key) const;

  /// Throws ValidationError naming the first key outside `allowed`.
  void require_known_keys(const std::set<std::string>& allowed) const;

 private:
  struct Entry {
    bool is_list = false;
    std::vector<std::string> items;
    int line = 0;
  };
  const Entry& entry(const std::string& key) const;
  std::string where(const std::string& key) const;

  std::string source_;
  std::map<std::string, Entry> values_;
};

}  // namespace arx
