#include "arx/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "arx/errors.hpp"

namespace arx {

namespace {

std::string scalar_text(const YAML::Node& node, const std::string& where) {
  if (!node.IsScalar()) throw ValidationError(where + ": expected a scalar or a list of scalars");
  return node.Scalar();
}

}  // namespace

KeyValueDocument KeyValueDocument::parse(std::istream& in, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(in);
  } catch (const YAML::Exception& e) {
    throw ValidationError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  KeyValueDocument doc;
  doc.source_ = source;
  if (root.IsNull()) return doc;
  if (!root.IsMap()) throw ValidationError(source + ": expected a mapping of keys to values");
  for (const auto& kv : root) {
    const int line = kv.first.Mark().line + 1;
    const std::string where = source + ":" + std::to_string(line);
    const std::string key = scalar_text(kv.first, where);
    if (doc.values_.count(key)) throw ValidationError(where + ": duplicate key '" + key + "'");
    Entry e;
    e.line = line;
    if (kv.second.IsSequence()) {
      e.is_list = true;
      for (const auto& item : kv.second) e.items.push_back(scalar_text(item, where + ": key '" + key + "'"));
    } else if (kv.second.IsNull()) {
      throw ValidationError(where + ": key '" + key + "' has no value");
    } else {
      e.items = {scalar_text(kv.second, where + ": key '" + key + "'")};
    }
    doc.values_.emplace(key, std::move(e));
  }
  return doc;
}

KeyValueDocument KeyValueDocument::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

KeyValueDocument KeyValueDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  return parse(in, path.string());
}

std::vector<std::string> KeyValueDocument::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, _] : values_) out.push_back(k);
  return out;
}

const KeyValueDocument::Entry& KeyValueDocument::entry(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ValidationError(source_ + ": missing key '" + key + "'");
  return it->second;
}

std::string KeyValueDocument::where(const std::string& key) const {
  return source_ + ":" + std::to_string(entry(key).line) + ": key '" + key + "'";
}

namespace {

double to_double(const std::string& s, const std::string& where) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    throw ValidationError(where + ": '" + s + "' is not a number");
  return v;
}

long to_long(const std::string& s, const std::string& where) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    // Accept integral floating forms such as 1e4.
    const double d = to_double(s, where);
    if (d != static_cast<double>(static_cast<long>(d)))
      throw ValidationError(where + ": '" + s + "' is not an integer");
    return static_cast<long>(d);
  }
  return v;
}

}  // namespace

std::string KeyValueDocument::get_string(const std::string& key) const {
  const auto& e = entry(key);
  if (e.is_list) throw ValidationError(where(key) + ": expected a scalar, found a list");
  return e.items.front();
}

std::string KeyValueDocument::get_string(const std::string& key,
                                         const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double KeyValueDocument::get_double(const std::string& key) const {
  return to_double(get_string(key), where(key));
}

double KeyValueDocument::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long KeyValueDocument::get_int(const std::string& key) const {
  return to_long(get_string(key), where(key));
}

long KeyValueDocument::get_int(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::vector<std::string> KeyValueDocument::get_string_list(const std::string& key) const {
  return entry(key).items;
}

std::vector<double> KeyValueDocument::get_double_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& s : entry(key).items) out.push_back(to_double(s, where(key)));
  return out;
}

std::vector<long> KeyValueDocument::get_int_list(const std::string& key) const {
  std::vector<long> out;
  for (const auto& s : entry(key).items) out.push_back(to_long(s, where(key)));
  return out;
}

void KeyValueDocument::require_known_keys(const std::set<std::string>& allowed) const {
  for (const auto& [k, e] : values_)
    if (!allowed.count(k))
      throw ValidationError(source_ + ":" + std::to_string(e.line) + ": unknown key '" + k + "'");
}

}  // namespace arx
