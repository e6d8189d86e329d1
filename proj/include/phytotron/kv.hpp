#pragma once

// Flat key = value file reader. Supports '#' comments, blank lines, bare or
// quoted string values, and doubles. Errors carry file:line context.

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

namespace phyto {

class KeyValueFile {
 public:
  static KeyValueFile load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    KeyValueFile f;
    f.path_ = path;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": expected 'key = value', got '" + trimmed + "'");
      std::string key = trim(trimmed.substr(0, eq));
      std::string val = trim(trimmed.substr(eq + 1));
      if (key.empty())
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key");
      if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
        val = val.substr(1, val.size() - 2);
      if (f.kv_.count(key))
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": duplicate key '" + key + "'");
      f.kv_[key] = val;
    }
    return f;
  }

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  const std::string& get_string(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end())
      throw std::runtime_error(path_ + ": missing required key '" + key + "'");
    return it->second;
  }

  double get_double(const std::string& key) const {
    const std::string& s = get_string(key);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
      throw std::runtime_error(path_ + ": key '" + key + "' is not a number: '" + s + "'");
    return v;
  }

  double get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
  }

  std::string get_string_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
  }

  const std::map<std::string, std::string>& entries() const { return kv_; }
  const std::string& path() const { return path_; }

 private:
  static std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
  }

  std::string path_;
  std::map<std::string, std::string> kv_;
};

}  // namespace phyto
