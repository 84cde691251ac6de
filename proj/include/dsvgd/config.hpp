#pragma once

#include "dsvgd/common.hpp"

#include <map>
#include <string>
#include <vector>

namespace dsvgd {

// Flat key = value experiment description with dotted keys. Unknown keys,
// malformed lines and incompatible protocol/model pairs are rejected with
// the offending key named.
class ExperimentConfig {
 public:
  ExperimentConfig() = default;

  static ExperimentConfig from_text(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Throws std::invalid_argument naming the first offending key.
  void validate() const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace dsvgd
