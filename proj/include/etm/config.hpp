#ifndef ETM_CONFIG_HPP
#define ETM_CONFIG_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "etm/firing_model.hpp"

namespace etm {

/// key = value configuration with # comments and dotted section keys.
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_text(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_str(const std::string& key) const;
  std::string get_str(const std::string& key, const std::string& fallback) const;
  double get_num(const std::string& key) const;
  double get_num(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;

  // Rejects keys outside the allowed set (ConfigError naming the offender).
  void check_known(const std::vector<std::string>& allowed) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Model keys: model.hazard in {sigmoid9, satquad, constant}; model.b
// (sigmoid9/satquad connectivity; satquad uses b_bar = b^2, or set
// model.b_bar directly); model.phi for constant; model.sigma optional
// (defaults 0.5 / 1.0 / 1.0).
FiringModel model_from_config(const Config& cfg);

// Allowed model.* keys, for commands composing their own allow lists.
std::vector<std::string> model_config_keys();

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);

// Comma-separated rows; lines starting with # are metadata and skipped.
std::vector<std::vector<std::string>> read_csv(const std::string& path);

}  // namespace etm

#endif
