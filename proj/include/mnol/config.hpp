#pragma once

#include <boost/property_tree/ptree.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mnol/entropy_bounds.hpp"
#include "mnol/harness.hpp"
#include "mnol/sampling.hpp"

namespace mnol {

/// INI-style configuration (`[section]` headers, `key = value` lines, `;` or
/// `#` comments). Every read is recorded with its resolved value so the full
/// effective configuration can be echoed back by dump().
class Config {
 public:
  Config() = default;
  static Config from_file(const std::filesystem::path& path);
  static Config from_string(const std::string& text);

  /// Overrides one value given as "section.key=value".
  void apply_override(const std::string& assignment);

  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  std::optional<double> get_optional_double(const std::string& section, const std::string& key) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  long long get_long(const std::string& section, const std::string& key, long long fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<int> get_int_list(const std::string& section, const std::string& key,
                                const std::vector<int>& fallback) const;
  bool has(const std::string& section, const std::string& key) const;

  /// Resolved values of every key read so far, in INI form.
  std::string dump() const;

 private:
  std::optional<std::string> raw(const std::string& section, const std::string& key) const;
  void record(const std::string& section, const std::string& key, const std::string& value) const;
  void check_known_keys() const;

  boost::property_tree::ptree tree_;
  mutable boost::property_tree::ptree resolved_;
};

DataSpec data_spec_from(const Config& cfg);
/// Model shape with subnetwork input sizes taken from the data grids; the
/// clip level defaults to the family's output bound.
MnoSpec model_spec_from(const Config& cfg, const DataSpec& data);
TrainConfig train_config_from(const Config& cfg);
EvalBudget eval_budget_from(const Config& cfg);
SweepConfig sweep_config_from(const Config& cfg);
BoundConstants bound_constants_from(const Config& cfg);
BoundInputs bound_inputs_from(const Config& cfg);

}  // namespace mnol
