#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hbf/design.hpp"
#include "hbf/scenario.hpp"
#include "hbf/vm_constellation.hpp"

namespace hbf {

// Flat key = value files; '#' starts a comment, lists are comma-separated.
class KeyValueFile {
 public:
  static KeyValueFile load(const std::filesystem::path& path);
  static KeyValueFile from_string(const std::string& text, const std::string& origin);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::string origin_;
  std::map<std::string, std::string> values_;
};

// Scenario files carry angles in degrees and the noise level as snr_db.
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

// Mismatch files: keys i_gain, i_phase_deg, q_gain, q_phase_deg, out_gain,
// out_phase_deg; each value is either one number (broadcast to every VM) or
// n_chains * n_antennas numbers in row-major order.
MismatchParams load_mismatch(const std::filesystem::path& path, int n_chains,
                             int n_antennas);

std::string result_to_json_string(const DesignResult& result);
DesignResult result_from_json_string(const std::string& text);
void save_result(const DesignResult& result, const std::filesystem::path& path);
DesignResult load_result(const std::filesystem::path& path);

// Pinned CSV headers.
extern const char* const kSweepCsvHeader;  // axis_value,variant,...
std::string af_csv_header(int n_interferers);

// Doubles formatted with round-trip precision for CSV cells.
std::string format_double(double value);

}  // namespace hbf
