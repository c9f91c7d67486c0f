#include "hbf/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace hbf {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(trim(item));
  return parts;
}

json matrix_to_json(const CMatrix& m) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

CMatrix matrix_from_json(const json& j) {
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (static_cast<Eigen::Index>(re.size()) != rows * cols ||
      static_cast<Eigen::Index>(im.size()) != rows * cols)
    throw std::runtime_error("result: matrix payload size mismatch");
  CMatrix m(rows, cols);
  Eigen::Index i = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c, ++i)
      m(r, c) = Complex(re[static_cast<size_t>(i)].get<double>(),
                        im[static_cast<size_t>(i)].get<double>());
  return m;
}

}  // namespace

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_string(buffer.str(), path.string());
}

KeyValueFile KeyValueFile::from_string(const std::string& text, const std::string& origin) {
  KeyValueFile kv;
  kv.origin_ = origin;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                               ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": empty key");
    kv.values_[key] = value;
  }
  return kv;
}

bool KeyValueFile::has(const std::string& key) const { return values_.count(key) > 0; }

std::string KeyValueFile::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end())
    throw std::runtime_error(origin_ + ": missing required key '" + key + "'");
  return it->second;
}

std::string KeyValueFile::get_string(const std::string& key,
                                     const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueFile::get_double(const std::string& key) const {
  const std::string raw = get_string(key);
  try {
    size_t pos = 0;
    const double v = std::stod(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(origin_ + ": key '" + key + "' is not a number: " + raw);
  }
}

double KeyValueFile::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

int KeyValueFile::get_int(const std::string& key) const {
  const double v = get_double(key);
  const int i = static_cast<int>(std::llround(v));
  if (static_cast<double>(i) != v)
    throw std::runtime_error(origin_ + ": key '" + key + "' is not an integer");
  return i;
}

int KeyValueFile::get_int(const std::string& key, int fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string raw = get_string(key);
  if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
  if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
  throw std::runtime_error(origin_ + ": key '" + key + "' is not a boolean: " + raw);
}

std::vector<double> KeyValueFile::get_list(const std::string& key) const {
  const std::string raw = get_string(key);
  std::vector<double> out;
  if (trim(raw).empty()) return out;
  for (const std::string& part : split(raw, ',')) {
    try {
      size_t pos = 0;
      out.push_back(std::stod(part, &pos));
      if (pos != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw std::runtime_error(origin_ + ": key '" + key + "' has a bad list entry: " + part);
    }
  }
  return out;
}

Scenario load_scenario(const std::filesystem::path& path) {
  const KeyValueFile kv = KeyValueFile::load(path);
  Scenario sc;
  sc.n_antennas = kv.get_int("n_antennas");
  sc.n_chains = kv.get_int("n_chains");
  for (double d : kv.get_list("desired_angles_deg")) sc.desired_angles.push_back(deg2rad(d));
  sc.desired_variances = kv.get_list("desired_variances");
  if (kv.has("interferer_angles_deg"))
    for (double d : kv.get_list("interferer_angles_deg"))
      sc.interferer_angles.push_back(deg2rad(d));
  if (kv.has("interferer_variances"))
    sc.interferer_variances = kv.get_list("interferer_variances");
  sc.spacing_ratio = kv.get_double("spacing_ratio", 0.5);
  sc.noise_variance = snr_to_noise(sc.desired_variances, kv.get_double("snr_db"));
  sc.validate();
  return sc;
}

void save_scenario(const Scenario& sc, const std::filesystem::path& path) {
  sc.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scenario file: " + path.string());
  const auto join = [](const std::vector<double>& v, bool degrees) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
      if (i) s += ", ";
      s += format_double(degrees ? rad2deg(v[i]) : v[i]);
    }
    return s;
  };
  double mean = 0.0;
  for (double v : sc.desired_variances) mean += v;
  mean /= static_cast<double>(sc.desired_variances.size());
  const double snr_db = 10.0 * std::log10(mean / sc.noise_variance);
  out << "n_antennas = " << sc.n_antennas << "\n";
  out << "n_chains = " << sc.n_chains << "\n";
  out << "desired_angles_deg = " << join(sc.desired_angles, true) << "\n";
  out << "desired_variances = " << join(sc.desired_variances, false) << "\n";
  out << "interferer_angles_deg = " << join(sc.interferer_angles, true) << "\n";
  out << "interferer_variances = " << join(sc.interferer_variances, false) << "\n";
  out << "snr_db = " << format_double(snr_db) << "\n";
  out << "spacing_ratio = " << format_double(sc.spacing_ratio) << "\n";
}

MismatchParams load_mismatch(const std::filesystem::path& path, int n_chains,
                             int n_antennas) {
  const KeyValueFile kv = KeyValueFile::load(path);
  const auto field = [&](const std::string& key, bool degrees) {
    if (!kv.has(key)) return RMatrix::Zero(n_chains, n_antennas).eval();
    const std::vector<double> raw = kv.get_list(key);
    RMatrix m(n_chains, n_antennas);
    if (raw.size() == 1) {
      m.setConstant(degrees ? deg2rad(raw[0]) : raw[0]);
    } else if (raw.size() == static_cast<size_t>(n_chains) * static_cast<size_t>(n_antennas)) {
      size_t i = 0;
      for (int r = 0; r < n_chains; ++r)
        for (int c = 0; c < n_antennas; ++c, ++i)
          m(r, c) = degrees ? deg2rad(raw[i]) : raw[i];
    } else {
      throw std::runtime_error(path.string() + ": key '" + key + "' must have 1 or " +
                               std::to_string(n_chains * n_antennas) + " values");
    }
    return m;
  };
  MismatchParams p;
  p.i_gain = field("i_gain", false);
  p.i_phase = field("i_phase_deg", true);
  p.q_gain = field("q_gain", false);
  p.q_phase = field("q_phase_deg", true);
  p.out_gain = field("out_gain", false);
  p.out_phase = field("out_phase_deg", true);
  p.validate();
  return p;
}

std::string result_to_json_string(const DesignResult& r) {
  json j;
  j["combiner"] = matrix_to_json(r.combiner);
  j["digital_filter"] = matrix_to_json(r.digital_filter);
  if (r.combiner_labels.size() > 0) j["combiner_labels"] = matrix_to_json(r.combiner_labels);
  j["loss_trace"] = r.loss_trace;
  j["final_ex_mse"] = r.final_ex_mse;
  j["final_int_rej"] = r.final_int_rej;
  j["achieved_sparsity"] = r.achieved_sparsity;
  j["sparsity_weight_used"] = r.sparsity_weight_used;
  j["iterations"] = r.iterations;
  if (r.worst_case_mse) j["worst_case_mse"] = *r.worst_case_mse;
  if (r.nominal_mse) j["nominal_mse"] = *r.nominal_mse;
  return j.dump(2);
}

DesignResult result_from_json_string(const std::string& text) {
  const json j = json::parse(text);
  DesignResult r;
  r.combiner = matrix_from_json(j.at("combiner"));
  r.digital_filter = matrix_from_json(j.at("digital_filter"));
  if (j.contains("combiner_labels")) r.combiner_labels = matrix_from_json(j.at("combiner_labels"));
  r.loss_trace = j.at("loss_trace").get<std::vector<double>>();
  r.final_ex_mse = j.at("final_ex_mse").get<double>();
  r.final_int_rej = j.at("final_int_rej").get<double>();
  r.achieved_sparsity = j.at("achieved_sparsity").get<double>();
  r.sparsity_weight_used = j.at("sparsity_weight_used").get<double>();
  r.iterations = j.at("iterations").get<int>();
  if (j.contains("worst_case_mse")) r.worst_case_mse = j.at("worst_case_mse").get<double>();
  if (j.contains("nominal_mse")) r.nominal_mse = j.at("nominal_mse").get<double>();
  return r;
}

void save_result(const DesignResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write result file: " + path.string());
  out << result_to_json_string(result) << "\n";
}

DesignResult load_result(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open result file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return result_from_json_string(buffer.str());
}

const char* const kSweepCsvHeader =
    "axis_value,variant,mse_analytic,mse_monte_carlo,sparsity,total_bits";

std::string af_csv_header(int n_interferers) {
  std::string h = "angle_deg,chain,variant,af_abs_db";
  for (int m = 1; m <= n_interferers; ++m) h += ",atten_db_" + std::to_string(m);
  return h;
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace hbf
