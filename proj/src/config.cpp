#include "lowreg/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace lowreg {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

[[noreturn]] void bad_value(std::string_view key, const std::string& value, const char* what) {
  throw std::invalid_argument("config key '" + std::string(key) + "': cannot read '" + value + "' as " + what);
}

}  // namespace

RunConfig RunConfig::defaults() {
  RunConfig c;
  c.entries_ = {
      {"scheme", "nls-low"},
      {"reference", "auto"},
      {"dim", "1"},
      {"modes", "32"},
      {"lambda", "-1"},
      {"nonlinear", "true"},
      {"stochastic", "true"},
      {"sigma_phi", "auto"},
      {"phi_amplitude", "1"},
      {"gamma", "0"},
      {"manakov_coupling", "vector"},
      {"horizon", "1"},
      {"steps", "16,32,64,128,256,512"},
      {"n_fine", "4096"},
      {"path_substeps", "4"},
      {"samples", "64"},
      {"seed", "20240917"},
      {"threads", "0"},
      {"error_s", "auto"},
      {"error_p", "2"},
      {"data", "random-phase"},
      {"data_regularity", "1"},
      {"data_margin", "0.1"},
      {"data_amplitude", "1"},
      {"data_seed", "7"},
      {"plane_wave_mode", "1"},
      {"simulate_steps", "128"},
      {"noise_source", "path"},
      {"record_spectra", "false"},
      {"tree_order", "3/2"},
      {"probe_frequencies", "1,2,3,1"},
      {"probe_exponents", "4,5,6,7,8,9"},
      {"probe_k3", "2,4,8"},
      {"probe_quadrature", "512"},
      {"probe_samples", "400"},
      {"probe_order", "2"},
      {"check_samples", "10000"},
      {"check_step", "0.0625"},
      {"check_substeps", "256"},
      {"check_ladder", "32,64,128,256"},
      {"stability_deltas", "1e-2,1e-4,1e-6"},
      {"stability_steps", "64"},
  };
  return c;
}

RunConfig RunConfig::parse(std::istream& in, std::string_view source) {
  RunConfig c = defaults();
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(std::string(source) + ":" + std::to_string(number) + ": expected key = value");
    try {
      c.set(trim(std::string_view(body).substr(0, eq)), trim(std::string_view(body).substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string(source) + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path.string() + "'");
  return parse(in, path.string());
}

bool RunConfig::has(std::string_view key) const { return entries_.find(key) != entries_.end(); }

void RunConfig::set(std::string_view key, std::string_view value) {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
  it->second = trim(value);
}

void RunConfig::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw std::invalid_argument("override '" + std::string(assignment) + "' is not key=value");
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

const std::string& RunConfig::get(std::string_view key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
  return it->second;
}

double RunConfig::get_double(std::string_view key) const {
  const auto& v = get(key);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "a number");
  return out;
}

long long RunConfig::get_int(std::string_view key) const {
  const auto& v = get(key);
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "an integer");
  return out;
}

std::uint64_t RunConfig::get_uint(std::string_view key) const {
  const auto& v = get(key);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "an unsigned integer");
  return out;
}

bool RunConfig::get_bool(std::string_view key) const {
  const auto& v = get(key);
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  bad_value(key, v, "a boolean");
}

std::vector<long long> RunConfig::get_int_list(std::string_view key) const {
  std::vector<long long> out;
  for (const auto& item : split_list(get(key))) {
    long long x = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), x);
    if (ec != std::errc() || ptr != item.data() + item.size()) bad_value(key, item, "an integer");
    out.push_back(x);
  }
  return out;
}

std::vector<double> RunConfig::get_double_list(std::string_view key) const {
  std::vector<double> out;
  for (const auto& item : split_list(get(key))) {
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), x);
    if (ec != std::errc() || ptr != item.data() + item.size()) bad_value(key, item, "a number");
    out.push_back(x);
  }
  return out;
}

std::string RunConfig::echo(std::string_view prefix) const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    out += prefix;
    out += k + " = " + v + "\n";
  }
  return out;
}

}  // namespace lowreg
