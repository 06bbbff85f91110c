#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace lowreg {

// Flat run configuration: `key = value` lines, `#` comments, blank lines ignored.
// Every key has a default; unknown keys are rejected.
class RunConfig {
 public:
  static RunConfig defaults();
  static RunConfig parse(std::istream& in, std::string_view source = "<config>");
  static RunConfig load(const std::filesystem::path& path);

  bool has(std::string_view key) const;
  void set(std::string_view key, std::string_view value);
  // Applies `key=value`.
  void apply_override(std::string_view assignment);

  const std::string& get(std::string_view key) const;
  double get_double(std::string_view key) const;
  long long get_int(std::string_view key) const;
  std::uint64_t get_uint(std::string_view key) const;
  bool get_bool(std::string_view key) const;
  std::vector<long long> get_int_list(std::string_view key) const;
  std::vector<double> get_double_list(std::string_view key) const;

  // Canonical echo: one `key = value` line per entry in key order, each prefixed.
  std::string echo(std::string_view prefix = "# ") const;

  const std::map<std::string, std::string, std::less<>>& entries() const noexcept { return entries_; }

 private:
  std::map<std::string, std::string, std::less<>> entries_;
};

}  // namespace lowreg
