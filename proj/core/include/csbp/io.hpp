#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace csbp::io {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// key = value lines grouped in [section]s; '#' and ';' start comments.
// Keys are addressed as "section.key"; a bare key means "experiment.key".
class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<config>");
  static Config load(const std::string& path);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // "a:b:step" range (inclusive) or a comma separated list.
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

  // Throws on keys outside `known` (entries are "section.key").
  void require_known(const std::set<std::string>& known) const;
  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  static std::string full_key(const std::string& key);
  const std::string* find(const std::string& key) const;

  std::map<std::string, std::string> kv_;
  std::string origin_;
};

// Shortest text that reads back to the same double.
std::string fmt(double x);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);
  void row(const std::vector<double>& cells);

 private:
  std::ofstream out_;
  std::size_t width_;
};

struct Series {
  std::string name;
  std::vector<double> x, y;
};

// Minimal line plot; log_y plots log10 of positive values.
void write_svg(const std::string& path, const std::string& title, const std::string& xlabel,
               const std::string& ylabel, const std::vector<Series>& series, bool log_y = false);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);
void ensure_dir(const std::string& dir);
std::string join_path(const std::string& dir, const std::string& file);

}  // namespace csbp::io
