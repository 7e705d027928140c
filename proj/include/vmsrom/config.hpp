#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vmsrom/closure.hpp"
#include "vmsrom/integrate.hpp"

namespace vmsrom {

// FNV-1a, used for content-addressed stage artifacts.
inline uint64_t fnv1a(const std::string& s, uint64_t seed = 1469598103934665603ull) {
  uint64_t h = seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hash_hex(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat-sectioned key/value text:
//   [section]
//   key = value        # comment
struct IniFile {
  std::map<std::string, std::map<std::string, std::string>> sections;

  static std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  static IniFile parse(std::istream& is) {
    IniFile ini;
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
      ini.sections[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return ini;
  }

  static IniFile parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    return parse(is);
  }

  const std::string* find(const std::string& section, const std::string& key) const {
    auto s = sections.find(section);
    if (s == sections.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second;
  }
};

namespace detail {

inline double parse_double(const std::string& v, const std::string& field) {
  try {
    size_t pos;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return d;
  } catch (...) {
    throw ConfigError(field + ": not a number: '" + v + "'");
  }
}

inline int parse_int(const std::string& v, const std::string& field) {
  try {
    size_t pos;
    int i = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return i;
  } catch (...) {
    throw ConfigError(field + ": not an integer: '" + v + "'");
  }
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = IniFile::trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace detail

struct PipelineConfig {
  // [problem]
  std::string problem_kind = "burgers";  // burgers | external
  double nu = 1e-3;
  int n_cells = 2048;
  double fom_dt = 1e-3;
  double fom_t_end = 1.0;
  std::string snapshot_path;  // external snapshots

  // [pod]
  int r_max = 64;

  // [rom]
  std::vector<int> r_values = {3, 7, 11, 17};
  std::string d_spec = "3r";  // "3r" | "R" | integer
  TargetMode target_mode = TargetMode::NonlinearOnly;
  Integrator integrator = Integrator::CrankNicolson;
  double rom_dt = 1e-3;

  // [regime]
  std::string regime = "reconstructive";  // reconstructive | cross-validation | predictive
  double t1 = 1.0;
  double t2 = 0.7;
  double t3 = 1.0;

  // [sweep]
  std::vector<int> m_grid_2s;              // empty = all 1..rank
  std::vector<double> tol_grid_3s = {1e2, 1e1, 1e0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  std::vector<int> r1_grid;                // empty = all 1..r-1
  std::string select_on = "test";          // test | train

  // [output]
  std::string out_dir = "out";

  void validate() const;
  int resolve_d(int r, int basis_rank) const;

  std::pair<double, double> train_window() const {
    if (regime == "reconstructive") return {0.0, t1};
    return {0.0, t2};
  }
  std::pair<double, double> test_window() const {
    if (regime == "reconstructive") return {0.0, t1};
    if (regime == "cross-validation") return {0.0, t3};
    return {t2, t3};
  }

  // Hash of everything that determines the FOM snapshots.
  std::string problem_hash() const {
    std::ostringstream os;
    os << "kind=" << problem_kind << ";nu=" << nu << ";n_cells=" << n_cells
       << ";dt=" << fom_dt << ";t_end=" << fom_t_end << ";path=" << snapshot_path;
    return hash_hex(fnv1a(os.str()));
  }

  std::string config_hash() const {
    std::ostringstream os;
    os << problem_hash() << ";r_max=" << r_max << ";d=" << d_spec
       << ";mode=" << static_cast<int>(target_mode)
       << ";integ=" << static_cast<int>(integrator) << ";rom_dt=" << rom_dt
       << ";regime=" << regime << ";t1=" << t1 << ";t2=" << t2 << ";t3=" << t3
       << ";select=" << select_on << ";r=";
    for (int r : r_values) os << r << ",";
    os << ";m2s=";
    for (int m : m_grid_2s) os << m << ",";
    os << ";tol3s=";
    for (double t : tol_grid_3s) os << t << ",";
    os << ";r1=";
    for (int r1 : r1_grid) os << r1 << ",";
    return hash_hex(fnv1a(os.str()));
  }

  static PipelineConfig from_ini(const IniFile& ini);
  static PipelineConfig from_file(const std::string& path) {
    return from_ini(IniFile::parse_file(path));
  }
};

inline void PipelineConfig::validate() const {
  if (problem_kind != "burgers" && problem_kind != "external")
    throw ConfigError("problem.kind: must be 'burgers' or 'external'");
  if (problem_kind == "burgers") {
    if (!(nu > 0)) throw ConfigError("problem.nu: must be > 0");
    if (n_cells < 2) throw ConfigError("problem.n_cells: must be >= 2");
    if (!(fom_dt > 0)) throw ConfigError("problem.dt: must be > 0");
    if (!(fom_t_end > 0)) throw ConfigError("problem.t_end: must be > 0");
  } else if (snapshot_path.empty()) {
    throw ConfigError("problem.snapshot_path: required for external problems");
  }
  if (r_max < 1) throw ConfigError("pod.r_max: must be >= 1");
  if (r_values.empty()) throw ConfigError("rom.r: at least one value required");
  for (int r : r_values) {
    if (r < 1) throw ConfigError("rom.r: values must be >= 1");
    if (r > r_max) throw ConfigError("rom.r: value " + std::to_string(r) + " exceeds pod.r_max");
  }
  if (regime != "reconstructive" && regime != "cross-validation" && regime != "predictive")
    throw ConfigError("regime.kind: must be reconstructive, cross-validation, or predictive");
  if (regime != "reconstructive" && !(t2 < t3))
    throw ConfigError("regime: need t2 < t3");
  if (!(rom_dt > 0)) throw ConfigError("rom.dt: must be > 0");
  if (select_on != "test" && select_on != "train")
    throw ConfigError("sweep.select_on: must be 'test' or 'train'");
  if (d_spec != "3r" && d_spec != "R") {
    int d = detail::parse_int(d_spec, "rom.d");
    if (d < 1) throw ConfigError("rom.d: must be >= 1");
  }
}

inline int PipelineConfig::resolve_d(int r, int basis_rank) const {
  int d;
  if (d_spec == "3r")
    d = std::min(3 * r, basis_rank);
  else if (d_spec == "R")
    d = basis_rank;
  else
    d = std::min(detail::parse_int(d_spec, "rom.d"), basis_rank);
  return std::max(d, r);
}

inline PipelineConfig PipelineConfig::from_ini(const IniFile& ini) {
  PipelineConfig cfg;
  auto get = [&](const char* sec, const char* key) { return ini.find(sec, key); };

  if (auto* v = get("problem", "kind")) cfg.problem_kind = *v;
  if (auto* v = get("problem", "nu")) cfg.nu = detail::parse_double(*v, "problem.nu");
  if (auto* v = get("problem", "n_cells")) cfg.n_cells = detail::parse_int(*v, "problem.n_cells");
  if (auto* v = get("problem", "dt")) cfg.fom_dt = detail::parse_double(*v, "problem.dt");
  if (auto* v = get("problem", "t_end")) cfg.fom_t_end = detail::parse_double(*v, "problem.t_end");
  if (auto* v = get("problem", "snapshot_path")) cfg.snapshot_path = *v;

  if (auto* v = get("pod", "r_max")) cfg.r_max = detail::parse_int(*v, "pod.r_max");

  if (auto* v = get("rom", "r")) {
    cfg.r_values.clear();
    for (const auto& item : detail::split_list(*v))
      cfg.r_values.push_back(detail::parse_int(item, "rom.r"));
  }
  if (auto* v = get("rom", "d")) cfg.d_spec = *v;
  if (auto* v = get("rom", "target_mode")) {
    if (*v == "nonlinear")
      cfg.target_mode = TargetMode::NonlinearOnly;
    else if (*v == "full")
      cfg.target_mode = TargetMode::FullRhs;
    else
      throw ConfigError("rom.target_mode: must be 'nonlinear' or 'full'");
  }
  if (auto* v = get("rom", "integrator")) {
    if (*v == "cn")
      cfg.integrator = Integrator::CrankNicolson;
    else if (*v == "rk4")
      cfg.integrator = Integrator::Rk4;
    else
      throw ConfigError("rom.integrator: must be 'cn' or 'rk4'");
  }
  if (auto* v = get("rom", "dt")) cfg.rom_dt = detail::parse_double(*v, "rom.dt");

  if (auto* v = get("regime", "kind")) cfg.regime = *v;
  if (auto* v = get("regime", "t1")) cfg.t1 = detail::parse_double(*v, "regime.t1");
  if (auto* v = get("regime", "t2")) cfg.t2 = detail::parse_double(*v, "regime.t2");
  if (auto* v = get("regime", "t3")) cfg.t3 = detail::parse_double(*v, "regime.t3");

  if (auto* v = get("sweep", "two_scale"); v && *v != "all") {
    for (const auto& item : detail::split_list(*v))
      cfg.m_grid_2s.push_back(detail::parse_int(item, "sweep.two_scale"));
  }
  if (auto* v = get("sweep", "three_scale_tol")) {
    cfg.tol_grid_3s.clear();
    for (const auto& item : detail::split_list(*v))
      cfg.tol_grid_3s.push_back(detail::parse_double(item, "sweep.three_scale_tol"));
  }
  if (auto* v = get("sweep", "r1"); v && *v != "all") {
    for (const auto& item : detail::split_list(*v))
      cfg.r1_grid.push_back(detail::parse_int(item, "sweep.r1"));
  }
  if (auto* v = get("sweep", "select_on")) cfg.select_on = *v;

  if (auto* v = get("output", "dir")) cfg.out_dir = *v;

  cfg.validate();
  return cfg;
}

}  // namespace vmsrom
