#pragma once

#include "specbound/bounds.hpp"
#include "specbound/io.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace specbound {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUnconverged = 2;

std::string version();

struct RunConfig {
  std::string command;
  std::filesystem::path input;
  InputFormat format = InputFormat::fcidump;
  std::optional<Method> method;             // hf when unset (scaling: manifest may set it)
  std::optional<SymmetrySector> sector;     // target; else the file's default, else half filling
  std::string sectors = "canonical";        // scan: all | canonical | "a,b;c,d;..."
  OptimizerSettings optimizer;
  std::size_t fci_cap = kDefaultFciCap;
  int jobs = 0;
  std::filesystem::path out_dir = ".";
  std::filesystem::path manifest;           // scaling
  bool incoherent = true;                   // bounds: also compute the incoherent tiers
  bool trace = false;                       // write per-sector optimizer traces
  bool stable_output = false;               // omit the timestamp

  void validate() const;
  ScanSettings scan_settings() const;
  nlohmann::json to_json() const;
};

/// "all", "canonical" or a ';'-separated list of "a,b" sectors.
std::vector<SymmetrySector> resolve_sectors(const std::string& spec, std::size_t n_orb);

/// Each command writes its outputs under config.out_dir and logs to `log`.
/// Returns kExitOk, kExitUnconverged or kExitError; errors are reported, not thrown.
int cmd_bounds(const RunConfig& config, std::ostream& log);
int cmd_scan(const RunConfig& config, std::ostream& log);
int cmd_validate(const RunConfig& config, std::ostream& log);
int cmd_scaling(const RunConfig& config, std::ostream& log);

/// Output file stem: the input file name up to its first '.'.
std::string input_stem(const std::filesystem::path& path);

}  // namespace specbound
