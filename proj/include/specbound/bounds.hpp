#pragma once

#include "specbound/fci.hpp"
#include "specbound/hamiltonian.hpp"
#include "specbound/orbital.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace specbound {

enum class Method { hf, fci };
std::string to_string(Method m);
Method parse_method(const std::string& text);

/// (N+1)(N+2)/2, the number of canonical (n_alpha >= n_beta) sectors.
std::size_t sector_count(std::size_t n_orb);
std::vector<SymmetrySector> canonical_sectors(std::size_t n_orb);
/// Every (n_alpha, n_beta) pair, mirrors included.
std::vector<SymmetrySector> all_sectors(std::size_t n_orb);

struct SectorEntry {
  SymmetrySector sector;
  double e_min = 0.0;
  double e_max = 0.0;
  std::string method;  // "hf", "fci" or "exact1body"
  bool converged_min = true;
  bool converged_max = true;
  nlohmann::json detail;  // solver metadata

  bool converged() const noexcept { return converged_min && converged_max; }
  double half_range() const noexcept { return 0.5 * (e_max - e_min); }
  nlohmann::json to_json() const;
};

struct SectorSpectrumTable {
  std::size_t n_orb = 0;
  std::string hamiltonian_id;  // sha256 of the source, or a label
  std::string method;
  std::vector<SectorEntry> entries;  // ascending by sector

  /// Exact match first, then the mirrored sector.
  const SectorEntry* find(const SymmetrySector& s) const;
  std::vector<SymmetrySector> unconverged() const;
  nlohmann::json to_json() const;
};

struct ScanSettings {
  Method method = Method::hf;
  OptimizerSettings optimizer;
  FciOptions fci;
  int jobs = 0;  // 0: OpenMP default
  /// Optional optimizer trace per (sector, kind); called from worker threads.
  std::function<TraceFn(const SymmetrySector&, ExtremumKind)> trace_factory;
};

/// One entry per requested sector (canonical sectors when the list is empty).
/// Sectors are the parallel unit; results do not depend on scheduling.
SectorSpectrumTable scan_sectors(const SpinFreeHamiltonian& ham, const ScanSettings& settings,
                                 const std::vector<SymmetrySector>& sectors = {});

/// Closed-form extremes of sum_pq kappa_pq E_pq + c in every canonical sector.
SectorSpectrumTable one_body_table(const Eigen::MatrixXd& kappa, double constant);

struct Tiers {
  double delta_half = 0.0;
  double delta_s_half = 0.0;
  double delta_mu_half = 0.0;
  nlohmann::json to_json() const;
};

struct IncoherentBounds {
  Tiers one_body;
  Tiers two_body;
  Tiers total;
  std::string one_body_method = "exact1body";
  std::string two_body_method;
  double df_bound_target = 0.0;      // 1/4 sum_t ||v_t||_mu^2 in the target sector
  double df_bound_max = 0.0;         // largest over canonical sectors
  double df_truncation_tol = 0.0;
  double df_reconstruction_error = 0.0;
  std::size_t df_leaves = 0;
  std::vector<SymmetrySector> unconverged;  // of the two-body scan

  nlohmann::json to_json() const;
};

struct BoundsReport {
  std::string method;
  std::size_t n_orb = 0;
  SymmetrySector target;
  Tiers coherent;
  std::map<SymmetrySector, double> delta_mu_half;  // every sector in the table
  SymmetrySector argmax_e_max;   // sector realizing max E_max
  SymmetrySector argmin_e_min;   // sector realizing min E_min
  SymmetrySector argmax_delta_s;
  std::optional<IncoherentBounds> incoherent;
  std::vector<SymmetrySector> unconverged;
  std::vector<std::string> warnings;

  /// Hierarchy and Weyl inequalities; one message per violation beyond tol.
  std::vector<std::string> check_invariants(double tol = 1e-10) const;
  nlohmann::json to_json() const;
  /// Rows delta/delta_s/delta_mu; columns 1-body, 2-body, incoherent and coherent totals.
  std::string table_csv() const;
};

/// Values within this of each other count as ties; ties go to the smaller sector.
inline constexpr double kTieTolerance = 1e-10;

/// The table must cover every canonical sector (directly or through its mirror).
BoundsReport assemble_bounds(const SectorSpectrumTable& table, const SymmetrySector& target);

/// Tier values of the 1-body part (exact) and the 2-body part (scanned with
/// settings.method); the 2-body table is returned through two_body_table if given.
IncoherentBounds incoherent_bounds(const SpinFreeHamiltonian& ham, const ScanSettings& settings,
                                   const SymmetrySector& target, double df_tol = 1e-10,
                                   SectorSpectrumTable* two_body_table = nullptr);

/// Closest sector to half filling of n_orb orbitals with n_alpha >= n_beta.
SymmetrySector half_filling(std::size_t n_orb);

/// Rounds every floating-point value to 12 significant digits.
nlohmann::json round_numbers(const nlohmann::json& doc, int digits = 12);

}  // namespace specbound
