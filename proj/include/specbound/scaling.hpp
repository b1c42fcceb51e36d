#pragma once

#include "specbound/bounds.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace specbound {

enum class Tier { delta, delta_s, delta_mu };
inline constexpr std::array<Tier, 3> kTiers = {Tier::delta, Tier::delta_s, Tier::delta_mu};
std::string to_string(Tier t);  // "delta_half", "delta_s_half", "delta_mu_half"

struct SeriesPoint {
  double x = 0.0;
  double y = 0.0;
  Tier tier = Tier::delta;
  std::string label;
};

struct FitResult {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
  std::size_t n_points = 0;

  nlohmann::json to_json() const;
};

/// Unweighted least squares of ln y against ln x.
FitResult fit_power_law(const std::vector<SeriesPoint>& points);

/// One bounds report tagged with its fixture label and x value.
struct LabeledReport {
  std::string label;
  double x = 0.0;
  BoundsReport report;
  std::string config_digest;  // settings fingerprint; must agree across a series
};

struct Series {
  std::string method;
  std::array<std::vector<SeriesPoint>, 3> tiers;  // indexed like kTiers, sorted by x
  std::vector<std::string> excluded;              // labels with unconverged reports

  const std::vector<SeriesPoint>& points(Tier t) const { return tiers[static_cast<std::size_t>(t)]; }
};

/// Throws InputError when the reports disagree on method or settings.
Series build_series(const std::vector<LabeledReport>& reports);

/// Columns: x, delta_half, delta_s_half, delta_mu_half, label.
void write_series_csv(std::ostream& out, const Series& series, const std::string& x_name = "x");
Series parse_series_csv(std::istream& in);
/// Per-tier CSV (x, y, label).
void write_tier_csv(std::ostream& out, const Series& series, Tier tier, const std::string& x_name = "x");

/// Points plus fit lines; fits may be empty.
nlohmann::json emit_plotdata(const Series& series, const std::array<std::optional<FitResult>, 3>& fits,
                             const std::string& x_name = "x");

}  // namespace specbound
