#include "specbound/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace specbound {

namespace {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double tier_value(const BoundsReport& r, Tier t) {
  switch (t) {
    case Tier::delta: return r.coherent.delta_half;
    case Tier::delta_s: return r.coherent.delta_s_half;
    case Tier::delta_mu: return r.coherent.delta_mu_half;
  }
  return 0.0;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string to_string(Tier t) {
  switch (t) {
    case Tier::delta: return "delta_half";
    case Tier::delta_s: return "delta_s_half";
    case Tier::delta_mu: return "delta_mu_half";
  }
  return "";
}

nlohmann::json FitResult::to_json() const {
  return {{"exponent", exponent}, {"prefactor", prefactor}, {"r_squared", r_squared}, {"n_points", n_points}};
}

FitResult fit_power_law(const std::vector<SeriesPoint>& points) {
  if (points.size() < 2) throw InputError("power-law fit needs at least 2 points");
  const auto m = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd a(m, 2);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& p = points[static_cast<std::size_t>(i)];
    if (!(p.x > 0.0) || !(p.y > 0.0))
      throw InputError("power-law fit needs positive values (point '" + p.label + "' has x=" + format_number(p.x) +
                       ", y=" + format_number(p.y) + ")");
    a(i, 0) = std::log(p.x);
    a(i, 1) = 1.0;
    b(i) = std::log(p.y);
  }
  if (a.col(0).maxCoeff() - a.col(0).minCoeff() == 0.0) throw InputError("power-law fit needs distinct x values");
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
  const Eigen::VectorXd resid = b - a * coef;
  const double ss_res = resid.squaredNorm();
  const double ss_tot = (b.array() - b.mean()).matrix().squaredNorm();
  FitResult f;
  f.exponent = coef(0);
  f.prefactor = std::exp(coef(1));
  f.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  f.n_points = points.size();
  return f;
}

Series build_series(const std::vector<LabeledReport>& reports) {
  Series s;
  if (!reports.empty()) s.method = reports.front().report.method;
  for (const auto& r : reports) {
    if (r.report.method != s.method)
      throw InputError("series mixes methods: '" + s.method + "' and '" + r.report.method + "' (" + r.label + ")");
    if (r.config_digest != reports.front().config_digest)
      throw InputError("series mixes settings: report '" + r.label + "' differs from '" + reports.front().label + "'");
    if (!r.report.unconverged.empty()) {
      s.excluded.push_back(r.label);
      continue;
    }
    for (const Tier t : kTiers)
      s.tiers[static_cast<std::size_t>(t)].push_back({r.x, tier_value(r.report, t), t, r.label});
  }
  for (auto& pts : s.tiers)
    std::stable_sort(pts.begin(), pts.end(), [](const SeriesPoint& a, const SeriesPoint& b) { return a.x < b.x; });
  return s;
}

void write_series_csv(std::ostream& out, const Series& series, const std::string& x_name) {
  out << x_name << ",delta_half,delta_s_half,delta_mu_half,label\n";
  const auto& d = series.points(Tier::delta);
  const auto& ds = series.points(Tier::delta_s);
  const auto& dm = series.points(Tier::delta_mu);
  for (std::size_t i = 0; i < d.size(); ++i)
    out << format_number(d[i].x) << ',' << format_number(d[i].y) << ',' << format_number(ds[i].y) << ','
        << format_number(dm[i].y) << ',' << d[i].label << '\n';
}

Series parse_series_csv(std::istream& in) {
  Series s;
  std::string line;
  if (!std::getline(in, line)) throw InputError("series CSV is empty");
  if (split_csv_line(line).size() != 5) throw InputError("series CSV header must have 5 columns");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 5) throw InputError("series CSV line " + std::to_string(line_no) + ": expected 5 columns");
    try {
      const double x = std::stod(cells[0]);
      for (const Tier t : kTiers)
        s.tiers[static_cast<std::size_t>(t)].push_back(
            {x, std::stod(cells[1 + static_cast<std::size_t>(t)]), t, cells[4]});
    } catch (const std::logic_error&) {
      throw InputError("series CSV line " + std::to_string(line_no) + ": malformed number");
    }
  }
  return s;
}

void write_tier_csv(std::ostream& out, const Series& series, Tier tier, const std::string& x_name) {
  out << x_name << ',' << to_string(tier) << ",label\n";
  for (const auto& p : series.points(tier)) out << format_number(p.x) << ',' << format_number(p.y) << ',' << p.label << '\n';
}

nlohmann::json emit_plotdata(const Series& series, const std::array<std::optional<FitResult>, 3>& fits,
                             const std::string& x_name) {
  nlohmann::json tiers = nlohmann::json::object();
  for (const Tier t : kTiers) {
    const auto i = static_cast<std::size_t>(t);
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : series.tiers[i]) pts.push_back({{"x", p.x}, {"y", p.y}, {"label", p.label}});
    nlohmann::json entry = {{"points", pts}};
    if (fits[i]) {
      entry["fit"] = fits[i]->to_json();
      nlohmann::json line = nlohmann::json::array();
      for (const auto& p : series.tiers[i])
        line.push_back({{"x", p.x}, {"y", fits[i]->prefactor * std::pow(p.x, fits[i]->exponent)}});
      entry["fit_line"] = line;
    }
    tiers[to_string(t)] = entry;
  }
  return {{"x_name", x_name}, {"method", series.method}, {"excluded", series.excluded}, {"tiers", tiers}};
}

}  // namespace specbound
