#include "specbound/bounds.hpp"
#include "specbound/majorana.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace specbound {

namespace {

nlohmann::json sector_json(const SymmetrySector& s) { return {s.n_alpha, s.n_beta}; }

nlohmann::json sector_list(const std::vector<SymmetrySector>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : v) out.push_back(sector_json(s));
  return out;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct TableTiers {
  Tiers tiers;
  SymmetrySector argmax_e_max;
  SymmetrySector argmin_e_min;
  SymmetrySector argmax_delta_s;
};

// Canonical sectors are visited in ascending order and only a strictly better
// value (beyond the tie tolerance) moves an argmax, so ties resolve to the
// lexicographically smaller sector.
TableTiers tiers_of(const SectorSpectrumTable& table, const SymmetrySector& target) {
  std::vector<std::string> missing;
  for (const auto& s : canonical_sectors(table.n_orb))
    if (!table.find(s)) missing.push_back("(" + s.label() + ")");
  if (!missing.empty()) {
    std::string msg = "sector table is missing " + std::to_string(missing.size()) + " canonical sector(s):";
    for (const auto& m : missing) msg += " " + m;
    throw InputError(msg);
  }
  const SectorEntry* t = table.find(target);
  if (!t) throw InputError("sector table does not contain the target sector (" + target.label() + ")");

  TableTiers out;
  bool first = true;
  double e_max = 0.0;
  double e_min = 0.0;
  double best_half = 0.0;
  for (const auto& s : canonical_sectors(table.n_orb)) {
    const SectorEntry& e = *table.find(s);
    if (first || e.e_max > e_max + kTieTolerance) {
      e_max = e.e_max;
      out.argmax_e_max = s;
    }
    if (first || e.e_min < e_min - kTieTolerance) {
      e_min = e.e_min;
      out.argmin_e_min = s;
    }
    if (first || e.half_range() > best_half + kTieTolerance) {
      best_half = e.half_range();
      out.argmax_delta_s = s;
    }
    first = false;
  }
  out.tiers.delta_half = 0.5 * (e_max - e_min);
  out.tiers.delta_s_half = best_half;
  out.tiers.delta_mu_half = t->half_range();
  return out;
}

Tiers add(const Tiers& a, const Tiers& b) {
  return {a.delta_half + b.delta_half, a.delta_s_half + b.delta_s_half, a.delta_mu_half + b.delta_mu_half};
}

void check_hierarchy(const Tiers& t, const std::string& what, double tol, std::vector<std::string>& out) {
  if (t.delta_mu_half > t.delta_s_half + tol)
    out.push_back(what + ": delta_mu_half " + format_number(t.delta_mu_half) + " exceeds delta_s_half " +
                  format_number(t.delta_s_half));
  if (t.delta_s_half > t.delta_half + tol)
    out.push_back(what + ": delta_s_half " + format_number(t.delta_s_half) + " exceeds delta_half " +
                  format_number(t.delta_half));
}

}  // namespace

nlohmann::json Tiers::to_json() const {
  return {{"delta_half", delta_half}, {"delta_s_half", delta_s_half}, {"delta_mu_half", delta_mu_half}};
}

nlohmann::json IncoherentBounds::to_json() const {
  return {{"one_body", one_body.to_json()},
          {"two_body", two_body.to_json()},
          {"total", total.to_json()},
          {"one_body_method", one_body_method},
          {"two_body_method", two_body_method},
          {"df_bound_target", df_bound_target},
          {"df_bound_max", df_bound_max},
          {"df_truncation_tol", df_truncation_tol},
          {"df_reconstruction_error", df_reconstruction_error},
          {"df_leaves", df_leaves},
          {"unconverged", sector_list(unconverged)}};
}

BoundsReport assemble_bounds(const SectorSpectrumTable& table, const SymmetrySector& target) {
  const TableTiers t = tiers_of(table, target);
  BoundsReport r;
  r.method = table.method;
  r.n_orb = table.n_orb;
  r.target = target;
  r.coherent = t.tiers;
  r.argmax_e_max = t.argmax_e_max;
  r.argmin_e_min = t.argmin_e_min;
  r.argmax_delta_s = t.argmax_delta_s;
  for (const auto& e : table.entries) r.delta_mu_half[e.sector] = e.half_range();
  r.unconverged = table.unconverged();
  for (const auto& s : r.unconverged) r.warnings.push_back("sector (" + s.label() + ") did not converge");
  return r;
}

IncoherentBounds incoherent_bounds(const SpinFreeHamiltonian& ham, const ScanSettings& settings,
                                   const SymmetrySector& target, double df_tol, SectorSpectrumTable* two_body_table) {
  const MajoranaSplit split = majorana_split(ham);
  IncoherentBounds out;
  out.one_body = tiers_of(one_body_table(split.kappa, split.one_body.e_const), target).tiers;

  SectorSpectrumTable two = scan_sectors(split.two_body, settings);
  out.two_body = tiers_of(two, target).tiers;
  out.two_body_method = two.method;
  out.unconverged = two.unconverged();
  out.total = add(out.one_body, out.two_body);

  const DoubleFactorization df = double_factorize(split.two_body.g, df_tol);
  out.df_truncation_tol = df_tol;
  out.df_reconstruction_error = df.reconstruction_error;
  out.df_leaves = df.leaves.size();
  out.df_bound_target = two_body_df_sector_bound(df, target);
  for (const auto& s : canonical_sectors(ham.n_orb))
    out.df_bound_max = std::max(out.df_bound_max, two_body_df_sector_bound(df, s));
  if (two_body_table) *two_body_table = std::move(two);
  return out;
}

std::vector<std::string> BoundsReport::check_invariants(double tol) const {
  std::vector<std::string> out;
  check_hierarchy(coherent, "coherent", tol, out);
  for (const auto& [s, v] : delta_mu_half) {
    if (v < -tol) out.push_back("coherent: sector (" + s.label() + ") has e_min above e_max");
    if (v > coherent.delta_s_half + tol)
      out.push_back("coherent: sector (" + s.label() + ") half-range " + format_number(v) + " exceeds delta_s_half " +
                    format_number(coherent.delta_s_half));
  }
  if (incoherent) {
    check_hierarchy(incoherent->one_body, "one_body", tol, out);
    check_hierarchy(incoherent->two_body, "two_body", tol, out);
    const Tiers& c = coherent;
    const Tiers& i = incoherent->total;
    auto weyl = [&](const char* name, double coh, double inc) {
      if (coh > inc + tol)
        out.push_back(std::string("weyl: coherent ") + name + " " + format_number(coh) + " exceeds incoherent " +
                      format_number(inc));
    };
    weyl("delta_half", c.delta_half, i.delta_half);
    weyl("delta_s_half", c.delta_s_half, i.delta_s_half);
    weyl("delta_mu_half", c.delta_mu_half, i.delta_mu_half);
  }
  return out;
}

nlohmann::json BoundsReport::to_json() const {
  nlohmann::json per_sector = nlohmann::json::object();
  for (const auto& [s, v] : delta_mu_half) per_sector[s.label()] = v;
  nlohmann::json doc = {{"method", method},
                        {"n_orb", n_orb},
                        {"target_sector", sector_json(target)},
                        {"delta_half", coherent.delta_half},
                        {"delta_s_half", coherent.delta_s_half},
                        {"delta_mu_half", per_sector},
                        {"delta_mu_half_target", coherent.delta_mu_half},
                        {"coherent", coherent.to_json()},
                        {"argmax",
                         {{"e_max_sector", sector_json(argmax_e_max)},
                          {"e_min_sector", sector_json(argmin_e_min)},
                          {"delta_s_sector", sector_json(argmax_delta_s)},
                          {"tie_tolerance", kTieTolerance}}},
                        {"unconverged", sector_list(unconverged)},
                        {"warnings", warnings}};
  doc["incoherent"] = incoherent ? incoherent->to_json() : nlohmann::json(nullptr);
  return doc;
}

std::string BoundsReport::table_csv() const {
  std::ostringstream out;
  out << "tier,one_body,two_body,incoherent_total,coherent_total\n";
  auto row = [&](const char* name, double coh, auto pick) {
    out << name << ',';
    if (incoherent)
      out << format_number(pick(incoherent->one_body)) << ',' << format_number(pick(incoherent->two_body)) << ','
          << format_number(pick(incoherent->total));
    else
      out << ",,";
    out << ',' << format_number(coh) << '\n';
  };
  row("delta_half", coherent.delta_half, [](const Tiers& t) { return t.delta_half; });
  row("delta_s_half", coherent.delta_s_half, [](const Tiers& t) { return t.delta_s_half; });
  row("delta_mu_half", coherent.delta_mu_half, [](const Tiers& t) { return t.delta_mu_half; });
  return out.str();
}

nlohmann::json round_numbers(const nlohmann::json& doc, int digits) {
  if (doc.is_number_float()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, doc.get<double>());
    return std::strtod(buf, nullptr);
  }
  if (doc.is_array() || doc.is_object()) {
    nlohmann::json out = doc;
    for (auto it = out.begin(); it != out.end(); ++it) *it = round_numbers(*it, digits);
    return out;
  }
  return doc;
}

}  // namespace specbound
