#include "specbound/bounds.hpp"
#include "specbound/majorana.hpp"

#include <omp.h>

#include <algorithm>
#include <exception>

namespace specbound {

std::string to_string(Method m) { return m == Method::hf ? "hf" : "fci"; }

Method parse_method(const std::string& text) {
  if (text == "hf") return Method::hf;
  if (text == "fci") return Method::fci;
  throw InputError("unknown method '" + text + "' (expected hf or fci)");
}

std::size_t sector_count(std::size_t n_orb) { return (n_orb + 1) * (n_orb + 2) / 2; }

std::vector<SymmetrySector> canonical_sectors(std::size_t n_orb) {
  std::vector<SymmetrySector> out;
  out.reserve(sector_count(n_orb));
  const int n = static_cast<int>(n_orb);
  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= a; ++b) out.push_back({a, b});
  return out;
}

std::vector<SymmetrySector> all_sectors(std::size_t n_orb) {
  std::vector<SymmetrySector> out;
  const int n = static_cast<int>(n_orb);
  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= n; ++b) out.push_back({a, b});
  return out;
}

SymmetrySector half_filling(std::size_t n_orb) {
  const int n = static_cast<int>(n_orb);
  return {n - n / 2, n / 2};
}

nlohmann::json SectorEntry::to_json() const {
  return {{"sector", {sector.n_alpha, sector.n_beta}},
          {"e_min", e_min},
          {"e_max", e_max},
          {"half_range", half_range()},
          {"method", method},
          {"converged_min", converged_min},
          {"converged_max", converged_max},
          {"detail", detail}};
}

const SectorEntry* SectorSpectrumTable::find(const SymmetrySector& s) const {
  auto lookup = [this](const SymmetrySector& key) -> const SectorEntry* {
    const auto it = std::lower_bound(entries.begin(), entries.end(), key,
                                     [](const SectorEntry& e, const SymmetrySector& k) { return e.sector < k; });
    return it != entries.end() && it->sector == key ? &*it : nullptr;
  };
  if (const auto* e = lookup(s)) return e;
  return lookup(s.mirrored());
}

std::vector<SymmetrySector> SectorSpectrumTable::unconverged() const {
  std::vector<SymmetrySector> out;
  for (const auto& e : entries)
    if (!e.converged()) out.push_back(e.sector);
  return out;
}

nlohmann::json SectorSpectrumTable::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : entries) rows.push_back(e.to_json());
  return {{"n_orb", n_orb}, {"hamiltonian_id", hamiltonian_id}, {"method", method}, {"entries", rows}};
}

namespace {

SectorEntry hf_entry(const SpinFreeHamiltonian& ham, const SymmetrySector& s, const ScanSettings& settings) {
  const auto& opt = settings.optimizer;
  auto trace = [&](ExtremumKind kind) { return settings.trace_factory ? settings.trace_factory(s, kind) : TraceFn{}; };
  const auto lo = minimize_sector(ham, s, opt, trace(ExtremumKind::min));
  const auto hi = maximize_sector(ham, s, opt, trace(ExtremumKind::max));
  SectorEntry e;
  e.sector = s;
  e.e_min = lo.energy;
  e.e_max = hi.energy;
  e.method = "hf";
  e.converged_min = lo.converged;
  e.converged_max = hi.converged;
  e.detail = {{"grad_norm_min", lo.grad_norm},
              {"grad_norm_max", hi.grad_norm},
              {"iterations_min", lo.iterations},
              {"iterations_max", hi.iterations},
              {"restarts_used", lo.restarts_used}};
  return e;
}

SectorEntry fci_entry(const SpinFreeHamiltonian& ham, const SymmetrySector& s, const FciOptions& opt) {
  const auto r = extremal_eigenvalues(ham, s, opt);
  SectorEntry e;
  e.sector = s;
  e.e_min = r.e_min;
  e.e_max = r.e_max;
  e.method = "fci";
  e.converged_min = e.converged_max = r.converged;
  e.detail = {{"solver", r.method},
              {"dim", r.dim},
              {"iterations", r.iterations},
              {"residual_min", r.residual_min},
              {"residual_max", r.residual_max}};
  return e;
}

}  // namespace

SectorSpectrumTable scan_sectors(const SpinFreeHamiltonian& ham, const ScanSettings& settings,
                                 const std::vector<SymmetrySector>& sectors) {
  std::vector<SymmetrySector> todo = sectors.empty() ? canonical_sectors(ham.n_orb) : sectors;
  std::sort(todo.begin(), todo.end());
  todo.erase(std::unique(todo.begin(), todo.end()), todo.end());
  for (const auto& s : todo) require_sector(s, ham.n_orb);
  if (settings.method == Method::hf) settings.optimizer.validate();
  if (settings.method == Method::fci) {
    // refuse before doing any work
    for (const auto& s : todo) (void)enumerate_determinants(ham.n_orb, s, settings.fci.cap);
  }

  SectorSpectrumTable table;
  table.n_orb = ham.n_orb;
  table.hamiltonian_id = ham.provenance.checksum;
  table.method = to_string(settings.method);
  table.entries.resize(todo.size());

  std::exception_ptr failure;
  const int threads = settings.jobs > 0 ? settings.jobs : omp_get_max_threads();
  const auto count = static_cast<std::ptrdiff_t>(todo.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      const auto& s = todo[static_cast<std::size_t>(i)];
      table.entries[static_cast<std::size_t>(i)] = settings.method == Method::hf
                                                       ? hf_entry(ham, s, settings)
                                                       : fci_entry(ham, s, settings.fci);
    } catch (...) {
#pragma omp critical(specbound_scan_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return table;
}

SectorSpectrumTable one_body_table(const Eigen::MatrixXd& kappa, double constant) {
  const auto n = static_cast<std::size_t>(kappa.rows());
  const Eigen::VectorXd lambda = sorted_eigenvalues(kappa);
  SectorSpectrumTable table;
  table.n_orb = n;
  table.method = "exact1body";
  for (const auto& s : canonical_sectors(n)) {
    const auto f = one_body_filling(lambda, s);
    SectorEntry e;
    e.sector = s;
    e.e_min = constant + f.low;
    e.e_max = constant + f.high;
    e.method = "exact1body";
    table.entries.push_back(std::move(e));
  }
  return table;
}

}  // namespace specbound
