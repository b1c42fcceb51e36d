#include "specbound/cli.hpp"
#include "specbound/kernels.hpp"
#include "specbound/scaling.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#ifndef SPECBOUND_VERSION
#define SPECBOUND_VERSION "0.0.0"
#endif

namespace specbound {

namespace fs = std::filesystem;

std::string version() { return SPECBOUND_VERSION; }

namespace {

std::string format_name(InputFormat f) { return f == InputFormat::fcidump ? "fcidump" : "ao-json"; }

InputFormat parse_format(const std::string& s) {
  if (s == "fcidump") return InputFormat::fcidump;
  if (s == "ao-json" || s == "ao_json") return InputFormat::ao_json;
  throw InputError("unknown input format '" + s + "' (expected fcidump or ao-json)");
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json sector_json(const SymmetrySector& s) { return {s.n_alpha, s.n_beta}; }

nlohmann::json envelope(const RunConfig& cfg, const std::string& kind) {
  nlohmann::json doc = {{"kind", kind}, {"specbound_version", version()}, {"config", cfg.to_json()}};
  if (!cfg.stable_output) doc["timestamp"] = utc_timestamp();
  return doc;
}

nlohmann::json input_json(const SpinFreeHamiltonian& ham) {
  return {{"path", ham.provenance.path},
          {"format", ham.provenance.format},
          {"sha256", ham.provenance.checksum},
          {"n_orb", ham.n_orb},
          {"e_const", ham.e_const}};
}

void write_text(const fs::path& path, const std::string& text) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("write failed: " + path.string());
}

void write_json(const fs::path& path, const nlohmann::json& doc) { write_text(path, round_numbers(doc).dump(2) + "\n"); }

SymmetrySector target_sector(const RunConfig& cfg, const SpinFreeHamiltonian& ham) {
  SymmetrySector s = cfg.sector ? *cfg.sector : ham.default_sector ? *ham.default_sector : half_filling(ham.n_orb);
  require_sector(s, ham.n_orb);
  return s;
}

void apply_jobs(const RunConfig& cfg) {
  if (cfg.jobs > 0) kernels::set_threads(cfg.jobs);
}

ScanSettings traced_settings(const RunConfig& cfg, const std::string& stem) {
  ScanSettings s = cfg.scan_settings();
  if (cfg.trace) {
    const fs::path dir = cfg.out_dir / (stem + "_traces");
    fs::create_directories(dir);
    s.trace_factory = [dir](const SymmetrySector& sec, ExtremumKind kind) -> TraceFn {
      const auto name = "trace_" + std::to_string(sec.n_alpha) + "_" + std::to_string(sec.n_beta) +
                        (kind == ExtremumKind::min ? "_min" : "_max") + ".csv";
      auto file = std::make_shared<std::ofstream>(dir / name);
      TraceFn row = csv_trace(*file);
      return [file, row](int it, double e, double g, double step) { row(it, e, g, step); };
    };
  }
  return s;
}

template <class Fn>
int guarded(std::ostream& log, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitError;
  }
}

struct BoundsRun {
  SymmetrySector target;
  SectorSpectrumTable table;
  BoundsReport report;
  std::optional<SectorSpectrumTable> two_body_table;
  std::vector<std::string> violations;
};

BoundsRun run_bounds(const RunConfig& cfg, const SpinFreeHamiltonian& ham, const ScanSettings& settings,
                     bool incoherent) {
  BoundsRun run;
  run.target = target_sector(cfg, ham);
  run.table = scan_sectors(ham, settings);
  run.report = assemble_bounds(run.table, run.target);
  if (incoherent) {
    SectorSpectrumTable two;
    run.report.incoherent = incoherent_bounds(ham, settings, run.target, 1e-10, &two);
    for (const auto& s : run.report.incoherent->unconverged)
      run.report.warnings.push_back("two-body component: sector (" + s.label() + ") did not converge");
    run.two_body_table = std::move(two);
  }
  run.violations = run.report.check_invariants();
  for (const auto& v : run.violations) run.report.warnings.push_back("invariant violated: " + v);
  return run;
}

bool unconverged(const BoundsReport& r) {
  return !r.unconverged.empty() || (r.incoherent && !r.incoherent->unconverged.empty());
}

std::string settings_digest(const RunConfig& cfg, Method method) {
  nlohmann::json j = cfg.to_json();
  j["method"] = to_string(method);
  for (const char* k : {"command", "input", "format", "sector", "sectors", "out_dir", "manifest", "jobs", "trace"})
    j.erase(k);
  return j.dump();
}

}  // namespace

std::string input_stem(const fs::path& path) {
  const std::string name = path.filename().string();
  const auto dot = name.find('.');
  return dot == std::string::npos || dot == 0 ? name : name.substr(0, dot);
}

void RunConfig::validate() const {
  optimizer.validate();
  if (fci_cap == 0) throw InputError("--fci-cap must be positive");
  if (jobs < 0) throw InputError("--jobs must be non-negative");
  if (command == "scaling") {
    if (manifest.empty()) throw InputError("scaling needs --manifest");
  } else if (input.empty()) {
    throw InputError("an input file is required (--fcidump or --ao-json)");
  }
  if (sectors != "all" && sectors != "canonical") (void)resolve_sectors(sectors, 64);
}

ScanSettings RunConfig::scan_settings() const {
  ScanSettings s;
  s.method = method.value_or(Method::hf);
  s.optimizer = optimizer;
  s.fci.cap = fci_cap;
  s.jobs = jobs;
  return s;
}

nlohmann::json RunConfig::to_json() const {
  return {{"command", command},
          {"input", input.string()},
          {"format", format_name(format)},
          {"method", method ? to_string(*method) : std::string("hf")},
          {"sector", sector ? sector->label() : std::string()},
          {"sectors", sectors},
          {"optimizer",
           {{"grad_tol", optimizer.grad_tol},
            {"energy_tol", optimizer.energy_tol},
            {"max_iter", optimizer.max_iter},
            {"restarts", optimizer.restarts},
            {"seed", optimizer.seed},
            {"restart_sigma", optimizer.restart_sigma},
            {"lbfgs_memory", optimizer.lbfgs_memory},
            {"line_search", optimizer.line_search}}},
          {"fci_cap", fci_cap},
          {"jobs", jobs},
          {"out_dir", out_dir.string()},
          {"manifest", manifest.string()},
          {"incoherent", incoherent},
          {"trace", trace}};
}

std::vector<SymmetrySector> resolve_sectors(const std::string& spec, std::size_t n_orb) {
  if (spec == "all") return all_sectors(n_orb);
  if (spec == "canonical") return canonical_sectors(n_orb);
  std::vector<SymmetrySector> out;
  std::stringstream in(spec);
  std::string item;
  while (std::getline(in, item, ';'))
    if (!item.empty()) out.push_back(parse_sector(item));
  if (out.empty()) throw InputError("empty sector list '" + spec + "'");
  return out;
}

int cmd_bounds(const RunConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    cfg.validate();
    apply_jobs(cfg);
    const SpinFreeHamiltonian ham = load_hamiltonian(cfg.input, cfg.format);
    const std::string stem = input_stem(cfg.input);
    const BoundsRun run = run_bounds(cfg, ham, traced_settings(cfg, stem), cfg.incoherent);

    nlohmann::json doc = envelope(cfg, "bounds");
    doc["input"] = input_json(ham);
    doc["report"] = run.report.to_json();
    doc["spectra"] = run.table.to_json();
    if (run.two_body_table) doc["two_body_spectra"] = run.two_body_table->to_json();
    write_json(cfg.out_dir / (stem + "_bounds.json"), doc);
    write_text(cfg.out_dir / (stem + "_table1.csv"), run.report.table_csv());

    const auto& c = run.report.coherent;
    log << stem << " [" << run.report.method << "] target (" << run.target.label() << "): delta/2 = " << c.delta_half
        << ", delta_s/2 = " << c.delta_s_half << ", delta_mu/2 = " << c.delta_mu_half << '\n';
    for (const auto& w : run.report.warnings) log << "warning: " << w << '\n';
    return unconverged(run.report) || !run.violations.empty() ? kExitUnconverged : kExitOk;
  });
}

int cmd_scan(const RunConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    cfg.validate();
    apply_jobs(cfg);
    const SpinFreeHamiltonian ham = load_hamiltonian(cfg.input, cfg.format);
    const std::string stem = input_stem(cfg.input);
    const auto sectors = resolve_sectors(cfg.sectors, ham.n_orb);
    const SectorSpectrumTable table = scan_sectors(ham, traced_settings(cfg, stem), sectors);

    nlohmann::json doc = envelope(cfg, "scan");
    doc["input"] = input_json(ham);
    doc["table"] = table.to_json();
    write_json(cfg.out_dir / (stem + "_scan.json"), doc);

    log << stem << " [" << table.method << "]: " << table.entries.size() << " sector(s)\n";
    const auto bad = table.unconverged();
    for (const auto& s : bad) log << "warning: sector (" << s.label() << ") did not converge\n";
    return bad.empty() ? kExitOk : kExitUnconverged;
  });
}

int cmd_validate(const RunConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    cfg.validate();
    apply_jobs(cfg);
    const SpinFreeHamiltonian ham = load_hamiltonian(cfg.input, cfg.format);
    const std::string stem = input_stem(cfg.input);
    const auto symmetry = validate_tensor_symmetry(ham);

    ScanSettings hf = traced_settings(cfg, stem);
    hf.method = Method::hf;
    ScanSettings fci = cfg.scan_settings();
    fci.method = Method::fci;
    const auto hf_table = scan_sectors(ham, hf);
    const auto fci_table = scan_sectors(ham, fci);
    const SymmetrySector target = target_sector(cfg, ham);
    const auto hf_report = assemble_bounds(hf_table, target);
    const auto fci_report = assemble_bounds(fci_table, target);

    constexpr double tol = 1e-9;
    nlohmann::json rows = nlohmann::json::array();
    std::vector<std::string> violations;
    auto percent = [](double approx, double exact) { return exact != 0.0 ? 100.0 * (approx - exact) / std::abs(exact) : 0.0; };
    for (const auto& f : fci_table.entries) {
      const SectorEntry& h = *hf_table.find(f.sector);
      const bool ok = h.e_min >= f.e_min - tol && h.e_max <= f.e_max + tol;
      if (!ok) violations.push_back("sector (" + f.sector.label() + ")");
      rows.push_back({{"sector", sector_json(f.sector)},
                      {"hf_e_min", h.e_min},
                      {"fci_e_min", f.e_min},
                      {"hf_e_max", h.e_max},
                      {"fci_e_max", f.e_max},
                      {"hf_half_range", h.half_range()},
                      {"fci_half_range", f.half_range()},
                      {"abs_error_half_range", f.half_range() - h.half_range()},
                      {"percent_error_half_range", percent(h.half_range(), f.half_range())},
                      {"hf_converged", h.converged()},
                      {"ordering_ok", ok}});
    }
    auto tier_check = [&](const char* name, double hv, double fv) {
      if (hv > fv + tol) violations.push_back(std::string("tier ") + name);
      return nlohmann::json{{"hf", hv}, {"fci", fv}, {"abs_error", fv - hv}, {"percent_error", percent(hv, fv)}};
    };
    nlohmann::json tiers = {
        {"delta_half", tier_check("delta_half", hf_report.coherent.delta_half, fci_report.coherent.delta_half)},
        {"delta_s_half", tier_check("delta_s_half", hf_report.coherent.delta_s_half, fci_report.coherent.delta_s_half)},
        {"delta_mu_half",
         tier_check("delta_mu_half", hf_report.coherent.delta_mu_half, fci_report.coherent.delta_mu_half)}};

    nlohmann::json doc = envelope(cfg, "validate");
    doc["input"] = input_json(ham);
    doc["symmetry"] = {{"pass", symmetry.pass}, {"summary", symmetry.summary()}};
    doc["target_sector"] = sector_json(target);
    doc["sectors"] = rows;
    doc["tiers"] = tiers;
    doc["violations"] = violations;
    doc["pass"] = violations.empty() && symmetry.pass;
    write_json(cfg.out_dir / (stem + "_validate.json"), doc);

    log << stem << ": " << rows.size() << " sector(s) compared, " << violations.size() << " violation(s)\n";
    for (const auto& v : violations) log << "violation: " << v << '\n';
    if (!symmetry.pass) log << "symmetry: " << symmetry.summary() << '\n';
    if (!violations.empty() || !symmetry.pass) return kExitError;
    return hf_table.unconverged().empty() ? kExitOk : kExitUnconverged;
  });
}

int cmd_scaling(const RunConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    cfg.validate();
    apply_jobs(cfg);
    const nlohmann::json manifest = nlohmann::json::parse(read_file(cfg.manifest));
    const fs::path base = cfg.manifest.parent_path();
    const std::string system = manifest.value("system", input_stem(cfg.manifest));
    const std::string axis = manifest.value("axis", "series");
    const std::string x_name = manifest.value("x_name", "x");
    const Method method = cfg.method ? *cfg.method : parse_method(manifest.value("method", "hf"));
    if (!manifest.contains("fixtures") || !manifest["fixtures"].is_array())
      throw InputError(cfg.manifest.string() + ": 'fixtures' array missing");

    std::vector<LabeledReport> reports;
    std::vector<std::string> failed;
    for (const auto& fx : manifest["fixtures"]) {
      RunConfig sub = cfg;
      sub.command = "bounds";
      sub.method = method;
      sub.input = base / fx.at("path").get<std::string>();
      sub.format = parse_format(fx.value("format", "fcidump"));
      if (fx.contains("sector")) sub.sector = parse_sector(fx["sector"].get<std::string>());
      sub.incoherent = false;
      const std::string label = fx.value("label", input_stem(sub.input));
      try {
        const SpinFreeHamiltonian ham = load_hamiltonian(sub.input, sub.format);
        BoundsRun run = run_bounds(sub, ham, traced_settings(sub, label), false);
        nlohmann::json doc = envelope(sub, "bounds");
        doc["input"] = input_json(ham);
        doc["report"] = run.report.to_json();
        doc["spectra"] = run.table.to_json();
        write_json(cfg.out_dir / (label + "_bounds.json"), doc);
        log << label << ": delta/2 = " << run.report.coherent.delta_half
            << ", delta_s/2 = " << run.report.coherent.delta_s_half
            << ", delta_mu/2 = " << run.report.coherent.delta_mu_half << '\n';
        reports.push_back({label, fx.at("x").get<double>(), std::move(run.report), settings_digest(cfg, method)});
      } catch (const std::exception& e) {
        log << "warning: fixture " << label << " failed: " << e.what() << '\n';
        failed.push_back(label);
      }
    }

    Series series = build_series(reports);
    series.excluded.insert(series.excluded.end(), failed.begin(), failed.end());
    std::array<std::optional<FitResult>, 3> fits;
    for (const Tier t : kTiers) {
      const auto& pts = series.points(t);
      if (pts.size() >= 2) fits[static_cast<std::size_t>(t)] = fit_power_law(pts);
    }

    const std::string prefix = system + "_" + axis;
    for (const Tier t : kTiers) {
      std::ostringstream csv;
      write_tier_csv(csv, series, t, x_name);
      write_text(cfg.out_dir / (prefix + "_" + to_string(t) + ".csv"), csv.str());
    }
    std::ostringstream all;
    write_series_csv(all, series, x_name);
    write_text(cfg.out_dir / (prefix + "_series.csv"), all.str());
    RunConfig resolved = cfg;
    resolved.method = method;
    resolved.incoherent = false;
    nlohmann::json doc = envelope(resolved, "scaling");
    doc["plotdata"] = emit_plotdata(series, fits, x_name);
    write_json(cfg.out_dir / (prefix + "_plotdata.json"), doc);

    for (const Tier t : kTiers)
      if (const auto& f = fits[static_cast<std::size_t>(t)])
        log << to_string(t) << ": exponent " << f->exponent << ", prefactor " << f->prefactor << ", r^2 "
            << f->r_squared << '\n';
    for (const auto& e : series.excluded) log << "warning: excluded " << e << '\n';
    return series.excluded.empty() ? kExitOk : kExitUnconverged;
  });
}

}  // namespace specbound
