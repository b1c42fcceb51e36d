#include "specbound/io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <regex>
#include <sstream>

namespace specbound {

namespace {

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

bool is_header_end(const std::string& line) {
  const auto u = upper(line);
  if (u.find("&END") != std::string::npos || u.find("$END") != std::string::npos) return true;
  const auto first = u.find_first_not_of(" \t\r");
  return first != std::string::npos && u[first] == '/' ;
}

std::optional<long> header_int(const std::string& header, const char* key) {
  const std::regex re(std::string("(^|[^A-Z0-9_])") + key + R"(\s*=\s*(-?\d+))", std::regex::icase);
  std::smatch m;
  if (!std::regex_search(header, m, re)) return std::nullopt;
  return std::stol(m[2].str());
}

using Key = std::array<std::size_t, 4>;

// Representative of the (pq|rs) orbit: p>=q, r>=s, (p,q)>=(r,s).
Key canonical_g(std::size_t p, std::size_t q, std::size_t r, std::size_t s) {
  if (p < q) std::swap(p, q);
  if (r < s) std::swap(r, s);
  if (std::pair(p, q) < std::pair(r, s)) {
    std::swap(p, r);
    std::swap(q, s);
  }
  return {p, q, r, s};
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw InputError(source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

SpinFreeHamiltonian parse_fcidump(std::istream& in, const std::string& source_name) {
  std::string header;
  std::string line;
  std::size_t line_no = 0;
  bool header_done = false;
  while (std::getline(in, line)) {
    ++line_no;
    header += line;
    header += '\n';
    if (is_header_end(line)) {
      header_done = true;
      break;
    }
  }
  if (!header_done || upper(header).find("&FCI") == std::string::npos)
    fail(source_name, line_no, "malformed header: expected '&FCI ... &END' namelist");

  const auto norb = header_int(header, "NORB");
  if (!norb || *norb < 0) fail(source_name, line_no, "malformed header: missing or invalid NORB");
  const auto nelec = header_int(header, "NELEC");
  const auto ms2 = header_int(header, "MS2");

  const auto n = static_cast<std::size_t>(*norb);
  auto ham = SpinFreeHamiltonian::zeros(n);
  if (nelec && *nelec >= 0) {
    const long m = ms2.value_or(0);
    if ((*nelec + m) % 2 == 0 && std::abs(m) <= *nelec) {
      ham.default_sector = SymmetrySector{static_cast<int>((*nelec + m) / 2),
                                          static_cast<int>((*nelec - m) / 2)};
    }
  }

  std::map<Key, std::pair<double, std::size_t>> seen;
  auto record = [&](const Key& key, double value) {
    auto [it, inserted] = seen.emplace(key, std::pair(value, line_no));
    if (!inserted && std::abs(it->second.first - value) > 1e-10) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "conflicting duplicate entry (" << key[0] + 1 << ' ' << key[1] + 1 << ' ' << key[2] + 1
          << ' ' << key[3] + 1 << "): " << value << " vs " << it->second.first << " on line "
          << it->second.second;
      fail(source_name, line_no, msg.str());
    }
    return inserted;
  };

  constexpr std::size_t kConst = static_cast<std::size_t>(-1);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    // Fortran exponents (1.0D-3) are accepted.
    std::replace(line.begin(), line.end(), 'D', 'E');
    std::replace(line.begin(), line.end(), 'd', 'e');
    std::istringstream fields(line);
    double value = 0.0;
    long idx[4] = {0, 0, 0, 0};
    if (!(fields >> value >> idx[0] >> idx[1] >> idx[2] >> idx[3]))
      fail(source_name, line_no, "expected 'value i j k l'");
    std::string extra;
    if (fields >> extra) fail(source_name, line_no, "trailing text '" + extra + "'");
    if (!std::isfinite(value)) fail(source_name, line_no, "non-finite value");
    for (long k : idx)
      if (k < 0 || k > static_cast<long>(n))
        fail(source_name, line_no, "index " + std::to_string(k) + " out of range [1, " +
                                       std::to_string(n) + "]");

    const bool ij_zero = idx[0] == 0 && idx[1] == 0;
    const bool kl_zero = idx[2] == 0 && idx[3] == 0;
    if (ij_zero && kl_zero) {
      if (record({kConst, kConst, kConst, kConst}, value)) ham.e_const = value;
    } else if (kl_zero) {
      if (idx[1] == 0) continue;  // orbital-energy records "e i 0 0 0" carry no integrals
      if (idx[0] == 0) fail(source_name, line_no, "one-electron record with zero first index");
      auto p = static_cast<std::size_t>(idx[0] - 1);
      auto q = static_cast<std::size_t>(idx[1] - 1);
      if (record({std::max(p, q), std::min(p, q), kConst, 0}, value)) {
        ham.h(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = value;
        ham.h(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(p)) = value;
      }
    } else {
      if (idx[0] == 0 || idx[1] == 0 || idx[2] == 0 || idx[3] == 0)
        fail(source_name, line_no, "two-electron record with a zero index");
      const auto p = static_cast<std::size_t>(idx[0] - 1);
      const auto q = static_cast<std::size_t>(idx[1] - 1);
      const auto r = static_cast<std::size_t>(idx[2] - 1);
      const auto s = static_cast<std::size_t>(idx[3] - 1);
      if (record(canonical_g(p, q, r, s), value)) ham.g.set_symmetric(p, q, r, s, value);
    }
  }
  ham.provenance.path = source_name;
  ham.provenance.format = "fcidump";
  return ham;
}

void write_fcidump(std::ostream& out, const SpinFreeHamiltonian& ham, double zero_tol) {
  const std::size_t n = ham.n_orb;
  int nelec = 0;
  int ms2 = 0;
  if (ham.default_sector) {
    nelec = ham.default_sector->electrons();
    ms2 = ham.default_sector->n_alpha - ham.default_sector->n_beta;
  }
  out << "&FCI NORB=" << n << ",NELEC=" << nelec << ",MS2=" << ms2 << ",\n ORBSYM=";
  for (std::size_t i = 0; i < n; ++i) out << "1,";
  out << "\n ISYM=1,\n&END\n";

  char buf[96];
  auto emit = [&](double v, std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    std::snprintf(buf, sizeof buf, "%24.16e %4zu %4zu %4zu %4zu\n", v, i, j, k, l);
    out << buf;
  };
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q <= p; ++q)
      for (std::size_t r = 0; r <= p; ++r)
        for (std::size_t s = 0; s <= r; ++s) {
          if (std::pair(p, q) < std::pair(r, s)) continue;
          const double v = ham.g(p, q, r, s);
          if (std::abs(v) > zero_tol || (zero_tol == 0.0 && v != 0.0)) emit(v, p + 1, q + 1, r + 1, s + 1);
        }
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q <= p; ++q) {
      const double v = ham.h(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
      if (std::abs(v) > zero_tol || (zero_tol == 0.0 && v != 0.0)) emit(v, p + 1, q + 1, 0, 0);
    }
  emit(ham.e_const, 0, 0, 0, 0);
}

}  // namespace specbound
