#include "specbound/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace specbound {

std::string SymmetryReport::summary() const {
  std::ostringstream out;
  out << (pass ? "symmetry ok" : "symmetry violated");
  if (!finite) out << "; non-finite entries present";
  for (const auto& c : classes) {
    if (c.max_deviation <= tolerance) continue;
    out << "; " << c.name << " max deviation " << c.max_deviation << " at (";
    for (std::size_t i = 0; i < c.worst_index.size(); ++i) out << (i ? "," : "") << c.worst_index[i];
    out << ")";
  }
  return out.str();
}

SymmetryReport validate_tensor_symmetry(const SpinFreeHamiltonian& ham, double tolerance) {
  SymmetryReport report;
  report.tolerance = tolerance;
  const std::size_t n = ham.n_orb;

  SymmetryClassDeviation h_class{"h_pq=h_qp", 0.0, {}};
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      const auto pi = static_cast<Eigen::Index>(p);
      const auto qi = static_cast<Eigen::Index>(q);
      if (!std::isfinite(ham.h(pi, qi))) report.finite = false;
      const double d = std::abs(ham.h(pi, qi) - ham.h(qi, pi));
      if (d > h_class.max_deviation) h_class = {h_class.name, d, {p, q}};
    }

  std::array<SymmetryClassDeviation, 3> g_classes{{{"g_pqrs=g_qprs", 0.0, {}},
                                                   {"g_pqrs=g_pqsr", 0.0, {}},
                                                   {"g_pqrs=g_rspq", 0.0, {}}}};
  const auto& g = ham.g;
  if (g.extent() == n) {
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q)
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t s = 0; s < n; ++s) {
            const double v = g(p, q, r, s);
            if (!std::isfinite(v)) report.finite = false;
            const std::array<double, 3> d{std::abs(v - g(q, p, r, s)), std::abs(v - g(p, q, s, r)),
                                          std::abs(v - g(r, s, p, q))};
            for (std::size_t c = 0; c < 3; ++c)
              if (d[c] > g_classes[c].max_deviation) g_classes[c] = {g_classes[c].name, d[c], {p, q, r, s}};
          }
  } else if (n > 0) {
    report.finite = false;
  }

  report.classes.push_back(h_class);
  for (auto& c : g_classes) report.classes.push_back(c);
  report.pass = report.finite;
  for (const auto& c : report.classes)
    if (!(c.max_deviation <= tolerance)) report.pass = false;
  return report;
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr);
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

}  // namespace specbound
