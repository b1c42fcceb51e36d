#include "specbound/hamiltonian.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace specbound {

void Tensor4::set_symmetric(std::size_t p, std::size_t q, std::size_t r, std::size_t s,
                            double v) noexcept {
  auto& t = *this;
  t(p, q, r, s) = v;
  t(q, p, r, s) = v;
  t(p, q, s, r) = v;
  t(q, p, s, r) = v;
  t(r, s, p, q) = v;
  t(s, r, p, q) = v;
  t(r, s, q, p) = v;
  t(s, r, q, p) = v;
}

double Tensor4::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

Tensor4 Tensor4::scaled(double c) const {
  Tensor4 out = *this;
  for (double& v : out.data_) v *= c;
  return out;
}

SymmetrySector parse_sector(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw InputError("sector must be written as A,B: '" + text + "'");
  SymmetrySector s;
  auto parse = [&](std::string_view part, int& out) {
    const auto* end = part.data() + part.size();
    auto [ptr, ec] = std::from_chars(part.data(), end, out);
    if (ec != std::errc{} || ptr != end || part.empty())
      throw InputError("sector must be written as A,B: '" + text + "'");
  };
  const std::string_view view(text);
  parse(view.substr(0, comma), s.n_alpha);
  parse(view.substr(comma + 1), s.n_beta);
  if (s.n_alpha < 0 || s.n_beta < 0) throw InputError("negative electron count in sector " + text);
  return s;
}

void require_sector(const SymmetrySector& sector, std::size_t n_orb) {
  if (!sector.valid_for(n_orb))
    throw InputError("sector (" + sector.label() + ") out of range for " + std::to_string(n_orb) +
                     " orbitals");
}

SpinFreeHamiltonian SpinFreeHamiltonian::zeros(std::size_t n_orb) {
  SpinFreeHamiltonian out;
  out.n_orb = n_orb;
  out.h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_orb), static_cast<Eigen::Index>(n_orb));
  out.g = Tensor4(n_orb);
  return out;
}

SpinFreeHamiltonian SpinFreeHamiltonian::scaled(double c, double c_const) const {
  SpinFreeHamiltonian out = *this;
  out.e_const = e_const * c_const;
  out.h = h * c;
  out.g = g.scaled(c);
  return out;
}

}  // namespace specbound
