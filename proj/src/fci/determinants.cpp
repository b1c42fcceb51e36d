#include "specbound/fci.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <limits>

namespace specbound {

namespace {

// Pascal table up to 64 choose k; saturates instead of overflowing.
const std::array<std::array<std::uint64_t, 65>, 65>& binomials() {
  static const auto table = [] {
    std::array<std::array<std::uint64_t, 65>, 65> t{};
    for (std::size_t n = 0; n <= 64; ++n) {
      t[n][0] = 1;
      for (std::size_t k = 1; k <= n; ++k) {
        const std::uint64_t a = t[n - 1][k - 1];
        const std::uint64_t b = k <= n - 1 ? t[n - 1][k] : 0;
        t[n][k] = a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max() : a + b;
      }
    }
    return t;
  }();
  return table;
}

std::uint64_t choose(std::size_t n, std::size_t k) { return k > n ? 0 : binomials()[n][k]; }

std::vector<std::uint64_t> strings_with_popcount(std::size_t n, int k) {
  std::vector<std::uint64_t> out;
  out.reserve(static_cast<std::size_t>(choose(n, static_cast<std::size_t>(k))));
  if (k == 0) {
    out.push_back(0);
    return out;
  }
  const std::uint64_t limit = n == 64 ? 0 : (std::uint64_t{1} << n);
  std::uint64_t v = (k == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << k) - 1);
  while (true) {
    out.push_back(v);
    // Gosper's hack: next integer with the same popcount
    const std::uint64_t c = v & (~v + 1);
    const std::uint64_t r = v + c;
    if (r == 0) break;
    v = (((r ^ v) >> 2) / c) | r;
    if (limit != 0 && v >= limit) break;
  }
  return out;
}

}  // namespace

std::size_t DeterminantBasis::string_index(std::uint64_t bits) {
  std::size_t rank = 0;
  std::size_t k = 0;
  while (bits) {
    const auto p = static_cast<std::size_t>(std::countr_zero(bits));
    ++k;
    rank += static_cast<std::size_t>(choose(p, k));
    bits &= bits - 1;
  }
  return rank;
}

DeterminantBasis enumerate_determinants(std::size_t n_orb, const SymmetrySector& sector, std::size_t cap) {
  require_sector(sector, n_orb);
  if (n_orb > 63) throw InputError("determinant strings support at most 63 orbitals");
  const std::uint64_t na = choose(n_orb, static_cast<std::size_t>(sector.n_alpha));
  const std::uint64_t nb = choose(n_orb, static_cast<std::size_t>(sector.n_beta));
  const long double dim = static_cast<long double>(na) * static_cast<long double>(nb);
  if (dim > static_cast<long double>(cap)) {
    throw InputError("FCI dimension " + std::to_string(static_cast<unsigned long long>(dim)) + " of sector (" +
                     sector.label() + ") exceeds the cap " + std::to_string(cap));
  }
  DeterminantBasis basis;
  basis.n_orb = n_orb;
  basis.sector = sector;
  basis.alpha_strings = strings_with_popcount(n_orb, sector.n_alpha);
  basis.beta_strings = strings_with_popcount(n_orb, sector.n_beta);
  return basis;
}

double s2_matrix_element(const DeterminantBasis& basis, const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(x.size()) != basis.dim())
    throw InputError("s2_matrix_element: vector length does not match the basis");
  if (std::abs(x.norm() - 1.0) > 1e-8) throw InputError("s2_matrix_element: vector is not normalized");
  const int na = basis.sector.n_alpha;
  const int nb = basis.sector.n_beta;
  const double sz = 0.5 * (na - nb);
  const std::size_t n = basis.n_orb;
  double lowered_norm2 = 0.0;
  if (na > 0 && nb < static_cast<int>(n)) {
    const auto target = enumerate_determinants(n, {na - 1, nb + 1}, std::numeric_limits<std::size_t>::max());
    Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(target.dim()));
    const std::size_t nbt = target.beta_strings.size();
    const std::size_t nbs = basis.beta_strings.size();
    // S- = sum_p a+_{p,beta} a_{p,alpha}; the beta creator passes na-1 alpha creators.
    const double pass_sign = ((na - 1) % 2) ? -1.0 : 1.0;
    for (std::size_t ia = 0; ia < basis.alpha_strings.size(); ++ia) {
      const std::uint64_t a = basis.alpha_strings[ia];
      for (std::size_t ib = 0; ib < nbs; ++ib) {
        const double c = x(static_cast<Eigen::Index>(ia * nbs + ib));
        if (c == 0.0) continue;
        const std::uint64_t b = basis.beta_strings[ib];
        std::uint64_t movable = a & ~b;
        while (movable) {
          const int p = std::countr_zero(movable);
          movable &= movable - 1;
          const std::uint64_t below = (std::uint64_t{1} << p) - 1;
          const double sign = pass_sign * ((std::popcount(a & below) + std::popcount(b & below)) % 2 ? -1.0 : 1.0);
          const std::uint64_t a2 = a & ~(std::uint64_t{1} << p);
          const std::uint64_t b2 = b | (std::uint64_t{1} << p);
          const std::size_t idx = DeterminantBasis::string_index(a2) * nbt + DeterminantBasis::string_index(b2);
          y(static_cast<Eigen::Index>(idx)) += sign * c;
        }
      }
    }
    lowered_norm2 = y.squaredNorm();
  }
  return lowered_norm2 + sz * sz - sz;
}

Eigen::VectorXd rotated_determinant(const DeterminantBasis& basis, const Eigen::MatrixXd& u) {
  const auto n = static_cast<Eigen::Index>(basis.n_orb);
  if (u.rows() != n || u.cols() < std::max(basis.sector.n_alpha, basis.sector.n_beta))
    throw InputError("rotated_determinant: orbital matrix has the wrong shape");
  auto minors = [&](const std::vector<std::uint64_t>& strings, int k) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(strings.size()));
    for (std::size_t i = 0; i < strings.size(); ++i) {
      if (k == 0) {
        out(static_cast<Eigen::Index>(i)) = 1.0;
        continue;
      }
      Eigen::MatrixXd m(k, k);
      std::uint64_t bits = strings[i];
      for (int row = 0; row < k; ++row) {
        const int p = std::countr_zero(bits);
        bits &= bits - 1;
        m.row(row) = u.row(p).head(k);
      }
      out(static_cast<Eigen::Index>(i)) = m.determinant();
    }
    return out;
  };
  const Eigen::VectorXd ca = minors(basis.alpha_strings, basis.sector.n_alpha);
  const Eigen::VectorXd cb = minors(basis.beta_strings, basis.sector.n_beta);
  Eigen::VectorXd out(static_cast<Eigen::Index>(basis.dim()));
  for (Eigen::Index i = 0; i < ca.size(); ++i) out.segment(i * cb.size(), cb.size()) = ca(i) * cb;
  return out;
}

}  // namespace specbound
