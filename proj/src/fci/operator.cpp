#include "specbound/fci.hpp"

#include <bit>
#include <limits>

namespace specbound {

namespace {

using Excitation = FciOperator::Excitation;
using SparseEntry = FciOperator::SparseEntry;

// All E_pq |string> with their fermionic signs, diagonal terms included.
std::vector<std::vector<Excitation>> excitation_lists(const std::vector<std::uint64_t>& strings, std::size_t n) {
  std::vector<std::vector<Excitation>> out(strings.size());
  for (std::size_t i = 0; i < strings.size(); ++i) {
    const std::uint64_t s = strings[i];
    auto& list = out[i];
    for (std::size_t q = 0; q < n; ++q) {
      if (!(s >> q & 1U)) continue;
      const std::uint64_t removed = s & ~(std::uint64_t{1} << q);
      const int below_q = std::popcount(s & ((std::uint64_t{1} << q) - 1));
      for (std::size_t p = 0; p < n; ++p) {
        if (p != q && (removed >> p & 1U)) continue;
        const std::uint64_t t = removed | (std::uint64_t{1} << p);
        const int below_p = std::popcount(removed & ((std::uint64_t{1} << p) - 1));
        const double sign = (below_q + below_p) % 2 ? -1.0 : 1.0;
        list.push_back({static_cast<std::uint32_t>(DeterminantBasis::string_index(t)),
                        static_cast<std::uint32_t>(p * n + q), sign});
      }
    }
  }
  return out;
}

// Same-spin part: sum h'_pq E_pq + 1/2 sum g_pqrs E_pq E_rs acting within one spin channel.
std::vector<std::vector<SparseEntry>> same_spin_operator(const std::vector<std::vector<Excitation>>& exc,
                                                         const Eigen::MatrixXd& h_mod, const std::vector<double>& g_pair,
                                                         std::size_t n) {
  const std::size_t count = exc.size();
  const std::size_t nn = n * n;
  std::vector<std::vector<SparseEntry>> out(count);
#pragma omp parallel
  {
    std::vector<double> acc(count, 0.0);
    std::vector<char> seen(count, 0);
    std::vector<std::uint32_t> touched;
#pragma omp for schedule(dynamic, 16)
    for (std::size_t i = 0; i < count; ++i) {
      touched.clear();
      auto add = [&](std::uint32_t j, double v) {
        if (!seen[j]) {
          seen[j] = 1;
          touched.push_back(j);
        }
        acc[j] += v;
      };
      for (const auto& e1 : exc[i]) {
        const std::size_t p = e1.pq / n;
        const std::size_t q = e1.pq % n;
        add(e1.target, h_mod(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) * e1.sign);
        for (const auto& e2 : exc[e1.target]) {
          add(e2.target, 0.5 * g_pair[e2.pq * nn + e1.pq] * e1.sign * e2.sign);
        }
      }
      auto& row = out[i];
      row.reserve(touched.size());
      for (const auto j : touched) {
        if (acc[j] != 0.0) row.push_back({j, acc[j]});
        acc[j] = 0.0;
        seen[j] = 0;
      }
    }
  }
  return out;
}

}  // namespace

FciOperator::FciOperator(const SpinFreeHamiltonian& ham, DeterminantBasis basis) : basis_(std::move(basis)) {
  const std::size_t n = ham.n_orb;
  if (basis_.n_orb != n) throw InputError("FciOperator: basis and Hamiltonian disagree on the orbital count");
  if (std::max(basis_.alpha_strings.size(), basis_.beta_strings.size()) > std::numeric_limits<std::uint32_t>::max())
    throw InputError("FciOperator: too many strings");
  e_const_ = ham.e_const;
  const auto g = ham.g.data();
  g_pair_.assign(g.begin(), g.end());
  Eigen::MatrixXd h_mod = ham.h;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      double s = 0.0;
      for (std::size_t r = 0; r < n; ++r) s += ham.g(p, r, r, q);
      h_mod(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) -= 0.5 * s;
    }
  alpha_exc_ = excitation_lists(basis_.alpha_strings, n);
  alpha_op_ = same_spin_operator(alpha_exc_, h_mod, g_pair_, n);
  if (basis_.sector.n_alpha == basis_.sector.n_beta) {
    beta_exc_ = alpha_exc_;
    beta_op_ = alpha_op_;
  } else {
    beta_exc_ = excitation_lists(basis_.beta_strings, n);
    beta_op_ = same_spin_operator(beta_exc_, h_mod, g_pair_, n);
  }
}

template <class Visit>
void FciOperator::visit_row(std::size_t ia, std::size_t ib, Visit&& visit) const {
  const std::size_t nb = basis_.beta_strings.size();
  const std::size_t nn = basis_.n_orb * basis_.n_orb;
  visit(ia * nb + ib, e_const_);
  for (const auto& e : alpha_op_[ia]) visit(e.column * nb + ib, e.value);
  for (const auto& e : beta_op_[ib]) visit(ia * nb + e.column, e.value);
  // opposite-spin two-body: sum g_pqrs E^alpha_pq E^beta_rs
  for (const auto& ea : alpha_exc_[ia]) {
    const double* row = g_pair_.data() + ea.pq * nn;
    const std::size_t base = static_cast<std::size_t>(ea.target) * nb;
    for (const auto& eb : beta_exc_[ib]) visit(base + eb.target, row[eb.pq] * ea.sign * eb.sign);
  }
}

void FciOperator::apply_rows(std::size_t ia_begin, std::size_t ia_end, std::span<const double> x,
                             std::span<double> y) const {
  const std::size_t nb = basis_.beta_strings.size();
  for (std::size_t ia = ia_begin; ia < ia_end; ++ia)
    for (std::size_t ib = 0; ib < nb; ++ib) {
      double acc = 0.0;
      visit_row(ia, ib, [&](std::size_t j, double v) { acc += v * x[j]; });
      y[ia * nb + ib] = acc;
    }
}

void FciOperator::apply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != dim() || y.size() != dim()) throw InputError("FciOperator::apply: size mismatch");
  const auto na = static_cast<std::ptrdiff_t>(basis_.alpha_strings.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t ia = 0; ia < na; ++ia)
    apply_rows(static_cast<std::size_t>(ia), static_cast<std::size_t>(ia) + 1, x, y);
}

void FciOperator::apply_serial(std::span<const double> x, std::span<double> y) const {
  if (x.size() != dim() || y.size() != dim()) throw InputError("FciOperator::apply_serial: size mismatch");
  apply_rows(0, basis_.alpha_strings.size(), x, y);
}

Eigen::MatrixXd FciOperator::dense() const {
  const std::size_t nb = basis_.beta_strings.size();
  const auto d = static_cast<Eigen::Index>(dim());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t ia = 0; ia < basis_.alpha_strings.size(); ++ia)
    for (std::size_t ib = 0; ib < nb; ++ib) {
      const auto i = static_cast<Eigen::Index>(ia * nb + ib);
      visit_row(ia, ib, [&](std::size_t j, double v) { m(i, static_cast<Eigen::Index>(j)) += v; });
    }
  return m;
}

double FciOperator::diagonal(std::size_t index) const {
  const std::size_t nb = basis_.beta_strings.size();
  double acc = 0.0;
  visit_row(index / nb, index % nb, [&](std::size_t j, double v) {
    if (j == index) acc += v;
  });
  return acc;
}

Eigen::VectorXd apply_hamiltonian(const SpinFreeHamiltonian& ham, const DeterminantBasis& basis,
                                  const Eigen::VectorXd& x) {
  const FciOperator op(ham, basis);
  Eigen::VectorXd y(x.size());
  op.apply({x.data(), static_cast<std::size_t>(x.size())}, {y.data(), static_cast<std::size_t>(y.size())});
  return y;
}

}  // namespace specbound
