#include "specbound/majorana.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace specbound {

MajoranaSplit majorana_split(const SpinFreeHamiltonian& ham) {
  const std::size_t n = ham.n_orb;
  const auto ni = static_cast<Eigen::Index>(n);
  const auto& g = ham.g;

  double coulomb_trace = 0.0;   // sum_pr g_pprr
  double exchange_trace = 0.0;  // sum_pr g_prrp
  Eigen::MatrixXd exch = Eigen::MatrixXd::Zero(ni, ni);  // sum_r g_prrq
  Eigen::MatrixXd coul = Eigen::MatrixXd::Zero(ni, ni);  // sum_r g_pqrr
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      double e = 0.0;
      double c = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        e += g(p, r, r, q);
        c += g(p, q, r, r);
      }
      exch(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = e;
      coul(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = c;
    }
  for (Eigen::Index p = 0; p < ni; ++p) {
    coulomb_trace += coul(p, p);
    exchange_trace += exch(p, p);
  }

  MajoranaSplit split;
  split.e_core = ham.e_const + ham.h.trace() + 0.5 * coulomb_trace - 0.5 * exchange_trace;
  split.kappa = ham.h - 0.5 * exch + coul;
  split.kappa = 0.5 * (split.kappa + split.kappa.transpose()).eval();

  split.core = SpinFreeHamiltonian::zeros(n);
  split.core.e_const = split.e_core;

  split.one_body = SpinFreeHamiltonian::zeros(n);
  split.one_body.e_const = -split.kappa.trace();
  split.one_body.h = split.kappa;

  split.two_body = SpinFreeHamiltonian::zeros(n);
  split.two_body.e_const = 0.5 * coulomb_trace;
  split.two_body.h = 0.5 * exch - coul;
  split.two_body.h = 0.5 * (split.two_body.h + split.two_body.h.transpose()).eval();
  split.two_body.g = g;

  for (auto* part : {&split.core, &split.one_body, &split.two_body}) {
    part->provenance = ham.provenance;
    part->default_sector = ham.default_sector;
  }
  return split;
}

Eigen::VectorXd sorted_eigenvalues(const Eigen::MatrixXd& sym) {
  if (sym.rows() == 0) return Eigen::VectorXd();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  return eig.eigenvalues();
}

double fill_lowest(const Eigen::VectorXd& ascending, int n_fill) {
  return n_fill <= 0 ? 0.0 : ascending.head(n_fill).sum();
}

double fill_highest(const Eigen::VectorXd& ascending, int n_fill) {
  return n_fill <= 0 ? 0.0 : ascending.tail(n_fill).sum();
}

FillingExtrema one_body_filling(const Eigen::VectorXd& ascending, const SymmetrySector& sector) {
  require_sector(sector, static_cast<std::size_t>(ascending.size()));
  return {fill_lowest(ascending, sector.n_alpha) + fill_lowest(ascending, sector.n_beta),
          fill_highest(ascending, sector.n_alpha) + fill_highest(ascending, sector.n_beta)};
}

double one_body_sector_gap(const Eigen::MatrixXd& kappa, const SymmetrySector& sector) {
  const auto f = one_body_filling(sorted_eigenvalues(kappa), sector);
  return 0.5 * (f.high - f.low);
}

double seminorm_from_spectrum(const Eigen::VectorXd& values, const SymmetrySector& sector) {
  require_sector(sector, static_cast<std::size_t>(values.size()));
  Eigen::VectorXd v = values;
  std::sort(v.data(), v.data() + v.size());
  const double half_trace = 0.5 * v.sum();
  double total = 0.0;
  for (int fill : {sector.n_alpha, sector.n_beta})
    total += std::max(std::abs(half_trace - fill_lowest(v, fill)), std::abs(half_trace - fill_highest(v, fill)));
  return total;
}

double one_body_seminorm(const Eigen::MatrixXd& kappa, const SymmetrySector& sector) {
  return seminorm_from_spectrum(sorted_eigenvalues(kappa), sector);
}

double two_body_df_sector_bound(const DoubleFactorization& df, const SymmetrySector& sector) {
  double sum = 0.0;
  for (const auto& leaf : df.leaves) {
    const double v = seminorm_from_spectrum(leaf.alpha, sector);
    sum += v * v;
  }
  return 0.25 * sum;
}

DoubleFactorization double_factorize(const Tensor4& g, double tol) {
  const std::size_t n = g.extent();
  const auto ni = static_cast<Eigen::Index>(n);
  DoubleFactorization df;
  df.truncation_tol = tol;
  if (n == 0) return df;

  // Orthonormal basis of symmetric matrices: E_pp and (E_pq + E_qp)/sqrt(2), p > q.
  // Working in it keeps every leaf symmetric even when supermatrix eigenvalues
  // are degenerate.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q <= p; ++q) pairs.emplace_back(p, q);
  const auto np = static_cast<Eigen::Index>(pairs.size());
  auto contract = [&](std::size_t i, std::size_t j) {
    const auto [p, q] = pairs[i];
    const auto [r, s] = pairs[j];
    const double fi = p == q ? 1.0 : std::sqrt(0.5);
    const double fj = r == s ? 1.0 : std::sqrt(0.5);
    double acc = g(p, q, r, s);
    if (p != q) acc += g(q, p, r, s);
    if (r != s) acc += g(p, q, s, r);
    if (p != q && r != s) acc += g(q, p, s, r);
    return fi * fj * acc;
  };
  Eigen::MatrixXd super(np, np);
  for (Eigen::Index a = 0; a < np; ++a)
    for (Eigen::Index b = 0; b < np; ++b)
      super(a, b) = contract(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
  super = 0.5 * (super + super.transpose()).eval();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> outer(super);

  // Largest |eigenvalue| first so truncated factorizations keep the dominant leaves.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(np));
  for (Eigen::Index i = 0; i < np; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(outer.eigenvalues()(a)) > std::abs(outer.eigenvalues()(b));
  });

  for (Eigen::Index t : order) {
    const double w = outer.eigenvalues()(t);
    if (std::abs(w) <= tol) continue;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(ni, ni);
    for (Eigen::Index i = 0; i < np; ++i) {
      const auto [p, q] = pairs[static_cast<std::size_t>(i)];
      const double c = outer.eigenvectors()(i, t) * (p == q ? 1.0 : std::sqrt(0.5));
      m(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = c;
      m(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(p)) = c;
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> inner(m);
    DFLeaf leaf;
    leaf.alpha = std::sqrt(std::abs(w)) * inner.eigenvalues();
    leaf.u = inner.eigenvectors();
    leaf.sign = w < 0.0 ? -1 : 1;
    if (w < 0.0) {
      std::ostringstream msg;
      msg << "negative supermatrix eigenvalue " << w << " kept with sign -1";
      df.warnings.push_back(msg.str());
    }
    df.leaves.push_back(std::move(leaf));
  }

  const Tensor4 back = df.reconstruct(n);
  double err = 0.0;
  for (std::size_t i = 0; i < back.size(); ++i) err = std::max(err, std::abs(back.data()[i] - g.data()[i]));
  df.reconstruction_error = err;
  if (err > tol * std::max(1.0, g.max_abs())) {
    std::ostringstream msg;
    msg << "reconstruction error " << err << " exceeds truncation tolerance";
    df.warnings.push_back(msg.str());
  }
  return df;
}

Tensor4 DoubleFactorization::reconstruct(std::size_t n_orb) const {
  const auto ni = static_cast<Eigen::Index>(n_orb);
  const Eigen::Index nn = ni * ni;
  Eigen::MatrixXd super = Eigen::MatrixXd::Zero(nn, nn);
  for (const auto& leaf : leaves) {
    const Eigen::MatrixXd m = leaf.u * leaf.alpha.asDiagonal() * leaf.u.transpose();
    Eigen::VectorXd v(nn);
    for (Eigen::Index p = 0; p < ni; ++p)
      for (Eigen::Index q = 0; q < ni; ++q) v(p * ni + q) = m(p, q);
    super.noalias() += static_cast<double>(leaf.sign) * v * v.transpose();
  }
  Tensor4 out(n_orb);
  for (Eigen::Index a = 0; a < nn; ++a)
    for (Eigen::Index b = 0; b < nn; ++b) out.data()[static_cast<std::size_t>(a * nn + b)] = super(a, b);
  return out;
}

nlohmann::json DoubleFactorization::to_json() const {
  nlohmann::json leaves_json = nlohmann::json::array();
  for (const auto& leaf : leaves) {
    std::vector<double> u_flat;
    u_flat.reserve(static_cast<std::size_t>(leaf.u.size()));
    for (Eigen::Index p = 0; p < leaf.u.rows(); ++p)
      for (Eigen::Index k = 0; k < leaf.u.cols(); ++k) u_flat.push_back(leaf.u(p, k));
    leaves_json.push_back({{"alpha", std::vector<double>(leaf.alpha.data(), leaf.alpha.data() + leaf.alpha.size())},
                           {"U", u_flat},
                           {"sign", leaf.sign}});
  }
  return {{"truncation_tol", truncation_tol},
          {"reconstruction_error", reconstruction_error},
          {"leaves", leaves_json},
          {"warnings", warnings}};
}

}  // namespace specbound
