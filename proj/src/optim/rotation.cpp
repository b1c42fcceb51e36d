#include "specbound/kernels.hpp"
#include "specbound/orbital.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <sstream>

namespace specbound {

namespace {

struct AntisymmetricExp {
  Eigen::MatrixXcd v;     // eigenvectors of i*kappa
  Eigen::VectorXd theta;  // eigenvalues of i*kappa; exp(-kappa) has eigenvalues exp(i*theta)
  Eigen::MatrixXd u;
};

AntisymmetricExp decompose(std::size_t n_orb, const Eigen::VectorXd& params) {
  const Eigen::MatrixXd kappa = kappa_from_params(n_orb, params);
  AntisymmetricExp out;
  const auto n = static_cast<Eigen::Index>(n_orb);
  if (params.size() == 0 || params.cwiseAbs().maxCoeff() == 0.0) {
    out.v = Eigen::MatrixXcd::Identity(n, n);
    out.theta = Eigen::VectorXd::Zero(n);
    out.u = Eigen::MatrixXd::Identity(n, n);
    return out;
  }
  const Eigen::MatrixXcd herm = std::complex<double>(0.0, 1.0) * kappa.cast<std::complex<double>>();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(herm);
  out.v = eig.eigenvectors();
  out.theta = eig.eigenvalues();
  Eigen::VectorXcd phase(n);
  for (Eigen::Index a = 0; a < n; ++a) phase(a) = std::polar(1.0, out.theta(a));
  out.u = (out.v * phase.asDiagonal() * out.v.adjoint()).real();
  return out;
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

Eigen::VectorXd pullback(const AntisymmetricExp& e, const Eigen::MatrixXd& de_du) {
  const auto n = e.v.rows();
  const Eigen::MatrixXcd ghat = e.v.adjoint() * de_du.cast<std::complex<double>>() * e.v;
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      // divided difference of exp at i*theta_a, i*theta_b, conjugated
      const double mean = 0.5 * (e.theta(a) + e.theta(b));
      const std::complex<double> dd = sinc(0.5 * (e.theta(a) - e.theta(b))) * std::polar(1.0, mean);
      m(a, b) = ghat(a, b) * std::conj(dd);
    }
  const Eigen::MatrixXd de_dkappa = -(e.v * m * e.v.adjoint()).real();
  Eigen::VectorXd grad(static_cast<Eigen::Index>(OrbitalRotation::param_count(static_cast<std::size_t>(n))));
  Eigen::Index k = 0;
  for (Eigen::Index p = 1; p < n; ++p)
    for (Eigen::Index q = 0; q < p; ++q) grad(k++) = de_dkappa(p, q) - de_dkappa(q, p);
  return grad;
}

struct Densities {
  Eigen::MatrixXd alpha;
  Eigen::MatrixXd beta;
};

Densities densities(const Eigen::MatrixXd& u, const SymmetrySector& sector) {
  const auto na = static_cast<Eigen::Index>(sector.n_alpha);
  const auto nb = static_cast<Eigen::Index>(sector.n_beta);
  return {u.leftCols(na) * u.leftCols(na).transpose(), u.leftCols(nb) * u.leftCols(nb).transpose()};
}

}  // namespace

Eigen::MatrixXd kappa_from_params(std::size_t n_orb, const Eigen::VectorXd& params) {
  const auto n = static_cast<Eigen::Index>(n_orb);
  if (static_cast<std::size_t>(params.size()) != OrbitalRotation::param_count(n_orb))
    throw InputError("rotation parameter count " + std::to_string(params.size()) + " does not match " +
                     std::to_string(OrbitalRotation::param_count(n_orb)) + " for " + std::to_string(n_orb) +
                     " orbitals");
  Eigen::MatrixXd kappa = Eigen::MatrixXd::Zero(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index p = 1; p < n; ++p)
    for (Eigen::Index q = 0; q < p; ++q) {
      kappa(p, q) = params(k);
      kappa(q, p) = -params(k);
      ++k;
    }
  return kappa;
}

Eigen::MatrixXd expm_antisymmetric(std::size_t n_orb, const Eigen::VectorXd& params) {
  return decompose(n_orb, params).u;
}

Eigen::VectorXd pullback_gradient(std::size_t n_orb, const Eigen::VectorXd& params, const Eigen::MatrixXd& de_du) {
  return pullback(decompose(n_orb, params), de_du);
}

OrbitalRotation::OrbitalRotation(std::size_t n_orb)
    : n_(n_orb),
      params_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(param_count(n_orb)))),
      u_(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n_orb), static_cast<Eigen::Index>(n_orb))) {}

OrbitalRotation::OrbitalRotation(std::size_t n_orb, Eigen::VectorXd params)
    : n_(n_orb), params_(std::move(params)), u_(expm_antisymmetric(n_orb, params_)) {}

Eigen::MatrixXd OrbitalRotation::generator() const { return kappa_from_params(n_, params_); }

std::pair<Eigen::MatrixXd, Tensor4> transform_integrals(const Eigen::MatrixXd& h, const Tensor4& g,
                                                        const Eigen::MatrixXd& u) {
  const auto n = u.rows();
  if (u.cols() != n || h.rows() != n || static_cast<Eigen::Index>(g.extent()) != n)
    throw InputError("transform_integrals: dimension mismatch");
  const double dev = n == 0 ? 0.0 : (u.transpose() * u - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (dev > 1e-8) {
    std::ostringstream msg;
    msg << "transform_integrals: matrix is not orthogonal (max |U^T U - I| = " << dev << ")";
    throw InputError(msg.str());
  }
  return {u.transpose() * h * u, kernels::transform4(g, u)};
}

std::pair<double, Eigen::VectorXd> hf_energy_and_gradient(const SpinFreeHamiltonian& ham,
                                                          const Eigen::VectorXd& params,
                                                          const SymmetrySector& sector) {
  require_sector(sector, ham.n_orb);
  const auto e = decompose(ham.n_orb, params);
  const auto d = densities(e.u, sector);
  const Eigen::MatrixXd j = kernels::coulomb(ham.g, d.alpha + d.beta);
  const Eigen::MatrixXd fock_a = ham.h + j - kernels::exchange(ham.g, d.alpha);
  const Eigen::MatrixXd fock_b = ham.h + j - kernels::exchange(ham.g, d.beta);
  const double energy = ham.e_const + 0.5 * ((ham.h + fock_a).cwiseProduct(d.alpha).sum() +
                                             (ham.h + fock_b).cwiseProduct(d.beta).sum());

  const auto n = static_cast<Eigen::Index>(ham.n_orb);
  Eigen::MatrixXd de_du = Eigen::MatrixXd::Zero(n, n);
  const auto na = static_cast<Eigen::Index>(sector.n_alpha);
  const auto nb = static_cast<Eigen::Index>(sector.n_beta);
  de_du.leftCols(na) += 2.0 * fock_a * e.u.leftCols(na);
  de_du.leftCols(nb) += 2.0 * fock_b * e.u.leftCols(nb);
  return {energy, pullback(e, de_du)};
}

double hf_energy(const SpinFreeHamiltonian& ham, const OrbitalRotation& rot, const SymmetrySector& sector) {
  require_sector(sector, ham.n_orb);
  const auto d = densities(rot.unitary(), sector);
  const Eigen::MatrixXd j = kernels::coulomb(ham.g, d.alpha + d.beta);
  const Eigen::MatrixXd fock_a = ham.h + j - kernels::exchange(ham.g, d.alpha);
  const Eigen::MatrixXd fock_b = ham.h + j - kernels::exchange(ham.g, d.beta);
  return ham.e_const + 0.5 * ((ham.h + fock_a).cwiseProduct(d.alpha).sum() +
                              (ham.h + fock_b).cwiseProduct(d.beta).sum());
}

Eigen::VectorXd hf_gradient(const SpinFreeHamiltonian& ham, const OrbitalRotation& rot, const SymmetrySector& sector) {
  return hf_energy_and_gradient(ham, rot.params(), sector).second;
}

double hf_energy_from_transformed(const SpinFreeHamiltonian& ham, const OrbitalRotation& rot,
                                  const SymmetrySector& sector) {
  require_sector(sector, ham.n_orb);
  const auto [h, g] = transform_integrals(ham.h, ham.g, rot.unitary());
  const int na = sector.n_alpha;
  const int nb = sector.n_beta;
  double one = 0.0;
  for (int i = 0; i < na; ++i) one += h(i, i);
  for (int i = 0; i < nb; ++i) one += h(i, i);
  auto coulomb_block = [&](int m, int k) {
    double s = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < k; ++j)
        s += g(static_cast<std::size_t>(i), static_cast<std::size_t>(i), static_cast<std::size_t>(j),
               static_cast<std::size_t>(j));
    return s;
  };
  auto exchange_block = [&](int m) {
    double s = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        s += g(static_cast<std::size_t>(i), static_cast<std::size_t>(j), static_cast<std::size_t>(j),
               static_cast<std::size_t>(i));
    return s;
  };
  const double two = coulomb_block(na, na) + coulomb_block(nb, nb) + 2.0 * coulomb_block(na, nb) -
                     exchange_block(na) - exchange_block(nb);
  return ham.e_const + one + 0.5 * two;
}

}  // namespace specbound
