#pragma once

#include "specbound/hamiltonian.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>

namespace specbound {

/// Real orbital rotation exp(-kappa), parameterized by the strict lower
/// triangle of the antisymmetric generator kappa (row-major: (1,0), (2,0),
/// (2,1), (3,0), ...), with kappa_qp = -kappa_pq.
class OrbitalRotation {
 public:
  OrbitalRotation() = default;
  explicit OrbitalRotation(std::size_t n_orb);
  OrbitalRotation(std::size_t n_orb, Eigen::VectorXd params);

  static std::size_t param_count(std::size_t n_orb) { return n_orb * (n_orb - (n_orb > 0 ? 1 : 0)) / 2; }

  std::size_t n_orb() const noexcept { return n_; }
  const Eigen::VectorXd& params() const noexcept { return params_; }
  const Eigen::MatrixXd& unitary() const noexcept { return u_; }
  Eigen::MatrixXd generator() const;

 private:
  std::size_t n_ = 0;
  Eigen::VectorXd params_;
  Eigen::MatrixXd u_;
};

Eigen::MatrixXd kappa_from_params(std::size_t n_orb, const Eigen::VectorXd& params);

/// exp(-kappa) through the Hermitian eigenproblem of i*kappa.
Eigen::MatrixXd expm_antisymmetric(std::size_t n_orb, const Eigen::VectorXd& params);

/// Pulls a gradient dE/dU back to the parameters of U = exp(-kappa(params)).
Eigen::VectorXd pullback_gradient(std::size_t n_orb, const Eigen::VectorXd& params, const Eigen::MatrixXd& de_du);

/// h'_ij = sum_pq h_pq U_pi U_qj and the four-index analogue (staged O(n^5)).
/// Throws InputError if U is not orthogonal to 1e-8.
std::pair<Eigen::MatrixXd, Tensor4> transform_integrals(const Eigen::MatrixXd& h, const Tensor4& g,
                                                        const Eigen::MatrixXd& u);

/// Restricted open-shell single-determinant energy with the first n_alpha
/// (n_beta) columns of exp(-kappa) occupied for spin up (down).
double hf_energy(const SpinFreeHamiltonian& ham, const OrbitalRotation& rot, const SymmetrySector& sector);

/// Same energy evaluated literally from the transformed integrals; O(n^5).
double hf_energy_from_transformed(const SpinFreeHamiltonian& ham, const OrbitalRotation& rot,
                                  const SymmetrySector& sector);

/// Analytic gradient of hf_energy with respect to OrbitalRotation::params().
Eigen::VectorXd hf_gradient(const SpinFreeHamiltonian& ham, const OrbitalRotation& rot, const SymmetrySector& sector);

/// Energy and gradient at params in one pass.
std::pair<double, Eigen::VectorXd> hf_energy_and_gradient(const SpinFreeHamiltonian& ham,
                                                          const Eigen::VectorXd& params,
                                                          const SymmetrySector& sector);

struct OptimizerSettings {
  double grad_tol = 1e-7;     // Hartree/param, max-abs
  double energy_tol = 1e-9;   // Hartree
  int max_iter = 2000;
  int restarts = 4;
  std::uint64_t seed = 12345;
  double restart_sigma = 0.1;
  int lbfgs_memory = 10;
  std::string line_search = "strong-wolfe";

  void validate() const;
};

enum class ExtremumKind { min, max };

struct SectorExtremum {
  SymmetrySector sector;
  ExtremumKind kind = ExtremumKind::min;
  double energy = 0.0;
  OrbitalRotation rotation;
  bool converged = false;
  double grad_norm = 0.0;
  int restarts_used = 0;
  int iterations = 0;  // of the run that produced `energy`
};

/// Per-iteration trace callback: (iteration, energy, grad_norm, step).
using TraceFn = std::function<void(int, double, double, double)>;

SectorExtremum minimize_sector(const SpinFreeHamiltonian& ham, const SymmetrySector& sector,
                               const OptimizerSettings& settings, const TraceFn& trace = {});

/// e_const minus the minimum of the determinant energy of (-h, -g).
SectorExtremum maximize_sector(const SpinFreeHamiltonian& ham, const SymmetrySector& sector,
                               const OptimizerSettings& settings, const TraceFn& trace = {});

/// Writes "iter,energy,grad_norm,step" CSV rows.
TraceFn csv_trace(std::ostream& out);

}  // namespace specbound
