#pragma once

#include "specbound/hamiltonian.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace specbound {

/// H = e_core + H_1body + H_2body, where
///   H_1body = (i/2) sum_pq,s kappa_pq gamma_{ps,0} gamma_{qs,1}
///           = sum_pq kappa_pq E_pq - tr(kappa)
///   H_2body = -(1/8) sum g_pqrs gamma_{ps,0} gamma_{qs,1} gamma_{rt,0} gamma_{st,1}
///           = 1/2 sum_pqrs g_pqrs (E_pq - delta_pq)(E_rs - delta_rs).
/// Each piece is also stored as a SpinFreeHamiltonian so the FCI and HF
/// machinery apply to it unchanged.
struct MajoranaSplit {
  double e_core = 0.0;
  Eigen::MatrixXd kappa;
  SpinFreeHamiltonian core;      // constant only
  SpinFreeHamiltonian one_body;  // e_const = -tr(kappa), h = kappa, g = 0
  SpinFreeHamiltonian two_body;  // e_const = 1/2 sum g_pprr, h = 1/2 sum_r g_prrq - sum_r g_pqrr
};

MajoranaSplit majorana_split(const SpinFreeHamiltonian& ham);

/// One leaf of g_pqrs = sum_t sign_t sum_kl alpha_k alpha_l U_pk U_qk U_rl U_sl.
struct DFLeaf {
  Eigen::VectorXd alpha;  // ascending
  Eigen::MatrixXd u;      // orthogonal, columns match alpha
  int sign = 1;           // -1 for a negative eigenvalue of the (pq),(rs) supermatrix
};

struct DoubleFactorization {
  std::vector<DFLeaf> leaves;
  double truncation_tol = 0.0;
  double reconstruction_error = 0.0;  // max-abs over all entries
  std::vector<std::string> warnings;

  Tensor4 reconstruct(std::size_t n_orb) const;
  nlohmann::json to_json() const;
};

/// Two-stage eigendecomposition of g. Leaves with |eigenvalue| <= tol are dropped.
DoubleFactorization double_factorize(const Tensor4& g, double tol);

/// Ascending eigenvalues of a symmetric matrix.
Eigen::VectorXd sorted_eigenvalues(const Eigen::MatrixXd& sym);

/// Lowest / highest sum of n_fill values of an ascending list.
double fill_lowest(const Eigen::VectorXd& ascending, int n_fill);
double fill_highest(const Eigen::VectorXd& ascending, int n_fill);

/// Exact extremes of sum_pq kappa_pq E_pq (no constant) in a sector.
struct FillingExtrema {
  double low = 0.0;
  double high = 0.0;
};
FillingExtrema one_body_filling(const Eigen::VectorXd& ascending, const SymmetrySector& sector);

/// Half the exact spectral range of H_1body in the sector.
double one_body_sector_gap(const Eigen::MatrixXd& kappa, const SymmetrySector& sector);

/// Fermionic semi-norm of H_1body in the sector, summed per spin channel.
double one_body_seminorm(const Eigen::MatrixXd& kappa, const SymmetrySector& sector);

/// Same expression with an arbitrary spectrum in place of eig(kappa).
double seminorm_from_spectrum(const Eigen::VectorXd& values, const SymmetrySector& sector);

/// 1/4 sum_t ||v_t||_mu^2, an upper bound on half the H_2body range.
double two_body_df_sector_bound(const DoubleFactorization& df, const SymmetrySector& sector);

}  // namespace specbound
