#pragma once

// Data-parallel inner kernels. Every kernel has a serial twin in
// kernels::serial with identical semantics; the tests compare the two and the
// benchmark target times them against each other.

#include "specbound/hamiltonian.hpp"

#include <Eigen/Dense>

namespace specbound::kernels {

/// g'_ijkl = sum_pqrs g_pqrs C_pi C_qj C_rk C_sl as four one-index passes (O(n^5)).
/// C may be rectangular (n x m); the result has extent m.
Tensor4 transform4(const Tensor4& g, const Eigen::MatrixXd& c);

/// J_pq = sum_rs g_pqrs D_rs
Eigen::MatrixXd coulomb(const Tensor4& g, const Eigen::MatrixXd& d);

/// K_ps = sum_qr g_pqrs D_qr
Eigen::MatrixXd exchange(const Tensor4& g, const Eigen::MatrixXd& d);

/// Replaces every entry by the mean over its (pq|rs) permutation orbit.
void symmetrize(Tensor4& g);

namespace serial {
Tensor4 transform4(const Tensor4& g, const Eigen::MatrixXd& c);
Eigen::MatrixXd coulomb(const Tensor4& g, const Eigen::MatrixXd& d);
Eigen::MatrixXd exchange(const Tensor4& g, const Eigen::MatrixXd& d);
}  // namespace serial

/// Threads available to kernels (1 without OpenMP).
int max_threads();
void set_threads(int n);

}  // namespace specbound::kernels
