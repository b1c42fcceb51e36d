#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace specbound {

/// Thrown for malformed or inconsistent user input (files, flags, sectors).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense rank-4 tensor of extent n in every index, row-major
/// (index (((p*n+q)*n+r)*n+s)).
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(std::size_t n) : n_(n), data_(n * n * n * n, 0.0) {}

  std::size_t extent() const noexcept { return n_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t p, std::size_t q, std::size_t r, std::size_t s) noexcept {
    return data_[((p * n_ + q) * n_ + r) * n_ + s];
  }
  double operator()(std::size_t p, std::size_t q, std::size_t r, std::size_t s) const noexcept {
    return data_[((p * n_ + q) * n_ + r) * n_ + s];
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  /// Writes v to all eight index permutations related by (pq|rs) symmetry.
  void set_symmetric(std::size_t p, std::size_t q, std::size_t r, std::size_t s, double v) noexcept;

  double max_abs() const noexcept;
  Tensor4 scaled(double c) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Electron counts labelling an (N, S_z) block.
struct SymmetrySector {
  int n_alpha = 0;
  int n_beta = 0;

  int electrons() const noexcept { return n_alpha + n_beta; }
  /// Spin quantum number of a restricted open-shell determinant.
  double spin() const noexcept { return std::abs(n_alpha - n_beta) / 2.0; }
  bool valid_for(std::size_t n_orb) const noexcept {
    return n_alpha >= 0 && n_beta >= 0 && n_alpha <= static_cast<int>(n_orb) &&
           n_beta <= static_cast<int>(n_orb);
  }
  SymmetrySector mirrored() const noexcept { return {n_beta, n_alpha}; }
  SymmetrySector canonical() const noexcept {
    return n_alpha >= n_beta ? *this : mirrored();
  }
  std::string label() const { return std::to_string(n_alpha) + "," + std::to_string(n_beta); }

  friend auto operator<=>(const SymmetrySector&, const SymmetrySector&) = default;
};

/// Parses "a,b".
SymmetrySector parse_sector(const std::string& text);

/// Throws InputError when the sector does not fit n_orb spatial orbitals.
void require_sector(const SymmetrySector& sector, std::size_t n_orb);

struct Provenance {
  std::string path;
  std::string format;
  std::string checksum;  // sha256 hex of the source bytes
};

/// Spin-free electronic Hamiltonian in a real orthonormal spatial-orbital basis,
///   H = e_const + sum_pq h_pq E_pq + 1/2 sum_pqrs g_pqrs (E_pq E_rs - delta_qr E_ps),
/// with g in chemist notation (pq|rs).
struct SpinFreeHamiltonian {
  std::size_t n_orb = 0;
  double e_const = 0.0;
  Eigen::MatrixXd h;
  Tensor4 g;
  Provenance provenance;
  /// Electron counts suggested by the input file, if it carried any.
  std::optional<SymmetrySector> default_sector;

  static SpinFreeHamiltonian zeros(std::size_t n_orb);

  /// Same operator with h and g multiplied by c and e_const by c_const.
  SpinFreeHamiltonian scaled(double c, double c_const) const;
};

}  // namespace specbound
