#pragma once

#include "specbound/hamiltonian.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace specbound {

/// Determinants of one (n_alpha, n_beta) block. Strings are occupation
/// bitmasks in ascending integer order; the determinant with strings (a, b) is
///   a+_{a1} a+_{a2} ... b+_{b1} b+_{b2} ... |0>,   a1 < a2 < ..., b1 < b2 < ...
/// (alpha operators left of beta operators, ascending index left to right) and
/// sits at position index(a) * beta_strings.size() + index(b).
struct DeterminantBasis {
  std::size_t n_orb = 0;
  SymmetrySector sector;
  std::vector<std::uint64_t> alpha_strings;
  std::vector<std::uint64_t> beta_strings;

  std::size_t dim() const noexcept { return alpha_strings.size() * beta_strings.size(); }
  /// Position of a string among all strings with the same popcount.
  static std::size_t string_index(std::uint64_t bits);
};

inline constexpr std::size_t kDefaultFciCap = 2'000'000;

/// Throws InputError naming the dimension when it exceeds cap.
DeterminantBasis enumerate_determinants(std::size_t n_orb, const SymmetrySector& sector,
                                        std::size_t cap = kDefaultFciCap);

/// Hamiltonian restricted to one determinant block, ready for repeated products.
class FciOperator {
 public:
  FciOperator(const SpinFreeHamiltonian& ham, DeterminantBasis basis);

  const DeterminantBasis& basis() const noexcept { return basis_; }
  std::size_t dim() const noexcept { return basis_.dim(); }

  /// y = H x, parallel over alpha strings.
  void apply(std::span<const double> x, std::span<double> y) const;
  /// Same product in a single thread.
  void apply_serial(std::span<const double> x, std::span<double> y) const;

  Eigen::MatrixXd dense() const;
  double diagonal(std::size_t index) const;

  struct Excitation {
    std::uint32_t target;  // string index after a+_p a_q
    std::uint32_t pq;      // p * n + q
    double sign;
  };
  struct SparseEntry {
    std::uint32_t column;
    double value;
  };

 private:
  template <class Visit>
  void visit_row(std::size_t ia, std::size_t ib, Visit&& visit) const;
  void apply_rows(std::size_t ia_begin, std::size_t ia_end, std::span<const double> x, std::span<double> y) const;

  DeterminantBasis basis_;
  double e_const_ = 0.0;
  std::vector<double> g_pair_;  // g as an (n^2 x n^2) row-major matrix
  std::vector<std::vector<Excitation>> alpha_exc_;
  std::vector<std::vector<Excitation>> beta_exc_;
  std::vector<std::vector<SparseEntry>> alpha_op_;  // one-body + same-spin two-body
  std::vector<std::vector<SparseEntry>> beta_op_;
};

/// y = H x on the block spanned by basis.
Eigen::VectorXd apply_hamiltonian(const SpinFreeHamiltonian& ham, const DeterminantBasis& basis,
                                  const Eigen::VectorXd& x);

struct FciOptions {
  std::size_t cap = kDefaultFciCap;
  std::size_t dense_threshold = 2000;
  int max_lanczos = 500;
  double residual_tol = 1e-9;
};

struct SpectrumResult {
  SymmetrySector sector;
  double e_min = 0.0;
  double e_max = 0.0;
  std::string method;  // "dense" or "iterative"
  double residual_min = 0.0;
  double residual_max = 0.0;
  std::size_t dim = 0;
  int iterations = 0;
  bool converged = true;

  nlohmann::json to_json() const;
};

SpectrumResult extremal_eigenvalues(const SpinFreeHamiltonian& ham, const SymmetrySector& sector,
                                    const FciOptions& options = {});

/// Expectation of S^2 for a normalized vector in the block.
double s2_matrix_element(const DeterminantBasis& basis, const Eigen::VectorXd& x);

/// Expansion of the determinant built from the first n_alpha / n_beta columns
/// of an orbital matrix U (coefficients are products of minors).
Eigen::VectorXd rotated_determinant(const DeterminantBasis& basis, const Eigen::MatrixXd& u);

}  // namespace specbound
