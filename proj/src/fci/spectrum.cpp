#include "specbound/fci.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

namespace specbound {

namespace {

SpectrumResult dense_extremes(const FciOperator& op) {
  SpectrumResult r;
  const Eigen::MatrixXd m = op.dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
  r.e_min = es.eigenvalues()(0);
  r.e_max = es.eigenvalues()(es.eigenvalues().size() - 1);
  r.method = "dense";
  return r;
}

// Lanczos with full reorthogonalization; both ends come from one Krylov space.
SpectrumResult lanczos_extremes(const FciOperator& op, const FciOptions& opts) {
  const auto d = static_cast<Eigen::Index>(op.dim());
  const int max_k = static_cast<int>(std::min<Eigen::Index>(opts.max_lanczos, d));
  std::vector<Eigen::VectorXd> v;  // grown on demand; large blocks rarely need many vectors
  v.reserve(static_cast<std::size_t>(max_k) + 1);
  v.emplace_back(d);
  std::vector<double> alpha;
  std::vector<double> beta;

  std::mt19937_64 rng(0x5eedf00dULL);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (Eigen::Index i = 0; i < d; ++i) v[0](i) = uni(rng);
  v[0].normalize();

  SpectrumResult r;
  r.method = "iterative";
  r.converged = false;
  Eigen::VectorXd w(d);
  double scale = 0.0;
  for (int k = 0; k < max_k; ++k) {
    op.apply({v[k].data(), static_cast<std::size_t>(d)}, {w.data(), static_cast<std::size_t>(d)});
    const double a = v[k].dot(w);
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& vj : v) w -= vj.dot(w) * vj;
    }
    const double b = w.norm();
    scale = std::max({scale, std::abs(a), b});
    const int m = k + 1;
    const bool exhausted = b <= 1e-12 * std::max(scale, 1.0) || m == d;
    const bool check = exhausted || m == max_k || m < 50 || m % 5 == 0;
    if (check) {
      Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
      Eigen::VectorXd off = Eigen::VectorXd::Zero(std::max(m - 1, 0));
      for (int i = 0; i + 1 < m; ++i) off(i) = beta[static_cast<std::size_t>(i)];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
      es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
      const auto& s = es.eigenvectors();
      r.e_min = es.eigenvalues()(0);
      r.e_max = es.eigenvalues()(m - 1);
      r.residual_min = exhausted ? 0.0 : b * std::abs(s(m - 1, 0));
      r.residual_max = exhausted ? 0.0 : b * std::abs(s(m - 1, m - 1));
      r.iterations = m;
      if (exhausted || (r.residual_min <= opts.residual_tol && r.residual_max <= opts.residual_tol)) {
        r.converged = true;
        return r;
      }
    }
    beta.push_back(b);
    v.emplace_back(w / b);
  }
  return r;
}

}  // namespace

SpectrumResult extremal_eigenvalues(const SpinFreeHamiltonian& ham, const SymmetrySector& sector,
                                    const FciOptions& options) {
  FciOperator op(ham, enumerate_determinants(ham.n_orb, sector, options.cap));
  SpectrumResult r = op.dim() <= options.dense_threshold ? dense_extremes(op) : lanczos_extremes(op, options);
  r.sector = sector;
  r.dim = op.dim();
  return r;
}

nlohmann::json SpectrumResult::to_json() const {
  return {{"sector", {sector.n_alpha, sector.n_beta}},
          {"e_min", e_min},
          {"e_max", e_max},
          {"method", method},
          {"residual_min", residual_min},
          {"residual_max", residual_max},
          {"dim", dim},
          {"iterations", iterations},
          {"converged", converged}};
}

}  // namespace specbound
