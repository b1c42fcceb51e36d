#include "oracles.hpp"
#include "specbound/bounds.hpp"
#include "specbound/fci.hpp"
#include "specbound/io.hpp"
#include "specbound/majorana.hpp"

#include <gtest/gtest.h>

using namespace specbound;

namespace {

SpinFreeHamiltonian sum_of_parts(const MajoranaSplit& s) {
  SpinFreeHamiltonian h = SpinFreeHamiltonian::zeros(s.kappa.rows());
  h.e_const = s.core.e_const + s.one_body.e_const + s.two_body.e_const;
  h.h = s.one_body.h + s.two_body.h;
  h.g = s.two_body.g;
  return h;
}

// 1/2 sum g_pqrs (E_pq - d_pq)(E_rs - d_rs) on the Jordan-Wigner Fock space.
Eigen::MatrixXd two_body_direct(const Tensor4& g) {
  const std::size_t n = g.extent();
  const oracle::Fock fock(n);
  const auto dim = static_cast<Eigen::Index>(fock.dim());
  std::vector<Eigen::MatrixXd> e(n * n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
      for (std::size_t s = 0; s < 2; ++s) m += fock.annihilator(p + s * n).transpose() * fock.annihilator(q + s * n);
      if (p == q) m -= Eigen::MatrixXd::Identity(dim, dim);
      e[p * n + q] = m;
    }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t pq = 0; pq < n * n; ++pq)
    for (std::size_t rs = 0; rs < n * n; ++rs) {
      const double v = g.data()[pq * n * n + rs];
      if (v != 0.0) out += 0.5 * v * e[pq] * e[rs];
    }
  return out;
}

Tensor4 outer4(const Eigen::VectorXd& v) {
  const auto n = static_cast<std::size_t>(v.size());
  Tensor4 g(n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) g(p, q, r, s) = v(p) * v(q) * v(r) * v(s);
  return g;
}

}  // namespace

TEST(MajoranaSplit, ZeroTwoBody) {
  std::mt19937_64 rng(1);
  auto h = oracle::random_hamiltonian(3, rng);
  for (auto& v : h.g.data()) v = 0.0;
  const auto s = majorana_split(h);
  EXPECT_NEAR(s.e_core, h.e_const + h.h.trace(), 1e-12);
  EXPECT_LE((s.kappa - h.h).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(s.two_body.h.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(s.two_body.e_const, 0.0);
  EXPECT_EQ(s.two_body.g.max_abs(), 0.0);
}

TEST(MajoranaSplit, OneOrbitalHandValues) {
  auto h = SpinFreeHamiltonian::zeros(1);
  h.h(0, 0) = -1.0;
  h.g(0, 0, 0, 0) = 0.5;
  const auto s = majorana_split(h);
  EXPECT_NEAR(s.e_core, -1.0, 1e-15);
  EXPECT_NEAR(s.kappa(0, 0), -0.75, 1e-15);
}

TEST(MajoranaSplit, ConstantsSumToOriginal) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto h = oracle::random_hamiltonian(4, rng);
    const auto s = majorana_split(h);
    EXPECT_NEAR(s.core.e_const + s.one_body.e_const + s.two_body.e_const, h.e_const, 1e-10);
    // kappa by its defining formula
    for (std::size_t p = 0; p < 4; ++p)
      for (std::size_t q = 0; q < 4; ++q) {
        double k = h.h(p, q);
        for (std::size_t r = 0; r < 4; ++r) k += -0.5 * h.g(p, r, r, q) + h.g(p, q, r, r);
        EXPECT_NEAR(s.kappa(p, q), k, 1e-12);
      }
  }
}

TEST(MajoranaSplit, TwoBodyComponentMatchesDirectOperator) {
  std::mt19937_64 rng(3);
  for (std::size_t n : {1u, 2u, 3u}) {
    const auto h = oracle::random_hamiltonian(n, rng);
    const auto s = majorana_split(h);
    const oracle::Fock fock(n);
    const Eigen::MatrixXd a = fock.hamiltonian(s.two_body);
    EXPECT_LE((a - two_body_direct(h.g)).cwiseAbs().maxCoeff(), 1e-11) << n;
  }
}

TEST(MajoranaSplit, SpectralReconstructionEverySector) {
  std::mt19937_64 rng(4);
  const auto h = oracle::random_hamiltonian(4, rng);
  const auto parts = sum_of_parts(majorana_split(h));
  for (const auto& sec : canonical_sectors(4)) {
    const auto a = extremal_eigenvalues(h, sec);
    const auto b = extremal_eigenvalues(parts, sec);
    EXPECT_NEAR(a.e_min, b.e_min, 1e-9) << sec.label();
    EXPECT_NEAR(a.e_max, b.e_max, 1e-9) << sec.label();
  }
}

TEST(MajoranaSplit, SpectralReconstructionFixtures) {
  for (const char* name : {"h2_sto6g", "h4_sto6g", "h6_sto6g"}) {
    const auto h = load_hamiltonian(oracle::data_path(std::string(name) + ".fcidump"), InputFormat::fcidump);
    const auto parts = sum_of_parts(majorana_split(h));
    for (const auto& sec : canonical_sectors(h.n_orb)) {
      const auto a = extremal_eigenvalues(h, sec);
      const auto b = extremal_eigenvalues(parts, sec);
      EXPECT_NEAR(a.e_min, b.e_min, 1e-9) << name << " " << sec.label();
      EXPECT_NEAR(a.e_max, b.e_max, 1e-9) << name << " " << sec.label();
    }
  }
}

TEST(DoubleFactorization, RankOneProduct) {
  Eigen::VectorXd v(3);
  v << 0.3, -0.7, 0.5;
  const auto df = double_factorize(outer4(v), 1e-10);
  ASSERT_EQ(df.leaves.size(), 1u);
  const auto& a = df.leaves[0].alpha;
  int nonzero = 0;
  for (Eigen::Index k = 0; k < a.size(); ++k) nonzero += std::abs(a(k)) > 1e-10;
  EXPECT_EQ(nonzero, 1);
  EXPECT_LE(df.reconstruction_error, 1e-12);
}

TEST(DoubleFactorization, DiagonalTwoOrbitals) {
  Tensor4 g(2);
  g(0, 0, 0, 0) = 0.8;
  g(1, 1, 1, 1) = 0.8;
  const auto df = double_factorize(g, 1e-10);
  ASSERT_EQ(df.leaves.size(), 2u);
  for (const auto& leaf : df.leaves) {
    // each leaf is c * e_k e_k^T with c^2 = 0.8
    const Eigen::MatrixXd m = leaf.u * leaf.alpha.asDiagonal() * leaf.u.transpose();
    EXPECT_NEAR(std::abs(m(0, 1)), 0.0, 1e-12);
    EXPECT_NEAR(m(0, 0) * m(0, 0) + m(1, 1) * m(1, 1), 0.8, 1e-12);
  }
  EXPECT_LE(df.reconstruction_error, 1e-12);
}

TEST(DoubleFactorization, FixtureReconstructionAndOrthogonality) {
  for (const char* name : {"h2o_sto6g", "h4_sto6g", "beh2_sto3g"}) {
    const auto h = load_hamiltonian(oracle::data_path(std::string(name) + ".fcidump"), InputFormat::fcidump);
    const auto df = double_factorize(h.g, 1e-10);
    EXPECT_LE(df.reconstruction_error, 1e-8) << name;
    for (const auto& leaf : df.leaves) {
      const auto n = leaf.u.rows();
      EXPECT_LE((leaf.u.transpose() * leaf.u - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);
    }
    const Tensor4 back = df.reconstruct(h.n_orb);
    double err = 0.0;
    for (std::size_t i = 0; i < back.size(); ++i) err = std::max(err, std::abs(back.data()[i] - h.g.data()[i]));
    EXPECT_DOUBLE_EQ(err, df.reconstruction_error);
  }
}

TEST(DoubleFactorization, DegenerateSupermatrix) {
  // identity on symmetric pair space: every symmetric direction has eigenvalue 1
  const std::size_t n = 4;
  Tensor4 g(n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      g(p, q, p, q) += 0.5;
      g(p, q, q, p) += 0.5;
    }
  const auto df = double_factorize(g, 1e-10);
  EXPECT_EQ(df.leaves.size(), n * (n + 1) / 2);
  EXPECT_LE(df.reconstruction_error, 1e-12);
}

TEST(DoubleFactorization, EveryFixtureReconstructs) {
  for (const char* name : {"h6_sto6g", "h8_sto6g", "nh3_sto3g"}) {
    const auto h = load_hamiltonian(oracle::data_path(std::string(name) + ".fcidump"), InputFormat::fcidump);
    EXPECT_LE(double_factorize(h.g, 1e-10).reconstruction_error, 1e-8) << name;
  }
}

TEST(DoubleFactorization, NegativeEigenvalueKeepsSignedLeaf) {
  Eigen::VectorXd v(2);
  v << 1.0, 0.5;
  Tensor4 g = outer4(v).scaled(-1.0);
  const auto df = double_factorize(g, 1e-10);
  ASSERT_EQ(df.leaves.size(), 1u);
  EXPECT_EQ(df.leaves[0].sign, -1);
  EXPECT_FALSE(df.warnings.empty());
  EXPECT_LE(df.reconstruction_error, 1e-12);
}

TEST(DoubleFactorization, JsonExport) {
  Eigen::VectorXd v(2);
  v << 1.0, 0.5;
  const auto j = double_factorize(outer4(v), 1e-10).to_json();
  EXPECT_EQ(j["leaves"].size(), 1u);
  EXPECT_EQ(j["leaves"][0]["U"].size(), 4u);
  EXPECT_TRUE(j.contains("reconstruction_error"));
}

TEST(OneBody, SectorGapHandValues) {
  Eigen::MatrixXd k(2, 2);
  k << -1.0, 0.0, 0.0, 2.0;
  EXPECT_DOUBLE_EQ(one_body_sector_gap(k, {1, 0}), 1.5);
  EXPECT_DOUBLE_EQ(one_body_sector_gap(k, {0, 0}), 0.0);
  EXPECT_THROW(one_body_sector_gap(k, {3, 0}), InputError);
}

TEST(OneBody, SectorGapMatchesOperatorOracle) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 1 + t % 4;
    auto h = SpinFreeHamiltonian::zeros(n);
    h.h = oracle::random_symmetric(n, rng);
    std::uniform_int_distribution<int> fill(0, static_cast<int>(n));
    const SymmetrySector s{fill(rng), fill(rng)};
    const auto ex = oracle::sector_extremes(h, s);
    EXPECT_NEAR(one_body_sector_gap(h.h, s), 0.5 * (ex.max - ex.min), 1e-10) << n << " " << s.label();
  }
}

TEST(OneBody, FillingMatchesSubsetEnumeration) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + t % 6;
    const Eigen::VectorXd lam = sorted_eigenvalues(oracle::random_symmetric(n, rng));
    std::uniform_int_distribution<int> fill(0, static_cast<int>(n));
    const SymmetrySector s{fill(rng), fill(rng)};
    const auto a = oracle::subset_sum_extremes(lam, s.n_alpha);
    const auto b = oracle::subset_sum_extremes(lam, s.n_beta);
    const auto f = one_body_filling(lam, s);
    EXPECT_NEAR(f.low, a.min + b.min, 1e-12);
    EXPECT_NEAR(f.high, a.max + b.max, 1e-12);
  }
}

TEST(OneBody, SeminormHandValues) {
  Eigen::MatrixXd k(2, 2);
  k << -1.0, 0.0, 0.0, 2.0;
  EXPECT_DOUBLE_EQ(one_body_seminorm(k, {1, 0}), 2.0);
  Eigen::MatrixXd sym(2, 2);
  sym << -1.0, 0.0, 0.0, 1.0;
  EXPECT_DOUBLE_EQ(one_body_seminorm(sym, {1, 1}), one_body_sector_gap(sym, {1, 1}));
}

TEST(OneBody, SeminormBoundsGapFromAbove) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + t % 6;
    const Eigen::MatrixXd k = oracle::random_symmetric(n, rng);
    std::uniform_int_distribution<int> fill(0, static_cast<int>(n));
    const SymmetrySector s{fill(rng), fill(rng)};
    EXPECT_GE(one_body_seminorm(k, s), one_body_sector_gap(k, s) - 1e-12);
  }
}

TEST(OneBody, SeminormUpperChainForTracelessKappa) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + t % 6;
    Eigen::MatrixXd k = oracle::random_symmetric(n, rng);
    k -= (k.trace() / static_cast<double>(n)) * Eigen::MatrixXd::Identity(n, n);
    std::uniform_int_distribution<int> fill(0, static_cast<int>(n));
    const SymmetrySector s{fill(rng), fill(rng)};
    const double max_abs = sorted_eigenvalues(k).cwiseAbs().maxCoeff();
    EXPECT_LE(one_body_seminorm(k, s), max_abs * s.electrons() + 1e-12);
  }
}

TEST(OneBody, SeminormUpperChainNeedsTracelessKappa) {
  // With tr(kappa) != 0 the empty sector already has a nonzero semi-norm.
  Eigen::MatrixXd k(2, 2);
  k << 1.0, 0.0, 0.0, 2.0;
  EXPECT_GT(one_body_seminorm(k, {0, 0}), 0.0);
}

TEST(TwoBodyDF, ZeroAndFlatCases) {
  DoubleFactorization empty;
  EXPECT_EQ(two_body_df_sector_bound(empty, {1, 1}), 0.0);
  DoubleFactorization flat;
  DFLeaf leaf;
  leaf.alpha = Eigen::Vector2d(1.0, 1.0);
  leaf.u = Eigen::Matrix2d::Identity();
  flat.leaves.push_back(leaf);
  EXPECT_DOUBLE_EQ(two_body_df_sector_bound(flat, {1, 1}), 0.0);
}

TEST(TwoBodyDF, BoundsFciTwoBodyRange) {
  for (const char* name : {"h2_sto6g", "h4_sto6g"}) {
    const auto h = load_hamiltonian(oracle::data_path(std::string(name) + ".fcidump"), InputFormat::fcidump);
    const auto split = majorana_split(h);
    const auto df = double_factorize(split.two_body.g, 1e-10);
    for (const auto& s : canonical_sectors(h.n_orb)) {
      const auto r = extremal_eigenvalues(split.two_body, s);
      EXPECT_GE(two_body_df_sector_bound(df, s), 0.5 * (r.e_max - r.e_min) - 1e-10) << name << " " << s.label();
    }
  }
}
