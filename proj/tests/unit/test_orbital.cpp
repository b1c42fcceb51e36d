#include "oracles.hpp"
#include "specbound/bounds.hpp"
#include "specbound/fci.hpp"
#include "specbound/io.hpp"
#include "specbound/majorana.hpp"
#include "specbound/orbital.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace specbound;

namespace {

std::size_t pair_index(std::size_t p, std::size_t q) { return p * (p - 1) / 2 + q; }  // p > q

Eigen::VectorXd random_params(std::size_t n, std::mt19937_64& rng, double sigma = 0.5) {
  std::normal_distribution<double> normal(0.0, sigma);
  Eigen::VectorXd x(static_cast<Eigen::Index>(OrbitalRotation::param_count(n)));
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = normal(rng);
  return x;
}

SymmetrySector random_sector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> fill(0, static_cast<int>(n));
  return {fill(rng), fill(rng)};
}

// <D|H|D> with D expanded in the determinant basis.
double determinant_expectation(const SpinFreeHamiltonian& h, const Eigen::MatrixXd& u, const SymmetrySector& s) {
  const auto basis = enumerate_determinants(h.n_orb, s);
  const Eigen::VectorXd d = rotated_determinant(basis, u);
  return d.dot(apply_hamiltonian(h, basis, d));
}

// Same through the Jordan-Wigner oracle.
double determinant_expectation_jw(const SpinFreeHamiltonian& h, const Eigen::MatrixXd& u, const SymmetrySector& s) {
  const auto basis = enumerate_determinants(h.n_orb, s);
  const Eigen::VectorXd d = rotated_determinant(basis, u);
  const oracle::Fock fock(h.n_orb);
  return d.dot(fock.block(fock.hamiltonian(h), s) * d);
}

}  // namespace

TEST(Expm, ZeroIsIdentity) {
  const auto u = expm_antisymmetric(4, Eigen::VectorXd::Zero(6));
  EXPECT_LE((u - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Expm, SingleAngleClosedForm) {
  for (double th : {0.3, -1.1, 2.9}) {
    const auto u = expm_antisymmetric(2, Eigen::VectorXd::Constant(1, th));
    Eigen::Matrix2d ref;
    ref << std::cos(th), std::sin(th), -std::sin(th), std::cos(th);
    EXPECT_LE((u - ref).cwiseAbs().maxCoeff(), 1e-12) << th;
  }
}

TEST(Expm, InverseOrthogonalAndProper) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 2 + t % 5;
    const auto x = random_params(n, rng, 1.0);
    const auto u = expm_antisymmetric(n, x);
    const auto v = expm_antisymmetric(n, -x);
    const auto id = Eigen::MatrixXd::Identity(n, n);
    EXPECT_LE((u * v - id).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((u.transpose() * u - id).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(u.determinant(), 1.0, 1e-10);
  }
}

TEST(Expm, GeneratorIsAntisymmetric) {
  std::mt19937_64 rng(2);
  const auto x = random_params(4, rng);
  const OrbitalRotation rot(4, x);
  const auto k = rot.generator();
  EXPECT_LE((k + k.transpose()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_DOUBLE_EQ(k(2, 1), x(static_cast<Eigen::Index>(pair_index(2, 1))));
  EXPECT_DOUBLE_EQ(k(1, 2), -x(static_cast<Eigen::Index>(pair_index(2, 1))));
}

TEST(TransformIntegrals, IdentityMap) {
  std::mt19937_64 rng(3);
  const auto h = oracle::random_hamiltonian(4, rng);
  const auto [h2, g2] = transform_integrals(h.h, h.g, Eigen::MatrixXd::Identity(4, 4));
  EXPECT_LE((h2 - h.h).cwiseAbs().maxCoeff(), 1e-14);
  for (std::size_t i = 0; i < g2.size(); ++i) EXPECT_LE(std::abs(g2.data()[i] - h.g.data()[i]), 1e-14);
}

TEST(TransformIntegrals, PermutationIsExact) {
  std::mt19937_64 rng(4);
  const auto h = oracle::random_hamiltonian(3, rng);
  const std::array<std::size_t, 3> perm{2, 0, 1};
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(3, 3);
  for (std::size_t i = 0; i < 3; ++i) u(perm[i], i) = 1.0;  // new orbital i is old orbital perm[i]
  const auto [h2, g2] = transform_integrals(h.h, h.g, u);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_EQ(h2(i, j), h.h(perm[i], perm[j]));
      for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t l = 0; l < 3; ++l) EXPECT_EQ(g2(i, j, k, l), h.g(perm[i], perm[j], perm[k], perm[l]));
    }
}

TEST(TransformIntegrals, MatchesNaiveContraction) {
  std::mt19937_64 rng(5);
  const auto h = oracle::random_hamiltonian(4, rng);
  const auto u = oracle::random_orthogonal(4, rng);
  const auto [h2, g2] = transform_integrals(h.h, h.g, u);
  const auto ref = oracle::naive_transform(h.g, u);
  for (std::size_t i = 0; i < g2.size(); ++i) EXPECT_NEAR(g2.data()[i], ref.data()[i], 1e-11);
  EXPECT_LE((h2 - u.transpose() * h.h * u).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((h2 - h2.transpose()).cwiseAbs().maxCoeff(), 1e-10);
  SpinFreeHamiltonian t = SpinFreeHamiltonian::zeros(4);
  t.h = h2;
  t.g = g2;
  EXPECT_TRUE(validate_tensor_symmetry(t, 1e-10).pass);
}

TEST(TransformIntegrals, RejectsNonOrthogonal) {
  std::mt19937_64 rng(6);
  const auto h = oracle::random_hamiltonian(3, rng);
  Eigen::MatrixXd u = Eigen::MatrixXd::Identity(3, 3);
  u(0, 1) = 1e-6;
  EXPECT_THROW(transform_integrals(h.h, h.g, u), InputError);
}

TEST(HfEnergy, DiagonalOneBody) {
  auto h = SpinFreeHamiltonian::zeros(2);
  h.e_const = 0.25;
  h.h(0, 0) = -1.0;
  h.h(1, 1) = -0.5;
  EXPECT_NEAR(hf_energy(h, OrbitalRotation(2), {1, 1}), 0.25 - 2.0, 1e-15);
}

TEST(HfEnergy, OneOrbitalCoulomb) {
  auto h = SpinFreeHamiltonian::zeros(1);
  h.e_const = 0.1;
  h.h(0, 0) = -1.0;
  h.g(0, 0, 0, 0) = 0.8;
  EXPECT_NEAR(hf_energy(h, OrbitalRotation(1), {1, 1}), 0.1 - 2.0 + 0.8, 1e-15);
  EXPECT_NEAR(hf_energy(h, OrbitalRotation(1), {1, 0}), 0.1 - 1.0, 1e-15);
}

TEST(HfEnergy, MatchesDeterminantExpectation) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 2 + t % 3;
    const auto h = oracle::random_hamiltonian(n, rng);
    const auto s = random_sector(n, rng);
    const OrbitalRotation rot(n, random_params(n, rng));
    const double e = hf_energy(h, rot, s);
    EXPECT_NEAR(e, determinant_expectation(h, rot.unitary(), s), 1e-10);
    EXPECT_NEAR(e, hf_energy_from_transformed(h, rot, s), 1e-10);
    if (n <= 3) EXPECT_NEAR(e, determinant_expectation_jw(h, rot.unitary(), s), 1e-10);
  }
}

TEST(HfGradient, FiniteDifferences) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 2 + t % 4;
    const auto h = oracle::random_hamiltonian(n, rng);
    const auto s = random_sector(n, rng);
    const auto x = random_params(n, rng);
    const auto g = hf_gradient(h, OrbitalRotation(n, x), s);
    const auto fd = oracle::finite_difference([&](const Eigen::VectorXd& y) { return hf_energy(h, OrbitalRotation(n, y), s); }, x);
    const auto [e2, g2] = hf_energy_and_gradient(h, x, s);
    EXPECT_NEAR(e2, hf_energy(h, OrbitalRotation(n, x), s), 1e-12);
    EXPECT_LE((g2 - g).cwiseAbs().maxCoeff(), 1e-12);
    for (Eigen::Index i = 0; i < g.size(); ++i)
      EXPECT_LE(std::abs(g(i) - fd(i)), 1e-6 * std::max(1.0, std::abs(fd(i)))) << t << " " << i;
  }
}

TEST(HfGradient, OccupiedOccupiedComponentsVanish) {
  auto h = SpinFreeHamiltonian::zeros(4);
  h.h.diagonal() << -2.0, -1.0, 0.5, 1.5;
  const auto g = hf_gradient(h, OrbitalRotation(4), {2, 2});
  EXPECT_EQ(g(static_cast<Eigen::Index>(pair_index(1, 0))), 0.0);  // occ-occ
  EXPECT_EQ(g(static_cast<Eigen::Index>(pair_index(3, 2))), 0.0);  // virt-virt
}

TEST(HfEnergy, InvariantUnderOccupiedOccupiedRotation) {
  std::mt19937_64 rng(9);
  const auto h = oracle::random_hamiltonian(4, rng);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(6);
  const double e0 = hf_energy(h, OrbitalRotation(4, x), {2, 2});
  x(static_cast<Eigen::Index>(pair_index(1, 0))) = 0.7;  // occupied block
  x(static_cast<Eigen::Index>(pair_index(3, 2))) = -0.4;  // virtual block
  EXPECT_NEAR(hf_energy(h, OrbitalRotation(4, x), {2, 2}), e0, 1e-10);
  // open shell (3,1): doubly occupied {0}, singly {1,2}, virtual {3}
  Eigen::VectorXd y = Eigen::VectorXd::Zero(6);
  const double e1 = hf_energy(h, OrbitalRotation(4, y), {3, 1});
  y(static_cast<Eigen::Index>(pair_index(2, 1))) = 0.9;
  EXPECT_NEAR(hf_energy(h, OrbitalRotation(4, y), {3, 1}), e1, 1e-10);
}

TEST(Optimizer, OneBodyMatchesFilling) {
  std::mt19937_64 rng(10);
  OptimizerSettings opt;
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 2 + t % 4;
    auto h = SpinFreeHamiltonian::zeros(n);
    h.h = oracle::random_symmetric(n, rng);
    h.e_const = 0.3;
    const auto s = random_sector(n, rng);
    const auto f = one_body_filling(sorted_eigenvalues(h.h), s);
    const auto lo = minimize_sector(h, s, opt);
    const auto hi = maximize_sector(h, s, opt);
    EXPECT_NEAR(lo.energy, 0.3 + f.low, 1e-9) << s.label();
    EXPECT_NEAR(hi.energy, 0.3 + f.high, 1e-9) << s.label();
    EXPECT_TRUE(lo.converged);
    EXPECT_TRUE(hi.converged);
    EXPECT_LE(lo.grad_norm, opt.grad_tol);
  }
}

TEST(Optimizer, VacuumIsConstant) {
  std::mt19937_64 rng(11);
  const auto h = oracle::random_hamiltonian(3, rng);
  const auto lo = minimize_sector(h, {0, 0}, {});
  const auto hi = maximize_sector(h, {0, 0}, {});
  EXPECT_EQ(lo.energy, h.e_const);
  EXPECT_EQ(hi.energy, h.e_const);
  EXPECT_EQ(lo.iterations, 0);
  EXPECT_EQ(lo.restarts_used, 0);
  EXPECT_TRUE(lo.converged);
}

TEST(Optimizer, H4BracketsFci) {
  const auto h = load_hamiltonian(oracle::data_path("h4_sto6g.fcidump"), InputFormat::fcidump);
  for (const SymmetrySector s : {SymmetrySector{2, 2}, SymmetrySector{3, 1}, SymmetrySector{2, 1}}) {
    const auto r = extremal_eigenvalues(h, s);
    const auto lo = minimize_sector(h, s, {});
    const auto hi = maximize_sector(h, s, {});
    EXPECT_GE(lo.energy, r.e_min - 1e-9);
    EXPECT_LE(hi.energy, r.e_max + 1e-9);
    EXPECT_TRUE(lo.converged && hi.converged);
    EXPECT_EQ(lo.kind, ExtremumKind::min);
    EXPECT_EQ(hi.kind, ExtremumKind::max);
  }
  // the closed-shell minimum is the RHF energy
  const auto ref = nlohmann::json::parse(read_file(oracle::data_path("h4_sto6g.ref.json")));
  EXPECT_NEAR(minimize_sector(h, {2, 2}, {}).energy, ref["rhf_energy"].get<double>(), 1e-8);
}

TEST(Optimizer, OptimizedDeterminantHasRohfSpin) {
  const auto h = load_hamiltonian(oracle::data_path("h4_sto6g.fcidump"), InputFormat::fcidump);
  for (const SymmetrySector s : {SymmetrySector{3, 1}, SymmetrySector{2, 2}, SymmetrySector{3, 0}}) {
    const auto lo = minimize_sector(h, s, {});
    const auto basis = enumerate_determinants(4, s);
    const double sz = 0.5 * (s.n_alpha - s.n_beta);
    EXPECT_NEAR(s2_matrix_element(basis, rotated_determinant(basis, lo.rotation.unitary())), sz * (sz + 1), 1e-10);
  }
}

TEST(Optimizer, Deterministic) {
  std::mt19937_64 rng(12);
  const auto h = oracle::random_hamiltonian(4, rng);
  OptimizerSettings opt;
  opt.restarts = 3;
  const auto a = minimize_sector(h, {2, 1}, opt);
  const auto b = minimize_sector(h, {2, 1}, opt);
  EXPECT_EQ(a.energy, b.energy);
  EXPECT_EQ(a.rotation.params(), b.rotation.params());
  opt.seed = 999;
  const auto c = maximize_sector(h, {2, 1}, opt);
  const auto d = maximize_sector(h, {2, 1}, opt);
  EXPECT_EQ(c.energy, d.energy);
}

TEST(Optimizer, MaxIterZeroReportsUnconverged) {
  std::mt19937_64 rng(13);
  const auto h = oracle::random_hamiltonian(4, rng);
  OptimizerSettings opt;
  opt.max_iter = 0;
  opt.restarts = 0;
  const auto lo = minimize_sector(h, {2, 1}, opt);
  EXPECT_FALSE(lo.converged);
  EXPECT_GT(lo.grad_norm, opt.grad_tol);
}

TEST(Optimizer, SettingsValidation) {
  OptimizerSettings opt;
  opt.grad_tol = 0.0;
  EXPECT_THROW(opt.validate(), InputError);
  opt = {};
  opt.restarts = -1;
  EXPECT_THROW(opt.validate(), InputError);
}

TEST(Optimizer, TraceWritesCsv) {
  std::mt19937_64 rng(14);
  const auto h = oracle::random_hamiltonian(3, rng);
  std::ostringstream out;
  OptimizerSettings opt;
  opt.restarts = 0;
  (void)minimize_sector(h, {1, 1}, opt, csv_trace(out));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "iter,energy,grad_norm,step");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_GE(rows, 2);
}
