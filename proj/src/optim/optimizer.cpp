#include "lbfgs.hpp"
#include "specbound/orbital.hpp"

#include <cmath>
#include <ostream>
#include <random>

namespace specbound {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Restart streams depend only on (seed, sector, kind, restart) so scans give
// the same numbers regardless of scheduling.
std::uint64_t restart_seed(std::uint64_t seed, const SymmetrySector& s, ExtremumKind kind, int restart) {
  std::uint64_t key = (static_cast<std::uint64_t>(s.n_alpha) << 40) ^ (static_cast<std::uint64_t>(s.n_beta) << 20) ^
                      (static_cast<std::uint64_t>(kind == ExtremumKind::max) << 16) ^
                      static_cast<std::uint64_t>(restart);
  return splitmix64(seed ^ splitmix64(key));
}

// The determinant energy is independent of the rotation when every spin
// channel is empty or full.
bool rotation_invariant(const SymmetrySector& s, std::size_t n_orb) {
  const int n = static_cast<int>(n_orb);
  auto trivial = [n](int k) { return k == 0 || k == n; };
  return trivial(s.n_alpha) && trivial(s.n_beta);
}

SectorExtremum run_minimization(const SpinFreeHamiltonian& ham, const SymmetrySector& sector,
                                const OptimizerSettings& settings, ExtremumKind kind, const TraceFn& trace) {
  settings.validate();
  require_sector(sector, ham.n_orb);
  const std::size_t n_params = OrbitalRotation::param_count(ham.n_orb);

  optim::Objective objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    auto [e, g] = hf_energy_and_gradient(ham, x, sector);
    grad = std::move(g);
    return e;
  };
  optim::LbfgsOptions opts;
  opts.memory = settings.lbfgs_memory;
  opts.max_iter = settings.max_iter;
  opts.grad_tol = settings.grad_tol;

  SectorExtremum best;
  best.sector = sector;
  best.kind = kind;
  bool have_best = false;

  const int runs = rotation_invariant(sector, ham.n_orb) ? 1 : 1 + settings.restarts;
  for (int run = 0; run < runs; ++run) {
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_params));
    if (run > 0) {
      std::mt19937_64 rng(restart_seed(settings.seed, sector, kind, run));
      std::normal_distribution<double> normal(0.0, settings.restart_sigma);
      for (Eigen::Index i = 0; i < x0.size(); ++i) x0(i) = normal(rng);
    }
    const auto res = optim::lbfgs_minimize(objective, std::move(x0), opts, trace);
    // Prefer converged runs; among equals, the lower energy.
    const bool better = !have_best || (res.converged && !best.converged) ||
                        (res.converged == best.converged && res.f < best.energy);
    if (better) {
      best.energy = res.f;
      best.rotation = OrbitalRotation(ham.n_orb, res.x);
      best.converged = res.converged;
      best.grad_norm = res.grad_norm;
      best.iterations = res.iterations;
      have_best = true;
    }
  }
  best.restarts_used = runs - 1;
  return best;
}

}  // namespace

void OptimizerSettings::validate() const {
  if (!(grad_tol > 0.0)) throw InputError("grad_tol must be positive");
  if (!(energy_tol > 0.0)) throw InputError("energy_tol must be positive");
  if (max_iter < 0) throw InputError("max_iter must be non-negative");
  if (restarts < 0) throw InputError("restarts must be non-negative");
  if (!(restart_sigma >= 0.0)) throw InputError("restart_sigma must be non-negative");
  if (lbfgs_memory < 1) throw InputError("lbfgs_memory must be at least 1");
}

SectorExtremum minimize_sector(const SpinFreeHamiltonian& ham, const SymmetrySector& sector,
                               const OptimizerSettings& settings, const TraceFn& trace) {
  return run_minimization(ham, sector, settings, ExtremumKind::min, trace);
}

SectorExtremum maximize_sector(const SpinFreeHamiltonian& ham, const SymmetrySector& sector,
                               const OptimizerSettings& settings, const TraceFn& trace) {
  const SpinFreeHamiltonian negated = ham.scaled(-1.0, 0.0);
  SectorExtremum out = run_minimization(negated, sector, settings, ExtremumKind::max, trace);
  out.energy = ham.e_const - out.energy;
  return out;
}

TraceFn csv_trace(std::ostream& out) {
  out << "iter,energy,grad_norm,step\n";
  return [&out](int iter, double energy, double grad_norm, double step) {
    out.precision(15);
    out << iter << ',' << energy << ',' << grad_norm << ',' << step << '\n';
  };
}

}  // namespace specbound
