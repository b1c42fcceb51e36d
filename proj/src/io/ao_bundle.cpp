#include "specbound/io.hpp"
#include "specbound/kernels.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <sstream>

namespace specbound {

namespace {

Eigen::MatrixXd square_from(const nlohmann::json& arr, std::size_t n, const char* name) {
  if (!arr.is_array() || arr.size() != n * n)
    throw InputError(std::string("AO-JSON: '") + name + "' must be a flat array of length n_ao^2 = " +
                     std::to_string(n * n) + " (got " + std::to_string(arr.is_array() ? arr.size() : 0) + ")");
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd m(ni, ni);
  for (Eigen::Index p = 0; p < ni; ++p)
    for (Eigen::Index q = 0; q < ni; ++q) {
      const auto& v = arr[static_cast<std::size_t>(p * ni + q)];
      if (!v.is_number()) throw InputError(std::string("AO-JSON: non-numeric entry in '") + name + "'");
      m(p, q) = v.get<double>();
    }
  return m;
}

void require_symmetric(const Eigen::MatrixXd& m, const char* name) {
  const double dev = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (!(dev <= 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())))
    throw InputError(std::string("AO-JSON: '") + name + "' is not symmetric (max deviation " +
                     std::to_string(dev) + ")");
}

}  // namespace

AOBundle parse_ao_bundle(const nlohmann::json& doc) {
  if (!doc.is_object()) throw InputError("AO-JSON: top level must be an object");
  for (const char* key : {"n_ao", "e_const", "S", "h", "g"})
    if (!doc.contains(key)) throw InputError(std::string("AO-JSON: missing field '") + key + "'");
  if (!doc["n_ao"].is_number_integer() || doc["n_ao"].get<long>() < 1)
    throw InputError("AO-JSON: 'n_ao' must be a positive integer");
  if (!doc["e_const"].is_number()) throw InputError("AO-JSON: 'e_const' must be a number");

  AOBundle b;
  b.n_ao = doc["n_ao"].get<std::size_t>();
  b.e_const = doc["e_const"].get<double>();
  b.overlap = square_from(doc["S"], b.n_ao, "S");
  b.h = square_from(doc["h"], b.n_ao, "h");
  const auto& g = doc["g"];
  const std::size_t n4 = b.n_ao * b.n_ao * b.n_ao * b.n_ao;
  if (!g.is_array() || g.size() != n4)
    throw InputError("AO-JSON: 'g' must be a flat array of length n_ao^4 = " + std::to_string(n4) +
                     " (got " + std::to_string(g.is_array() ? g.size() : 0) + ")");
  b.g = Tensor4(b.n_ao);
  auto data = b.g.data();
  for (std::size_t i = 0; i < n4; ++i) {
    if (!g[i].is_number()) throw InputError("AO-JSON: non-numeric entry in 'g'");
    data[i] = g[i].get<double>();
  }
  if (doc.contains("meta")) b.meta = doc["meta"];

  require_symmetric(b.overlap, "S");
  require_symmetric(b.h, "h");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b.overlap);
  const double smallest = eig.eigenvalues()(0);
  if (!(smallest >= 1e-10)) {
    std::ostringstream msg;
    msg << "AO-JSON: overlap not positive definite (smallest eigenvalue " << smallest << ")";
    throw InputError(msg.str());
  }

  SpinFreeHamiltonian probe;
  probe.n_orb = b.n_ao;
  probe.h = b.h;
  probe.g = b.g;
  const auto report = validate_tensor_symmetry(probe, 1e-12 * std::max(1.0, b.g.max_abs()));
  if (!report.pass) throw InputError("AO-JSON: " + report.summary());
  return b;
}

SpinFreeHamiltonian lowdin_orthogonalize(const AOBundle& bundle) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(bundle.overlap);
  const Eigen::VectorXd& lam = eig.eigenvalues();
  if (!(lam(0) > 0.0)) throw InputError("overlap not positive definite");
  const double cond = lam(lam.size() - 1) / lam(0);
  if (cond > 1e12) {
    std::ostringstream msg;
    msg << "overlap matrix is near-singular (condition number " << cond
        << "); prune linearly dependent basis functions";
    throw InputError(msg.str());
  }
  const Eigen::MatrixXd x =
      eig.eigenvectors() * lam.cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();

  auto ham = SpinFreeHamiltonian::zeros(bundle.n_ao);
  ham.e_const = bundle.e_const;
  ham.h = x.transpose() * bundle.h * x;
  ham.h = 0.5 * (ham.h + ham.h.transpose()).eval();
  ham.g = kernels::transform4(bundle.g, x);
  kernels::symmetrize(ham.g);
  if (bundle.meta.is_object() && bundle.meta.contains("n_elec") && bundle.meta["n_elec"].is_number_integer()) {
    const int ne = bundle.meta["n_elec"].get<int>();
    if (ne >= 0 && ne % 2 == 0 && ne / 2 <= static_cast<int>(bundle.n_ao))
      ham.default_sector = SymmetrySector{ne / 2, ne / 2};
  }
  ham.provenance.format = "ao-json";
  return ham;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open input file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SpinFreeHamiltonian load_hamiltonian(const std::filesystem::path& path, InputFormat format) {
  const std::string bytes = read_file(path);
  SpinFreeHamiltonian ham;
  if (format == InputFormat::fcidump) {
    std::istringstream in(bytes);
    ham = parse_fcidump(in, path.string());
  } else {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(path.string() + ": invalid JSON: " + e.what());
    }
    ham = lowdin_orthogonalize(parse_ao_bundle(doc));
    ham.provenance.format = "ao-json";
  }
  ham.provenance.path = path.string();
  ham.provenance.checksum = sha256_hex(bytes);
  return ham;
}

}  // namespace specbound
