#pragma once

#include "specbound/hamiltonian.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace specbound {

/// Parses an FCIDUMP stream (1-based indices on disk, chemist notation).
/// Missing entries are zero; the 8-fold symmetry of g is completed from
/// whatever representatives are present. Conflicting duplicates are errors.
SpinFreeHamiltonian parse_fcidump(std::istream& in, const std::string& source_name = "<stream>");

/// Writes canonical entries only (p>=q, r>=s, pq>=rs) with 17 significant digits.
void write_fcidump(std::ostream& out, const SpinFreeHamiltonian& ham, double zero_tol = 0.0);

/// Integrals in a non-orthogonal atomic-orbital basis.
struct AOBundle {
  std::size_t n_ao = 0;
  Eigen::MatrixXd overlap;
  Eigen::MatrixXd h;
  Tensor4 g;
  double e_const = 0.0;
  nlohmann::json meta;
};

AOBundle parse_ao_bundle(const nlohmann::json& doc);

/// h' = X h X, g' = g contracted with X on every index, X = S^{-1/2}.
SpinFreeHamiltonian lowdin_orthogonalize(const AOBundle& bundle);

/// Loads an FCIDUMP or AO-JSON file (the latter is Löwdin-orthogonalized) and
/// fills provenance with the path, format and sha256 of the bytes read.
enum class InputFormat { fcidump, ao_json };
SpinFreeHamiltonian load_hamiltonian(const std::filesystem::path& path, InputFormat format);

struct SymmetryClassDeviation {
  std::string name;
  double max_deviation = 0.0;
  std::vector<std::size_t> worst_index;
};

struct SymmetryReport {
  bool pass = true;
  bool finite = true;
  double tolerance = 1e-12;
  std::vector<SymmetryClassDeviation> classes;

  std::string summary() const;
};

SymmetryReport validate_tensor_symmetry(const SpinFreeHamiltonian& ham, double tolerance = 1e-12);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

}  // namespace specbound
