#include "specbound/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>

namespace specbound::kernels {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// One pass: input viewed as (n x rest), output (rest x m) = input^T * C, i.e.
// the first index is contracted and the new index is appended last.
void contract_leading(const double* in, Eigen::Index n, Eigen::Index rest, const Eigen::MatrixXd& c,
                      double* out, bool parallel) {
  const Eigen::Index m = c.cols();
  Eigen::Map<const RowMajor> src(in, n, rest);
  Eigen::Map<RowMajor> dst(out, rest, m);
  if (!parallel) {
    dst.noalias() = src.transpose() * c;
    return;
  }
  constexpr Eigen::Index block = 256;
  const Eigen::Index nblocks = (rest + block - 1) / block;
#pragma omp parallel for schedule(static)
  for (Eigen::Index b = 0; b < nblocks; ++b) {
    const Eigen::Index start = b * block;
    const Eigen::Index len = std::min(block, rest - start);
    dst.middleRows(start, len).noalias() = src.middleCols(start, len).transpose() * c;
  }
}

Tensor4 transform4_impl(const Tensor4& g, const Eigen::MatrixXd& c, bool parallel) {
  const auto n = static_cast<Eigen::Index>(g.extent());
  const Eigen::Index m = c.cols();
  std::vector<double> a(g.data().begin(), g.data().end());
  std::vector<double> b;
  // extents cycle (n,n,n,n) -> (n,n,n,m) -> (n,n,m,m) -> (n,m,m,m) -> (m,m,m,m)
  Eigen::Index rest = n * n * n;
  for (int pass = 0; pass < 4; ++pass) {
    b.assign(static_cast<std::size_t>(rest * m), 0.0);
    contract_leading(a.data(), n, rest, c, b.data(), parallel);
    a.swap(b);
    rest = rest / n * m;
  }
  Tensor4 out(static_cast<std::size_t>(m));
  std::copy(a.begin(), a.end(), out.data().begin());
  return out;
}

Eigen::MatrixXd coulomb_impl(const Tensor4& g, const Eigen::MatrixXd& d, bool parallel) {
  const auto n = static_cast<Eigen::Index>(g.extent());
  const Eigen::Index nn = n * n;
  Eigen::Map<const RowMajor> gm(g.data().data(), nn, nn);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, 1>> dv(d.data(), nn);
  // D is symmetric, so its column-major flattening equals the row-major one.
  Eigen::VectorXd jv(nn);
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (Eigen::Index row = 0; row < nn; ++row) jv(row) = gm.row(row).dot(dv);
  } else {
    for (Eigen::Index row = 0; row < nn; ++row) jv(row) = gm.row(row).dot(dv);
  }
  Eigen::MatrixXd j(n, n);
  for (Eigen::Index p = 0; p < n; ++p)
    for (Eigen::Index q = 0; q < n; ++q) j(p, q) = jv(p * n + q);
  return j;
}

void exchange_row(const Tensor4& g, const Eigen::MatrixXd& d, std::size_t p, Eigen::MatrixXd& k) {
  const std::size_t n = g.extent();
  for (std::size_t s = 0; s < n; ++s) {
    double acc = 0.0;
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t r = 0; r < n; ++r) acc += g(p, q, r, s) * d(q, r);
    k(p, s) = acc;
  }
}

}  // namespace

Tensor4 transform4(const Tensor4& g, const Eigen::MatrixXd& c) { return transform4_impl(g, c, true); }

Eigen::MatrixXd coulomb(const Tensor4& g, const Eigen::MatrixXd& d) { return coulomb_impl(g, d, true); }

Eigen::MatrixXd exchange(const Tensor4& g, const Eigen::MatrixXd& d) {
  const auto n = static_cast<Eigen::Index>(g.extent());
  Eigen::MatrixXd k(n, n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index p = 0; p < n; ++p) exchange_row(g, d, static_cast<std::size_t>(p), k);
  return k;
}

void symmetrize(Tensor4& g) {
  const std::size_t n = g.extent();
  const Tensor4 src = g;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t pi = 0; pi < static_cast<std::ptrdiff_t>(n); ++pi) {
    const auto p = static_cast<std::size_t>(pi);
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) {
          const double sum = src(p, q, r, s) + src(q, p, r, s) + src(p, q, s, r) + src(q, p, s, r) +
                             src(r, s, p, q) + src(s, r, p, q) + src(r, s, q, p) + src(s, r, q, p);
          g(p, q, r, s) = sum / 8.0;
        }
  }
}

namespace serial {

Tensor4 transform4(const Tensor4& g, const Eigen::MatrixXd& c) { return transform4_impl(g, c, false); }

Eigen::MatrixXd coulomb(const Tensor4& g, const Eigen::MatrixXd& d) { return coulomb_impl(g, d, false); }

Eigen::MatrixXd exchange(const Tensor4& g, const Eigen::MatrixXd& d) {
  const auto n = static_cast<Eigen::Index>(g.extent());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index p = 0; p < n; ++p) exchange_row(g, d, static_cast<std::size_t>(p), k);
  return k;
}

}  // namespace serial

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace specbound::kernels
