#include "sbmase/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "sbmase/error.hpp"

namespace sbmase {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void check_info(lapack_int info, const char* routine) {
  if (info == 0) return;
  if (info > 0) {
    throw ConvergenceFailure(std::string(routine) + " failed to converge (info=" +
                             std::to_string(info) + ")");
  }
  throw PreconditionError(std::string(routine) + ": illegal argument " +
                          std::to_string(-info));
}

void require_finite(const MatrixXd& m) {
  if (!m.allFinite()) throw PreconditionError("matrix has non-finite entries");
}

// Householder tridiagonalization A = Q T Q^T, T given by (diag, offdiag).
struct Tridiagonal {
  MatrixXd reflectors;
  std::vector<double> diag;
  std::vector<double> offdiag;
  std::vector<double> tau;
};

Tridiagonal tridiagonalize(const MatrixXd& m) {
  const auto n = static_cast<lapack_int>(m.rows());
  Tridiagonal t{m, std::vector<double>(n), std::vector<double>(std::max<lapack_int>(n, 1)),
                std::vector<double>(std::max<lapack_int>(n - 1, 1))};
  check_info(LAPACKE_dsytrd(LAPACK_COL_MAJOR, 'L', n, t.reflectors.data(), n, t.diag.data(),
                            t.offdiag.data(), t.tau.data()),
             "dsytrd");
  return t;
}

// All eigenvalues of T, ascending.
std::vector<double> tridiagonal_eigenvalues(const Tridiagonal& t) {
  auto d = t.diag;
  auto e = t.offdiag;
  check_info(LAPACKE_dsterf(static_cast<lapack_int>(d.size()), d.data(), e.data()), "dsterf");
  return d;
}

// Eigenpairs il..iu (1-based, ascending) of the original matrix.
void tridiagonal_pairs(const Tridiagonal& t, lapack_int il, lapack_int iu, VectorXd& values,
                       MatrixXd& vectors) {
  const auto n = static_cast<lapack_int>(t.diag.size());
  const lapack_int count = iu - il + 1;
  auto d = t.diag;
  auto e = t.offdiag;
  e.resize(std::max<lapack_int>(n, 1), 0.0);
  std::vector<double> w(n);
  std::vector<lapack_int> support(2 * std::max<lapack_int>(n, 1));
  MatrixXd z(n, count);
  lapack_int found = 0;
  lapack_logical tryrac = 1;
  check_info(LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0, il, iu,
                            &found, w.data(), z.data(), n, count, support.data(), &tryrac),
             "dstemr");
  if (found != count) throw ConvergenceFailure("dstemr returned fewer eigenpairs than requested");
  check_info(LAPACKE_dormtr(LAPACK_COL_MAJOR, 'L', 'L', 'N', n, count,
                            const_cast<double*>(t.reflectors.data()), n, t.tau.data(), z.data(),
                            n),
             "dormtr");
  values = Eigen::Map<VectorXd>(w.data(), count);
  vectors = std::move(z);
}

// Orders eigenpairs by |lambda| descending and converts them to singular
// triplets.
SvdResult pairs_to_svd(const VectorXd& lambda, const MatrixXd& q) {
  const Index r = lambda.size();
  std::vector<Index> order(static_cast<std::size_t>(r));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return std::abs(lambda(a)) > std::abs(lambda(b));
  });
  SvdResult s{MatrixXd(q.rows(), r), VectorXd(r), MatrixXd(q.rows(), r)};
  for (Index j = 0; j < r; ++j) {
    const Index src = order[static_cast<std::size_t>(j)];
    s.sigma(j) = std::abs(lambda(src));
    s.U.col(j) = q.col(src);
    s.V.col(j) = lambda(src) < 0.0 ? VectorXd(-q.col(src)) : VectorXd(q.col(src));
  }
  canonicalize_pairs(s);
  return s;
}

SvdResult symmetric_truncated(const MatrixXd& m, Index d) {
  const Index n = m.rows();
  if (n == 1) {
    return pairs_to_svd(VectorXd::Constant(1, m(0, 0)), MatrixXd::Ones(1, 1));
  }
  const Tridiagonal t = tridiagonalize(m);
  const std::vector<double> w = tridiagonal_eigenvalues(t);

  // Largest |lambda| come from the two ends of the ascending spectrum.
  Index lo = 0;
  Index hi = n - 1;
  Index from_top = 0;
  Index from_bottom = 0;
  for (Index k = 0; k < d; ++k) {
    if (std::abs(w[static_cast<std::size_t>(hi)]) >= std::abs(w[static_cast<std::size_t>(lo)])) {
      --hi;
      ++from_top;
    } else {
      ++lo;
      ++from_bottom;
    }
  }

  VectorXd lambda(d);
  MatrixXd q(n, d);
  Index filled = 0;
  if (from_bottom > 0) {
    VectorXd vals;
    MatrixXd vecs;
    tridiagonal_pairs(t, 1, static_cast<lapack_int>(from_bottom), vals, vecs);
    lambda.head(from_bottom) = vals;
    q.leftCols(from_bottom) = vecs;
    filled = from_bottom;
  }
  if (from_top > 0) {
    VectorXd vals;
    MatrixXd vecs;
    tridiagonal_pairs(t, static_cast<lapack_int>(n - from_top + 1), static_cast<lapack_int>(n),
                      vals, vecs);
    lambda.segment(filled, from_top) = vals;
    q.middleCols(filled, from_top) = vecs;
  }
  return pairs_to_svd(lambda, q);
}

SvdResult general_svd(const MatrixXd& m) {
  const auto rows = static_cast<lapack_int>(m.rows());
  const auto cols = static_cast<lapack_int>(m.cols());
  const lapack_int r = std::min(rows, cols);
  MatrixXd a = m;
  VectorXd s(r);
  MatrixXd u(rows, r);
  MatrixXd vt(r, cols);
  check_info(LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', rows, cols, a.data(), rows, s.data(), u.data(),
                            rows, vt.data(), r),
             "dgesdd");
  SvdResult out{std::move(u), std::move(s), vt.transpose()};
  canonicalize_pairs(out);
  return out;
}

SvdResult general_truncated(const MatrixXd& m, Index d) {
  const auto rows = static_cast<lapack_int>(m.rows());
  const auto cols = static_cast<lapack_int>(m.cols());
  const lapack_int r = std::min(rows, cols);
  MatrixXd a = m;
  VectorXd s(r);
  MatrixXd u(rows, d);
  MatrixXd vt(d, cols);
  std::vector<lapack_int> superb(12 * static_cast<std::size_t>(r));
  lapack_int found = 0;
  check_info(LAPACKE_dgesvdx(LAPACK_COL_MAJOR, 'V', 'V', 'I', rows, cols, a.data(), rows, 0.0, 0.0,
                             1, static_cast<lapack_int>(d), &found, s.data(), u.data(), rows,
                             vt.data(), static_cast<lapack_int>(d), superb.data()),
             "dgesvdx");
  if (found != d) throw ConvergenceFailure("dgesvdx returned fewer triplets than requested");
  SvdResult out{std::move(u), s.head(d), vt.transpose()};
  canonicalize_pairs(out);
  return out;
}

Index argmax_abs(const Eigen::Ref<const VectorXd>& v) {
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > std::abs(v(best))) best = i;
  }
  return best;
}

}  // namespace

MatrixXd SvdResult::reconstruct() const { return U * sigma.asDiagonal() * V.transpose(); }

bool is_exactly_symmetric(const MatrixXd& m) {
  if (m.rows() != m.cols()) return false;
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = j + 1; i < m.rows(); ++i) {
      if (m(i, j) != m(j, i)) return false;
    }
  }
  return true;
}

void canonicalize_pairs(SvdResult& s) {
  const Index r = s.sigma.size();
  if (r == 0) return;
  std::vector<Index> peak(static_cast<std::size_t>(r));
  for (Index j = 0; j < r; ++j) {
    const Index i = argmax_abs(s.U.col(j));
    peak[static_cast<std::size_t>(j)] = i;
    if (s.U(i, j) < 0.0) {
      s.U.col(j) *= -1.0;
      s.V.col(j) *= -1.0;
    }
  }

  const double tol = 1e-10 * s.sigma(0);
  Index start = 0;
  while (start < r) {
    Index stop = start + 1;
    while (stop < r && s.sigma(stop - 1) - s.sigma(stop) <= tol) ++stop;
    if (stop - start > 1) {
      std::vector<Index> order(static_cast<std::size_t>(stop - start));
      std::iota(order.begin(), order.end(), start);
      std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return peak[static_cast<std::size_t>(a)] < peak[static_cast<std::size_t>(b)];
      });
      const MatrixXd u = s.U.middleCols(start, stop - start);
      const MatrixXd v = s.V.middleCols(start, stop - start);
      const VectorXd sig = s.sigma.segment(start, stop - start);
      for (Index k = 0; k < stop - start; ++k) {
        const Index src = order[static_cast<std::size_t>(k)] - start;
        s.U.col(start + k) = u.col(src);
        s.V.col(start + k) = v.col(src);
        s.sigma(start + k) = sig(src);
      }
    }
    start = stop;
  }
}

SvdResult svd(const MatrixXd& m) {
  require_finite(m);
  if (m.rows() == 0 || m.cols() == 0) throw PreconditionError("svd of an empty matrix");
  if (is_exactly_symmetric(m)) {
    const SymmetricEigen e = symmetric_eigen(m);
    return pairs_to_svd(e.values, e.vectors);
  }
  return general_svd(m);
}

SvdResult truncated_svd(const MatrixXd& m, Index d) {
  require_finite(m);
  const Index r = std::min(m.rows(), m.cols());
  if (d < 1 || d > r) {
    throw PreconditionError("truncated_svd: d=" + std::to_string(d) + " outside [1, " +
                            std::to_string(r) + "]");
  }
  if (is_exactly_symmetric(m)) return symmetric_truncated(m, d);
  if (d == r) return general_svd(m);
  return general_truncated(m, d);
}

VectorXd singular_values(const MatrixXd& m) {
  require_finite(m);
  if (m.rows() == 0 || m.cols() == 0) return VectorXd();
  if (is_exactly_symmetric(m)) {
    if (m.rows() == 1) return VectorXd::Constant(1, std::abs(m(0, 0)));
    std::vector<double> w = tridiagonal_eigenvalues(tridiagonalize(m));
    for (double& x : w) x = std::abs(x);
    std::sort(w.begin(), w.end(), std::greater<>());
    return Eigen::Map<VectorXd>(w.data(), static_cast<Index>(w.size()));
  }
  const auto rows = static_cast<lapack_int>(m.rows());
  const auto cols = static_cast<lapack_int>(m.cols());
  MatrixXd a = m;
  VectorXd s(std::min(rows, cols));
  check_info(LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', rows, cols, a.data(), rows, s.data(), nullptr,
                            1, nullptr, 1),
             "dgesdd");
  return s;
}

Index numerical_rank(const MatrixXd& m, double rel_tol) {
  const VectorXd s = singular_values(m);
  if (s.size() == 0 || s(0) <= 0.0) return 0;
  return (s.array() > rel_tol * s(0)).count();
}

SymmetricEigen symmetric_eigen(const MatrixXd& m) {
  require_finite(m);
  if (!is_exactly_symmetric(m)) throw PreconditionError("symmetric_eigen: matrix not symmetric");
  const auto n = static_cast<lapack_int>(m.rows());
  SymmetricEigen e{VectorXd(n), m};
  check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, e.vectors.data(), n, e.values.data()),
             "dsyevd");
  return e;
}

}  // namespace sbmase
