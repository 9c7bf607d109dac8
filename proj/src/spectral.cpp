#include "holoscope/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "holoscope/error.hpp"

namespace holoscope {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::span<const Triplet> triplets)
    : rows_(rows), cols_(cols) {
  std::vector<Triplet> sorted(triplets.begin(), triplets.end());
  for (const auto& t : sorted) {
    if (t.row >= rows || t.col >= cols) throw DataError("matrix entry out of range");
    if (!std::isfinite(t.value)) throw DataError("non-finite matrix entry");
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  row_begin_.assign(rows + 1, 0);
  for (std::size_t i = 0; i < sorted.size();) {
    const Triplet& t = sorted[i];
    double sum = 0.0;
    std::size_t j = i;
    for (; j < sorted.size() && sorted[j].row == t.row && sorted[j].col == t.col; ++j) sum += sorted[j].value;
    col_.push_back(t.col);
    values_.push_back(sum);
    ++row_begin_[t.row + 1];
    i = j;
  }
  for (std::size_t r = 0; r < rows; ++r) row_begin_[r + 1] += row_begin_[r];
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

Eigen::MatrixXd SparseMatrix::multiply(const Eigen::MatrixXd& x) const {
  if (static_cast<std::size_t>(x.rows()) != cols_) throw DataError("dimension mismatch");
  const RowMatrix xr = x;
  const Eigen::Index p = x.cols();
  RowMatrix y = RowMatrix::Zero(static_cast<Eigen::Index>(rows_), p);
  for (std::size_t r = 0; r < rows_; ++r) {
    double* out = y.data() + r * static_cast<std::size_t>(p);
    for (std::size_t e = row_begin_[r]; e < row_begin_[r + 1]; ++e) {
      const double* in = xr.data() + static_cast<std::size_t>(col_[e]) * static_cast<std::size_t>(p);
      const double a = values_[e];
      for (Eigen::Index c = 0; c < p; ++c) out[c] += a * in[c];
    }
  }
  return y;
}

Eigen::MatrixXd SparseMatrix::multiply_transpose(const Eigen::MatrixXd& x) const {
  if (static_cast<std::size_t>(x.rows()) != rows_) throw DataError("dimension mismatch");
  const RowMatrix xr = x;
  const Eigen::Index p = x.cols();
  RowMatrix y = RowMatrix::Zero(static_cast<Eigen::Index>(cols_), p);
  for (std::size_t r = 0; r < rows_; ++r) {
    const double* in = xr.data() + r * static_cast<std::size_t>(p);
    for (std::size_t e = row_begin_[r]; e < row_begin_[r + 1]; ++e) {
      double* out = y.data() + static_cast<std::size_t>(col_[e]) * static_cast<std::size_t>(p);
      const double a = values_[e];
      for (Eigen::Index c = 0; c < p; ++c) out[c] += a * in[c];
    }
  }
  return y;
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t e = row_begin_[r]; e < row_begin_[r + 1]; ++e) d(static_cast<Eigen::Index>(r), col_[e]) = values_[e];
  return d;
}

namespace {

Eigen::MatrixXd householder_basis(const Eigen::MatrixXd& a) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  return qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
}

// Two rounds of Cholesky QR; falls back to Householder when the block is too
// ill-conditioned for the Gram matrix route.
Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& a) {
  const Eigen::Index p = a.cols();
  Eigen::MatrixXd q = a;
  for (int round = 0; round < 2; ++round) {
    const Eigen::MatrixXd gram = q.transpose() * q;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) return householder_basis(a);
    const Eigen::MatrixXd r = llt.matrixU();
    const Eigen::VectorXd diag = r.diagonal().cwiseAbs();
    if (!(diag.minCoeff() > 1e-6 * diag.maxCoeff())) return householder_basis(a);
    q = q * r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  }
  const double drift = (q.transpose() * q - Eigen::MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff();
  return drift <= 1e-12 ? q : householder_basis(a);
}

}  // namespace

SvdResult truncated_svd(const SparseMatrix& m, const SvdOptions& options) {
  const std::size_t min_dim = std::min(m.rows(), m.cols());
  if (options.rank == 0 || options.rank > min_dim) throw ConfigError("rank must be in [1, min(rows, cols)]");
  if (!(options.tol > 0.0)) throw ConfigError("tolerance must be positive");
  const auto k = static_cast<Eigen::Index>(options.rank);
  const auto p = static_cast<Eigen::Index>(std::min(min_dim, std::max(2 * options.rank, options.rank + 8)));
  constexpr std::size_t check_every = 4;

  // Left block X is iterated as X <- orth(M M^T X); every few steps a
  // Rayleigh-Ritz pass extracts Ritz triplets from X^T M and checks them.
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd start(static_cast<Eigen::Index>(m.rows()), p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < start.rows(); ++i) start(i, j) = normal(rng);
  Eigen::MatrixXd x = orthonormal_basis(start);

  std::vector<double> residuals(options.rank, 0.0);
  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    const Eigen::MatrixXd b = m.multiply_transpose(x);
    if (it % check_every == 0 || it == options.max_iter) {
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
      const Eigen::MatrixXd qb = qr.householderQ() * Eigen::MatrixXd::Identity(b.rows(), p);
      const Eigen::MatrixXd rb = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
      Eigen::JacobiSVD<Eigen::MatrixXd> small(rb.transpose(), Eigen::ComputeFullU | Eigen::ComputeFullV);
      SvdResult out;
      out.u = x * small.matrixU().leftCols(k);
      out.v = qb * small.matrixV().leftCols(k);
      out.sigma = small.singularValues().head(k);
      const Eigen::MatrixXd mv = m.multiply(out.v);
      const Eigen::MatrixXd mtu = m.multiply_transpose(out.u);
      double worst = 0.0;
      for (Eigen::Index i = 0; i < k; ++i) {
        const double forward = (mv.col(i) - out.sigma(i) * out.u.col(i)).norm();
        const double backward = (mtu.col(i) - out.sigma(i) * out.v.col(i)).norm();
        residuals[static_cast<std::size_t>(i)] = std::max(forward, backward);
        worst = std::max(worst, residuals[static_cast<std::size_t>(i)]);
      }
      if (out.sigma(0) == 0.0 || worst <= options.tol * out.sigma(0)) {
        for (Eigen::Index i = 0; i < k; ++i) {
          Eigen::Index arg = 0;
          out.u.col(i).cwiseAbs().maxCoeff(&arg);
          if (out.u(arg, i) < 0.0) {
            out.u.col(i) *= -1.0;
            out.v.col(i) *= -1.0;
          }
        }
        out.residuals = residuals;
        out.iterations = it;
        return out;
      }
    }
    x = orthonormal_basis(m.multiply(b));
  }
  throw ConvergenceError("truncated SVD did not converge in " + std::to_string(options.max_iter) + " iterations",
                         residuals);
}

}  // namespace holoscope
