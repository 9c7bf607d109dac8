#pragma once

// Sparse matrices in compressed-row form and a truncated SVD by block subspace
// iteration.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace holoscope {

struct Triplet {
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  double value = 0.0;
};

class SparseMatrix {
 public:
  SparseMatrix() = default;
  /// Duplicate (row, col) entries are summed. Throws DataError for
  /// out-of-range indices or non-finite values.
  SparseMatrix(std::size_t rows, std::size_t cols, std::span<const Triplet> triplets);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }

  std::span<const std::size_t> row_offsets() const { return row_begin_; }
  std::span<const std::uint32_t> col_indices() const { return col_; }
  std::span<const double> values() const { return values_; }

  /// Y = M X.
  Eigen::MatrixXd multiply(const Eigen::MatrixXd& x) const;
  /// Y = M^T X.
  Eigen::MatrixXd multiply_transpose(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd to_dense() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<std::size_t> row_begin_{0};
  std::vector<std::uint32_t> col_;
  std::vector<double> values_;
};

struct SvdOptions {
  std::size_t rank = 10;
  double tol = 1e-6;  // residual bound relative to the top singular value
  std::size_t max_iter = 2000;
  std::uint64_t seed = 42;
};

struct SvdResult {
  Eigen::MatrixXd u;      // rows x rank
  Eigen::VectorXd sigma;  // descending
  Eigen::MatrixXd v;      // cols x rank
  std::vector<double> residuals;  // max(|M v - s u|, |M^T u - s v|) per triplet
  std::size_t iterations = 0;
};

/// Top-`rank` singular triplets. Each left vector's largest-magnitude entry is
/// made positive. Throws ConfigError for rank > min(rows, cols) or tol <= 0,
/// and ConvergenceError with the last residuals after max_iter iterations.
SvdResult truncated_svd(const SparseMatrix& m, const SvdOptions& options);

}  // namespace holoscope
