#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cra {

using Vec = std::vector<double>;

/// Dense row-major matrix. Rows are contiguous so row views are spans.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<const double> data() const { return data_; }

  Matrix transposed() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Symmetric matrix keeping only its lower triangle, in 128 x 128 tiles.
/// A product reads every stored tile once and uses it for both the tile and
/// its mirror image, halving the memory traffic of a dense product.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  /// Reads the lower triangle of g, which must be square.
  explicit SymmetricMatrix(const Matrix& g);

  std::size_t dim() const { return n_; }

  /// out = G v. Entry i is the pairwise sum over column chunks of the chunk
  /// sums of G(i, k) v_k, so the result does not depend on thread count.
  void multiply_into(std::span<const double> v, std::span<double> out) const;

 private:
  const double* tile(std::size_t ti, std::size_t tj) const { return data_.data() + offsets_[ti * (ti + 1) / 2 + tj]; }

  std::size_t n_ = 0;
  std::size_t tiles_ = 0;
  std::vector<double> data_;
  std::vector<std::size_t> offsets_;
};

// All reductions go through pairwise summation with a fixed split so results
// do not depend on thread count or call site.
double pairwise_sum(std::span<const double> xs);
double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);
double norm(std::span<const double> a);

/// out = m * v, rows evaluated in parallel.
Vec multiply(const Matrix& m, std::span<const double> v);
/// Same, writing into a caller-owned buffer of length m.rows().
void multiply_into(const Matrix& m, std::span<const double> v, std::span<double> out);

/// out = m * m^T. Entries are sums of 128-column chunks combined
/// pairwise; symmetric by construction.
Matrix gram_rows(const Matrix& m);

/// Largest eigenvalue estimate of the symmetric PSD operator x -> m^T m x,
/// `iterations` power steps from the all-ones vector.
double power_iteration_max_eig(const Matrix& m, const Matrix& mt, int iterations);

/// Same for a symmetric PSD matrix g acting directly.
double power_iteration_max_eig(const Matrix& g, int iterations);
double power_iteration_max_eig(const SymmetricMatrix& g, int iterations);

}  // namespace cra
