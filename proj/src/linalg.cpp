#include "cra/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cra/parallel.hpp"

namespace cra {

namespace {

constexpr std::size_t kBlock = 128;
// Below roughly this many multiply-adds per worker, threads cost more than they save.
constexpr std::size_t kParallelWork = 1 << 15;

// Two-lane vectors; lane k of a pair of them accumulates exactly what the
// scalar chain k would, so results match the scalar four-chain order.
using V2 = double __attribute__((vector_size(16)));

inline V2 load2(const double* p) {
  V2 x;
  __builtin_memcpy(&x, p, sizeof x);
  return x;
}

inline void store2(double* p, V2 x) { __builtin_memcpy(p, &x, sizeof x); }

inline double reduce4(V2 lo, V2 hi) { return (lo[0] + lo[1]) + (hi[0] + hi[1]); }

// Four interleaved accumulators within a block, halving recursion above it.
template <typename Term>
double pairwise(std::size_t begin, std::size_t end, const Term& term) {
  const std::size_t n = end - begin;
  if (n <= kBlock) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t i = begin;
    for (; i + 4 <= end; i += 4) {
      acc[0] += term(i);
      acc[1] += term(i + 1);
      acc[2] += term(i + 2);
      acc[3] += term(i + 3);
    }
    for (; i < end; ++i) acc[0] += term(i);
    return (acc[0] + acc[1]) + (acc[2] + acc[3]);
  }
  std::size_t half = n / 2;
  half -= half % 4;
  return pairwise(begin, begin + half, term) + pairwise(begin + half, end, term);
}

}  // namespace

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double pairwise_sum(std::span<const double> xs) {
  return pairwise(0, xs.size(), [xs](std::size_t i) { return xs[i]; });
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  const double* pa = a.data();
  const double* pb = b.data();
  return pairwise(0, a.size(), [pa, pb](std::size_t i) { return pa[i] * pb[i]; });
}

double squared_norm(std::span<const double> a) { return dot(a, a); }

double norm(std::span<const double> a) { return std::sqrt(squared_norm(a)); }

namespace {

// Four rows against one vector, each with exactly the accumulation order of
// dot(): same block split, same four chains per block. Results match dot() bit
// for bit while the sixteen independent chains keep the FPU busy and every
// load of v serves four rows.
void dot4(const double* const r[4], const double* pv, std::size_t begin, std::size_t end, double out[4]) {
  const std::size_t n = end - begin;
  if (n <= kBlock) {
    double acc[4][4] = {};
    std::size_t j = begin;
    for (; j + 4 <= end; j += 4)
      for (int k = 0; k < 4; ++k) {
        acc[k][0] += r[k][j] * pv[j];
        acc[k][1] += r[k][j + 1] * pv[j + 1];
        acc[k][2] += r[k][j + 2] * pv[j + 2];
        acc[k][3] += r[k][j + 3] * pv[j + 3];
      }
    for (; j < end; ++j)
      for (int k = 0; k < 4; ++k) acc[k][0] += r[k][j] * pv[j];
    for (int k = 0; k < 4; ++k) out[k] = (acc[k][0] + acc[k][1]) + (acc[k][2] + acc[k][3]);
    return;
  }
  std::size_t half = n / 2;
  half -= half % 4;
  double lo[4], hi[4];
  dot4(r, pv, begin, begin + half, lo);
  dot4(r, pv, begin + half, end, hi);
  for (int k = 0; k < 4; ++k) out[k] = lo[k] + hi[k];
}

void multiply_quad(const Matrix& m, std::span<const double> v, std::span<double> out, std::size_t quad) {
  const std::size_t i = 4 * quad;
  if (i + 4 > m.rows()) {
    for (std::size_t k = i; k < m.rows(); ++k) out[k] = dot(m.row(k), v);
    return;
  }
  const double* r[4] = {m.row(i).data(), m.row(i + 1).data(), m.row(i + 2).data(), m.row(i + 3).data()};
  dot4(r, v.data(), 0, m.cols(), &out[i]);
}

}  // namespace

void multiply_into(const Matrix& m, std::span<const double> v, std::span<double> out) {
  if (v.size() != m.cols() || out.size() != m.rows()) throw std::invalid_argument("multiply: shape mismatch");
  const std::size_t quads = (m.rows() + 3) / 4;
  const std::size_t grain = std::max<std::size_t>(1, kParallelWork / std::max<std::size_t>(4 * m.cols(), 1));
  parallel_for(quads, [&](std::size_t q) { multiply_quad(m, v, out, q); }, grain);
}

Vec multiply(const Matrix& m, std::span<const double> v) {
  Vec out(m.rows());
  multiply_into(m, v, out);
  return out;
}

namespace {

// Entries (i0..i0+3) x (j0..j0+3) of m m^T. Each entry is summed over chunks
// of kBlock columns with one accumulator per chunk, and the chunk sums are
// combined pairwise, so the result is deterministic and does not depend on
// the tile an entry falls in.
// Chunk sum of a[k] b[k] over [begin, end): two lanes over pairs of k, an odd
// last element goes to lane 0, then lane 0 + lane 1. Shared by the tiled and
// the single-entry paths so both give the same value.
inline double chunk_dot(const double* a, const double* b, std::size_t begin, std::size_t end) {
  V2 acc = {0.0, 0.0};
  std::size_t k = begin;
  for (; k + 2 <= end; k += 2) acc += load2(a + k) * load2(b + k);
  if (k < end) acc[0] += a[k] * b[k];
  return acc[0] + acc[1];
}

// 4 x 4 block of m m^T at rows (i0.., j0..), computed as two 2 x 4 halves so
// the eight vector accumulators stay in registers.
void gram_tile(const Matrix& m, std::size_t i0, std::size_t j0, std::vector<double>& partial, Matrix& g) {
  const std::size_t cols = m.cols();
  const std::size_t chunks = (cols + kBlock - 1) / kBlock;
  partial.assign(16 * chunks, 0.0);
  const double* b[4] = {m.row(j0).data(), m.row(j0 + 1).data(), m.row(j0 + 2).data(), m.row(j0 + 3).data()};
  for (int half = 0; half < 2; ++half) {
    const double* a0 = m.row(i0 + 2 * half).data();
    const double* a1 = m.row(i0 + 2 * half + 1).data();
    for (std::size_t q = 0; q < chunks; ++q) {
      const std::size_t begin = q * kBlock;
      const std::size_t end = std::min(cols, begin + kBlock);
      V2 acc[8] = {};
      std::size_t k = begin;
      for (; k + 2 <= end; k += 2) {
        const V2 x0 = load2(a0 + k), x1 = load2(a1 + k);
        for (int jj = 0; jj < 4; ++jj) {
          const V2 y = load2(b[jj] + k);
          acc[jj] += x0 * y;
          acc[4 + jj] += x1 * y;
        }
      }
      if (k < end)
        for (int jj = 0; jj < 4; ++jj) {
          acc[jj][0] += a0[k] * b[jj][k];
          acc[4 + jj][0] += a1[k] * b[jj][k];
        }
      for (int e = 0; e < 8; ++e) partial[(8 * half + e) * chunks + q] = acc[e][0] + acc[e][1];
    }
  }
  for (int e = 0; e < 16; ++e)
    g(i0 + e / 4, j0 + e % 4) = pairwise_sum(std::span<const double>(partial.data() + e * chunks, chunks));
}

// Same chunked order for a single entry, used on ragged edges.
double gram_entry(const Matrix& m, std::size_t i, std::size_t j) {
  const std::size_t cols = m.cols();
  const std::size_t chunks = (cols + kBlock - 1) / kBlock;
  std::vector<double> partial(chunks, 0.0);
  for (std::size_t q = 0; q < chunks; ++q)
    partial[q] = chunk_dot(m.row(i).data(), m.row(j).data(), q * kBlock, std::min(cols, (q + 1) * kBlock));
  return pairwise_sum(partial);
}

}  // namespace

Matrix gram_rows(const Matrix& m) {
  const std::size_t n = m.rows();
  Matrix g(n, n);
  const std::size_t tiles = n / 4;
  // Lower-triangle tiles in bands of 16 tile rows: each j tile is read once
  // per band while the band's rows stay in cache.
  constexpr std::size_t kBand = 16;
  const std::size_t bands = (tiles + kBand - 1) / kBand;
  parallel_for(bands, [&](std::size_t band) {
    std::vector<double> partial;
    const std::size_t lo = band * kBand;
    const std::size_t hi = std::min(tiles, lo + kBand);
    for (std::size_t tj = 0; tj < hi; ++tj)
      for (std::size_t ti = std::max(lo, tj); ti < hi; ++ti) gram_tile(m, 4 * ti, 4 * tj, partial, g);
  });
  for (std::size_t i = 4 * tiles; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) g(i, j) = gram_entry(m, i, j);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) g(i, j) = g(j, i);
  return g;
}

double power_iteration_max_eig(const Matrix& m, const Matrix& mt, int iterations) {
  Vec x(m.cols(), 1.0);
  double lambda = 0.0;
  double xn = norm(x);
  if (xn == 0.0) return 0.0;
  for (double& xi : x) xi /= xn;
  for (int it = 0; it < iterations; ++it) {
    const Vec y = multiply(mt, multiply(m, x));
    const double yn = norm(y);
    lambda = dot(x, y);
    if (yn == 0.0) return 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = y[i] / yn;
  }
  return lambda;
}

namespace {

template <typename Apply>
double power_iteration(std::size_t n, const Apply& apply, int iterations) {
  Vec x(n, 1.0);
  double xn = norm(x);
  if (xn == 0.0) return 0.0;
  for (double& xi : x) xi /= xn;
  double lambda = 0.0;
  Vec y(n);
  for (int it = 0; it < iterations; ++it) {
    apply(x, y);
    const double yn = norm(y);
    lambda = dot(x, y);
    if (yn == 0.0) return 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = y[i] / yn;
  }
  return lambda;
}

}  // namespace

double power_iteration_max_eig(const Matrix& g, int iterations) {
  if (g.rows() != g.cols()) throw std::invalid_argument("power iteration: matrix not square");
  return power_iteration(g.rows(), [&g](const Vec& x, Vec& y) { multiply_into(g, x, y); }, iterations);
}

double power_iteration_max_eig(const SymmetricMatrix& g, int iterations) {
  return power_iteration(g.dim(), [&g](const Vec& x, Vec& y) { g.multiply_into(x, y); }, iterations);
}

SymmetricMatrix::SymmetricMatrix(const Matrix& g) : n_(g.rows()) {
  if (g.rows() != g.cols()) throw std::invalid_argument("SymmetricMatrix: matrix not square");
  tiles_ = (n_ + kBlock - 1) / kBlock;
  offsets_.reserve(tiles_ * (tiles_ + 1) / 2);
  std::size_t total = 0;
  for (std::size_t ti = 0; ti < tiles_; ++ti)
    for (std::size_t tj = 0; tj <= ti; ++tj) {
      offsets_.push_back(total);
      total += std::min(kBlock, n_ - ti * kBlock) * std::min(kBlock, n_ - tj * kBlock);
    }
  data_.resize(total);
  for (std::size_t ti = 0; ti < tiles_; ++ti)
    for (std::size_t tj = 0; tj <= ti; ++tj) {
      double* dst = data_.data() + offsets_[ti * (ti + 1) / 2 + tj];
      const std::size_t rows = std::min(kBlock, n_ - ti * kBlock);
      const std::size_t cols = std::min(kBlock, n_ - tj * kBlock);
      for (std::size_t a = 0; a < rows; ++a)
        for (std::size_t b = 0; b < cols; ++b) dst[a * cols + b] = g(ti * kBlock + a, tj * kBlock + b);
    }
}

namespace {

// Row chunk sums of a tile; with col_acc set, also col_acc[b] += sum over
// rows a (in order) of t(a, b) v_a.
void tile_product(const double* t, std::size_t rows, std::size_t cols, const double* v_rows, const double* v_cols,
                  double* col_acc, double* row_out, std::size_t row_stride) {
  const std::size_t body = cols - cols % 4;
  std::size_t a = 0;
  if (col_acc) {
    for (; a + 2 <= rows; a += 2) {
      const double* x = t + a * cols;
      const double* y = x + cols;
      const V2 vx = {v_rows[a], v_rows[a]};
      const V2 vy = {v_rows[a + 1], v_rows[a + 1]};
      V2 x0 = {0.0, 0.0}, x1 = {0.0, 0.0}, y0 = {0.0, 0.0}, y1 = {0.0, 0.0};
      for (std::size_t b = 0; b < body; b += 4) {
        const V2 c0 = load2(v_cols + b), c1 = load2(v_cols + b + 2);
        const V2 xa = load2(x + b), xb = load2(x + b + 2);
        const V2 ya = load2(y + b), yb = load2(y + b + 2);
        x0 += xa * c0;
        x1 += xb * c1;
        y0 += ya * c0;
        y1 += yb * c1;
        V2 s0 = load2(col_acc + b), s1 = load2(col_acc + b + 2);
        s0 += xa * vx;
        s1 += xb * vx;
        s0 += ya * vy;
        s1 += yb * vy;
        store2(col_acc + b, s0);
        store2(col_acc + b + 2, s1);
      }
      double rx = x0[0], ry = y0[0];
      for (std::size_t b = body; b < cols; ++b) {
        rx += x[b] * v_cols[b];
        ry += y[b] * v_cols[b];
        col_acc[b] += x[b] * vx[0];
        col_acc[b] += y[b] * vy[0];
      }
      x0[0] = rx;
      y0[0] = ry;
      row_out[a * row_stride] = reduce4(x0, x1);
      row_out[(a + 1) * row_stride] = reduce4(y0, y1);
    }
  }
  for (; a < rows; ++a) {
    const double* x = t + a * cols;
    V2 x0 = {0.0, 0.0}, x1 = {0.0, 0.0};
    for (std::size_t b = 0; b < body; b += 4) {
      x0 += load2(x + b) * load2(v_cols + b);
      x1 += load2(x + b + 2) * load2(v_cols + b + 2);
    }
    double rx = x0[0];
    for (std::size_t b = body; b < cols; ++b) rx += x[b] * v_cols[b];
    x0[0] = rx;
    row_out[a * row_stride] = reduce4(x0, x1);
    if (col_acc)
      for (std::size_t b = 0; b < cols; ++b) col_acc[b] += x[b] * v_rows[a];
  }
}

}  // namespace

void SymmetricMatrix::multiply_into(std::span<const double> v, std::span<double> out) const {
  if (v.size() != n_ || out.size() != n_) throw std::invalid_argument("SymmetricMatrix: shape mismatch");
  // partial[i * tiles_ + t]: chunk t of row i. Tile (I, J) fills the row
  // chunks (rows of I, chunk J) and, below the diagonal, the mirrored chunks
  // (rows of J, chunk I), so every slot has exactly one writer.
  std::vector<double> partial(n_ * tiles_);
  parallel_for(tiles_, [&](std::size_t ti) {
    const std::size_t r0 = ti * kBlock;
    const std::size_t rows = std::min(kBlock, n_ - r0);
    double col_acc[kBlock];
    for (std::size_t tj = 0; tj <= ti; ++tj) {
      const std::size_t c0 = tj * kBlock;
      const std::size_t cols = std::min(kBlock, n_ - c0);
      const bool mirror = tj < ti;
      std::fill(col_acc, col_acc + cols, 0.0);
      tile_product(tile(ti, tj), rows, cols, v.data() + r0, v.data() + c0, mirror ? col_acc : nullptr,
                   partial.data() + r0 * tiles_ + tj, tiles_);
      if (mirror)
        for (std::size_t b = 0; b < cols; ++b) partial[(c0 + b) * tiles_ + ti] = col_acc[b];
    }
  });
  for (std::size_t i = 0; i < n_; ++i) out[i] = pairwise_sum(std::span<const double>(partial.data() + i * tiles_, tiles_));
}

}  // namespace cra
