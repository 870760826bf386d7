#include "torsionlab/poly_matrix.hpp"

#include "torsionlab/errors.hpp"

namespace torsionlab {

PolyMatrix::PolyMatrix(std::size_t rows, std::size_t cols, std::size_t nvars)
    : rows_(rows), cols_(cols), nvars_(nvars), data_(rows * cols, RatPoly(nvars)) {}

PolyMatrix PolyMatrix::without_column(std::size_t c) const {
  PolyMatrix out(rows_, cols_ - 1, nvars_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t j = 0, k = 0; j < cols_; ++j)
      if (j != c) out(r, k++) = (*this)(r, j);
  return out;
}

PolyMatrix PolyMatrix::operator*(const PolyMatrix& o) const {
  if (cols_ != o.rows_) throw DimensionMismatch("matrix product shape mismatch");
  PolyMatrix out(rows_, o.cols_, nvars_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < o.cols_; ++j)
      for (std::size_t k = 0; k < cols_; ++k) out(i, j) += (*this)(i, k) * o(k, j);
  return out;
}

RatPoly determinant(const PolyMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("determinant of a non-square matrix");
  std::size_t n = m.rows();
  if (n == 0) return RatPoly::constant(m.nvars(), 1);
  PolyMatrix a = m;
  RatPoly prev = RatPoly::constant(m.nvars(), 1);
  bool negate = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k).is_zero()) {
      std::size_t swap = k + 1;
      while (swap < n && a(swap, k).is_zero()) ++swap;
      if (swap == n) return RatPoly(m.nvars());
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(swap, j));
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        RatPoly v = a(i, j) * a(k, k) - a(i, k) * a(k, j);
        a(i, j) = divide_exact(v, prev);
      }
      a(i, k) = RatPoly(m.nvars());
    }
    prev = a(k, k);
  }
  RatPoly d = a(n - 1, n - 1);
  return negate ? -d : d;
}

RatPoly determinant_cofactor(const PolyMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("determinant of a non-square matrix");
  std::size_t n = m.rows();
  if (n == 0) return RatPoly::constant(m.nvars(), 1);
  if (n == 1) return m(0, 0);
  RatPoly sum(m.nvars());
  for (std::size_t c = 0; c < n; ++c) {
    if (m(0, c).is_zero()) continue;
    PolyMatrix minor(n - 1, n - 1, m.nvars());
    for (std::size_t r = 1; r < n; ++r)
      for (std::size_t j = 0, k = 0; j < n; ++j)
        if (j != c) minor(r - 1, k++) = m(r, j);
    RatPoly term = m(0, c) * determinant_cofactor(minor);
    if (c % 2) sum -= term;
    else sum += term;
  }
  return sum;
}

PolyMatrix jacobian(const std::vector<RatPoly>& maps, const std::vector<std::size_t>& vars) {
  std::size_t nv = maps.empty() ? 0 : maps[0].nvars();
  PolyMatrix j(maps.size(), vars.size(), nv);
  for (std::size_t r = 0; r < maps.size(); ++r)
    for (std::size_t c = 0; c < vars.size(); ++c) j(r, c) = maps[r].partial(vars[c]);
  return j;
}

}  // namespace torsionlab
