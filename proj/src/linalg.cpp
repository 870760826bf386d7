#include "torsionlab/linalg.hpp"

#include "torsionlab/errors.hpp"

namespace torsionlab {

RatMatrix RatMatrix::from_columns(const std::vector<RatVec>& columns, std::size_t rows) {
  RatMatrix m(rows, columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != rows) throw DimensionMismatch("column length mismatch");
    for (std::size_t r = 0; r < rows; ++r) m(r, c) = columns[c][r];
  }
  return m;
}

RatMatrix RatMatrix::from_rows(const std::vector<RatVec>& rows, std::size_t cols) {
  RatMatrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw DimensionMismatch("row length mismatch");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

std::vector<std::size_t> RatMatrix::rref() {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols_ && row < rows_; ++col) {
    std::size_t p = row;
    while (p < rows_ && (*this)(p, col) == 0) ++p;
    if (p == rows_) continue;
    if (p != row)
      for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(p, c), (*this)(row, c));
    Rat inv = 1 / (*this)(row, col);
    for (std::size_t c = col; c < cols_; ++c) (*this)(row, c) *= inv;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == row || (*this)(r, col) == 0) continue;
      Rat f = (*this)(r, col);
      for (std::size_t c = col; c < cols_; ++c) (*this)(r, c) -= f * (*this)(row, c);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

std::size_t RatMatrix::rank() const {
  RatMatrix copy = *this;
  return copy.rref().size();
}

Rat RatMatrix::determinant() const {
  if (rows_ != cols_) throw DimensionMismatch("determinant of a non-square matrix");
  RatMatrix a = *this;
  Rat det = 1;
  for (std::size_t col = 0; col < cols_; ++col) {
    std::size_t p = col;
    while (p < rows_ && a(p, col) == 0) ++p;
    if (p == rows_) return 0;
    if (p != col) {
      for (std::size_t c = 0; c < cols_; ++c) std::swap(a(p, c), a(col, c));
      det = -det;
    }
    det *= a(col, col);
    for (std::size_t r = col + 1; r < rows_; ++r) {
      if (a(r, col) == 0) continue;
      Rat f = a(r, col) / a(col, col);
      for (std::size_t c = col; c < cols_; ++c) a(r, c) -= f * a(col, c);
    }
  }
  return det;
}

std::vector<RatVec> RatMatrix::nullspace() const {
  RatMatrix a = *this;
  auto pivots = a.rref();
  std::vector<bool> is_pivot(cols_, false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<RatVec> basis;
  for (std::size_t free = 0; free < cols_; ++free) {
    if (is_pivot[free]) continue;
    RatVec v(cols_, Rat(0));
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -a(r, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<RatVec> RatMatrix::solve(const RatVec& b) const {
  if (b.size() != rows_) throw DimensionMismatch("right-hand side length mismatch");
  RatMatrix aug(rows_, cols_ + 1);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) aug(r, c) = (*this)(r, c);
    aug(r, cols_) = b[r];
  }
  auto pivots = aug.rref();
  if (!pivots.empty() && pivots.back() == cols_) return std::nullopt;
  RatVec x(cols_, Rat(0));
  for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug(r, cols_);
  return x;
}

RatVec RatMatrix::apply(const RatVec& v) const {
  if (v.size() != cols_) throw DimensionMismatch("vector length mismatch");
  RatVec out(rows_, Rat(0));
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out[r] += (*this)(r, c) * v[c];
  return out;
}

RatMatrix RatMatrix::transpose() const {
  RatMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

RatVec SubspaceBasis::reduce(RatVec v) const {
  for (std::size_t i = 0; i < echelon_.size(); ++i) {
    const Rat f = v[pivots_[i]];
    if (f == 0) continue;
    for (std::size_t c = 0; c < dim_; ++c) v[c] -= f * echelon_[i][c];
  }
  return v;
}

bool SubspaceBasis::contains(const RatVec& v) const {
  RatVec r = reduce(v);
  for (const auto& x : r)
    if (x != 0) return false;
  return true;
}

bool SubspaceBasis::add(const RatVec& v) {
  if (v.size() != dim_) throw DimensionMismatch("vector length mismatch");
  RatVec r = reduce(v);
  std::size_t p = 0;
  while (p < dim_ && r[p] == 0) ++p;
  if (p == dim_) return false;
  Rat inv = 1 / r[p];
  for (auto& x : r) x *= inv;
  for (auto& row : echelon_) {
    Rat f = row[p];
    if (f == 0) continue;
    for (std::size_t c = 0; c < dim_; ++c) row[c] -= f * r[c];
  }
  echelon_.push_back(std::move(r));
  pivots_.push_back(p);
  basis_.push_back(v);
  return true;
}

std::optional<RatVec> SubspaceBasis::coordinates(const RatVec& v) const {
  if (basis_.empty()) {
    for (const auto& x : v)
      if (x != 0) return std::nullopt;
    return RatVec{};
  }
  return RatMatrix::from_columns(basis_, dim_).solve(v);
}

}  // namespace torsionlab
