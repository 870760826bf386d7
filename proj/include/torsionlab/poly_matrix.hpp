#pragma once

#include <cstddef>
#include <vector>

#include "torsionlab/polynomial.hpp"

namespace torsionlab {

// Dense row-major matrix of polynomials over a common ring.
class PolyMatrix {
 public:
  PolyMatrix(std::size_t rows, std::size_t cols, std::size_t nvars);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nvars() const { return nvars_; }
  RatPoly& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const RatPoly& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  PolyMatrix without_column(std::size_t c) const;
  PolyMatrix operator*(const PolyMatrix& o) const;

 private:
  std::size_t rows_, cols_, nvars_;
  std::vector<RatPoly> data_;
};

// Fraction-free Bareiss elimination with exact polynomial division.
RatPoly determinant(const PolyMatrix& m);

// Laplace expansion along the first row. Exponential cost; used as a
// reference for small matrices.
RatPoly determinant_cofactor(const PolyMatrix& m);

// Rows are the components of maps[i], columns the variables in `vars`.
PolyMatrix jacobian(const std::vector<RatPoly>& maps, const std::vector<std::size_t>& vars);

}  // namespace torsionlab
