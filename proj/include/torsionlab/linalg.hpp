#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "torsionlab/rational.hpp"

namespace torsionlab {

using RatVec = std::vector<Rat>;

// Dense rational matrix stored row-major.
class RatMatrix {
 public:
  RatMatrix() = default;
  RatMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  static RatMatrix from_columns(const std::vector<RatVec>& columns, std::size_t rows);
  static RatMatrix from_rows(const std::vector<RatVec>& rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Rat& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rat& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  // Reduced row echelon form in place; returns pivot columns.
  std::vector<std::size_t> rref();
  std::size_t rank() const;
  Rat determinant() const;
  // Basis of {v : A v = 0}.
  std::vector<RatVec> nullspace() const;
  // Some x with A x = b, if one exists.
  std::optional<RatVec> solve(const RatVec& b) const;
  RatVec apply(const RatVec& v) const;
  RatMatrix transpose() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Rat> data_;
};

// Incrementally maintained basis of a subspace of Q^dim with coordinates of
// new vectors relative to the stored basis.
class SubspaceBasis {
 public:
  explicit SubspaceBasis(std::size_t dim) : dim_(dim) {}
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return basis_.size(); }
  const std::vector<RatVec>& vectors() const { return basis_; }
  bool contains(const RatVec& v) const;
  // Adds v if independent; returns whether it was added.
  bool add(const RatVec& v);
  // Coordinates of v in the stored basis, if v lies in the span.
  std::optional<RatVec> coordinates(const RatVec& v) const;

 private:
  std::size_t dim_;
  std::vector<RatVec> basis_;
  // Echelon copy used for membership tests: rows reduced, pivot per row.
  std::vector<RatVec> echelon_;
  std::vector<std::size_t> pivots_;
  RatVec reduce(RatVec v) const;
};

}  // namespace torsionlab
