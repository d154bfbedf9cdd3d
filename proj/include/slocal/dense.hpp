/// Minimal column-major dense complex matrix. Storage is contiguous,
/// a(i,j) = data[i + j*rows], matching LAPACK conventions so buffers can be
/// handed to LAPACKE/CBLAS without copies.

#pragma once

#include "slocal/common.hpp"

#include <cstddef>
#include <vector>

namespace slocal {

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  cplx& operator()(std::size_t i, std::size_t j) {
    return data_[i + j * rows_];
  }
  const cplx& operator()(std::size_t i, std::size_t j) const {
    return data_[i + j * rows_];
  }

  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }

  cplx* col(std::size_t j) { return data_.data() + j * rows_; }
  const cplx* col(std::size_t j) const { return data_.data() + j * rows_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

}  // namespace slocal
