#pragma once

#include <cstdint>
#include <vector>

#include "majorize/scalar.hpp"

namespace majorize {

/// Dense row-major matrix of scalars.
struct DenseMatrix {
  std::size_t nrows = 0, ncols = 0;
  std::vector<Scalar> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : nrows(r), ncols(c), data(r * c, Scalar(0)) {}

  Scalar& at(std::size_t i, std::size_t j) { return data[i * ncols + j]; }
  const Scalar& at(std::size_t i, std::size_t j) const { return data[i * ncols + j]; }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = Scalar(1);
    return m;
  }

  bool exact() const {
    for (const auto& v : data)
      if (!v.is_exact()) return false;
    return true;
  }

  Scalar row_sum(std::size_t i) const {
    Scalar s(0);
    for (std::size_t j = 0; j < ncols; ++j) s += at(i, j);
    return s;
  }
  Scalar col_sum(std::size_t j) const {
    Scalar s(0);
    for (std::size_t i = 0; i < nrows; ++i) s += at(i, j);
    return s;
  }
};

}  // namespace majorize
