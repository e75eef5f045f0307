#ifndef FATT_MATRIX_HPP
#define FATT_MATRIX_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "fatt/errors.hpp"

namespace fatt {

// Dense row-major matrix of doubles. All transform and feature code works on
// this one type; images are converted to it on ingestion.
class Matrix {
 public:
  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

  static Matrix from_rows(std::size_t rows, std::size_t cols, std::vector<double> values) {
    if (values.size() != rows * cols)
      throw InvalidArgument("matrix value count does not match shape");
    Matrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.values_ = std::move(values);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return values_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  double sum_of_squares() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return s;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

}  // namespace fatt

#endif
