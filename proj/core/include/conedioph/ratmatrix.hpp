#pragma once

#include "conedioph/rational.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace cd {

using RatVec = std::vector<Rational>;

/// Dense matrix of exact rationals. Sized for the desk scale (s <= ~10);
/// everything is plain Gaussian elimination over Q.
class RatMatrix {
 public:
  RatMatrix() = default;
  RatMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, Rational(0)) {}

  static RatMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool operator==(const RatMatrix& o) const = default;

  RatMatrix transpose() const;
  RatMatrix operator*(const RatMatrix& o) const;
  RatVec operator*(const RatVec& v) const;

  Rational det() const;
  /// Inverse via Gauss-Jordan; throws std::domain_error when singular.
  RatMatrix inverse() const;
  /// Basis of the right nullspace, one column vector per basis element.
  std::vector<RatVec> nullspace() const;

  Eigen::MatrixXd to_double() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Rational> data_;
};

Rational dot(const RatVec& a, const RatVec& b);

}  // namespace cd
