#pragma once

#include "conedioph/ratmatrix.hpp"

#include <iosfwd>
#include <optional>
#include <utility>

namespace cd {

/// Symmetric rational quadratic/bilinear form on Q^s, stored as the full
/// symmetric matrix, with cached exact determinant and signature.
class RatSymForm {
 public:
  explicit RatSymForm(RatMatrix entries);

  std::size_t dim() const { return entries_.rows(); }
  const RatMatrix& matrix() const { return entries_; }
  const Rational& det() const { return det_; }
  /// (positive, negative) inertia counts; pos + neg < dim iff degenerate.
  std::pair<int, int> signature() const { return signature_; }
  bool nondegenerate() const { return det_ != 0; }

  /// Quadratic value q(v) = v^T M v, exact.
  Rational operator()(const RatVec& v) const;

  /// Polar bilinear form b(v, w) = v^T M w, exact.
  Rational bilinear(const RatVec& v, const RatVec& w) const;

  /// Congruent form B^T M B.
  RatSymForm congruent(const RatMatrix& b) const;

 private:
  RatMatrix entries_;
  Rational det_;
  std::pair<int, int> signature_;
};

/// Primitive integer vector on the cone of an owning form, normalized so
/// the last nonzero coordinate is positive.
struct IsotropicVector {
  std::vector<Int> coords;

  Int height() const;        // max-norm
  double eheight() const;    // Euclidean norm
  RatVec rational() const;
  Eigen::VectorXd real() const;

  bool operator==(const IsotropicVector& o) const = default;
  /// (height, lexicographic) order used everywhere for determinism.
  bool operator<(const IsotropicVector& o) const;
};

/// Normalizes an integer vector to its primitive representative with the
/// last nonzero coordinate positive. Throws on the zero vector.
IsotropicVector normalize_primitive(std::vector<Int> coords);

/// The suspension x_{n+1}^2 - q(x_1..x_n). Signature (a,b) -> (b+1,a),
/// determinant -det(q). Throws std::invalid_argument when q is degenerate.
RatSymForm suspend_form(const RatSymForm& q);

/// Smallest-height primitive nonzero integer isotropic vector with max-norm
/// at most height_bound, ties broken lexicographically. nullopt when none
/// exists within the bound.
std::optional<IsotropicVector> find_isotropic_seed(const RatSymForm& L, long height_bound);

/// Text serialization: first line the dimension, then the upper triangle row
/// by row as "p/q" tokens, whitespace separated.
RatSymForm read_form(std::istream& in);
void write_form(std::ostream& out, const RatSymForm& f);
RatSymForm read_form_file(const std::string& path);

}  // namespace cd
