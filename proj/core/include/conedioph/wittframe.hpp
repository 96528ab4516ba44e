#pragma once

#include "conedioph/forms.hpp"

#include <Eigen/Dense>

namespace cd {

/// A Witt basis {v0, w_1..w_{s-2}, w} putting a nondegenerate form L into
/// the normal shape 2x_1x_s + 2x_2x_{s-1} + ... + eps*(middle squares),
/// together with the frame geodesic and unipotent chart attached to v0.
///
/// The basis is rational whenever hyperbolic pairs can be split off over Q;
/// when the anisotropic middle block cannot be rescaled to +-1 by rational
/// squares, per-column real scalings are stored (and `exact` is false).
struct CuspFrame {
  RatSymForm L;
  IsotropicVector v0;

  RatMatrix basis;                 // columns v0, w_1..w_{s-2}, w
  std::vector<double> col_scale;   // real factor applied to each column
  bool rational_valid = true;      // real basis == basis * diag(col_scale)
  bool exact = true;               // all scales are exactly 1

  int ell = 0;                     // number of hyperbolic pairs
  int eps = 1;                     // sign of the anisotropic middle block

  Eigen::MatrixXd Pi;              // real basis matrix
  Eigen::MatrixXd Pi_inv;

  std::size_t dim() const { return L.dim(); }
  std::size_t chart_dim() const { return dim() - 2; }

  /// Matrix of the normal form 2x_1x_s + ... + eps*(squares) for this
  /// (dim, ell, eps).
  RatMatrix normal_matrix() const;
  /// Restriction of the normal form to the middle coordinates 2..s-1.
  Eigen::MatrixXd middle_matrix() const;

  /// The opposite cusp vector (last basis column), real coordinates.
  Eigen::VectorXd opposite() const { return Pi.col(Pi.cols() - 1); }
  /// Rational opposite vector; only meaningful when rational_valid.
  RatVec opposite_rational() const;

  /// Frame geodesic G(t) = (Pi^-1)^T diag(e^{t/sqrt2},1,..,1,e^{-t/sqrt2}) Pi^-1
  /// in ambient coordinates; G(-inf) is the line of v0.
  Eigen::MatrixXd geodesic(double t) const;
  /// Same geodesic written in frame coordinates (a diagonal matrix).
  Eigen::MatrixXd geodesic_frame(double t) const;

  Eigen::VectorXd to_frame(const Eigen::VectorXd& ambient) const { return Pi_inv * ambient; }
  Eigen::VectorXd from_frame(const Eigen::VectorXd& frame) const { return Pi * frame; }
};

RatMatrix normal_form_matrix(std::size_t s, int ell, int eps);

/// Builds the Witt frame for (L, v0). Throws std::invalid_argument when L is
/// degenerate or v0 is not isotropic for L.
CuspFrame witt_frame(const RatSymForm& L, const IsotropicVector& v0);

}  // namespace cd
