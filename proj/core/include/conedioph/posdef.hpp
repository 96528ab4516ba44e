#pragma once

#include "conedioph/forms.hpp"
#include "conedioph/wittframe.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <functional>

namespace cd {

/// Tolerances used by PosDefForm validation, fixed artifact-wide.
inline constexpr double kSymmetryTol = 1e-12;
inline constexpr double kDetTol = 1e-9;

/// A positive definite quadratic form with a pinned determinant: det 1 for
/// the ambient symmetric space, |det L| for the subspace of forms
/// dominating |L|.
class PosDefForm {
 public:
  explicit PosDefForm(Eigen::MatrixXd entries, double det_target = 1.0);

  /// Builds Q = F F^T from an explicit factor with a known exact inverse.
  /// This is the only way to represent points whose spectrum exceeds the
  /// double-precision condition limit (e.g. ray points at large time):
  /// the assembled matrix would not be Cholesky-decomposable there, but
  /// the factor pair stays well-behaved.
  static PosDefForm from_factor(Eigen::MatrixXd f, Eigen::MatrixXd f_inv,
                                double det_target);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const Eigen::MatrixXd& matrix() const { return m_; }
  double det_target() const { return det_target_; }
  /// Factor F with Q = F F^T (lower-triangular Cholesky unless the form was
  /// built from an explicit factor) and its inverse.
  const Eigen::MatrixXd& factor() const { return factor_; }
  const Eigen::MatrixXd& inv_factor() const { return inv_factor_; }

  /// Q(v) = ||F^T v||^2; evaluated through the factor, so it never loses
  /// positivity to cancellation.
  double operator()(const Eigen::VectorXd& v) const {
    return (factor_.transpose() * v).squaredNorm();
  }

  /// B^T Q B; the determinant target scales by det(B)^2.
  PosDefForm congruent(const Eigen::MatrixXd& b) const;

  /// Dual form Q^* (the inverse matrix).
  PosDefForm dual() const;

  nlohmann::json to_json() const;
  static PosDefForm from_json(const nlohmann::json& j);

 private:
  PosDefForm() = default;

  Eigen::MatrixXd m_;
  Eigen::MatrixXd factor_;
  Eigen::MatrixXd inv_factor_;
  double det_target_ = 1.0;
};

/// Canonical symmetric-space distance sqrt(sum (ln lambda_i)^2) over the
/// eigenvalues of q2 relative to q1. Computed from the singular values of
/// C1^{-1} C2 (Cholesky factors), which keeps full relative accuracy even
/// when the relative spectrum spans many orders of magnitude.
double distance(const PosDefForm& q1, const PosDefForm& q2);

/// Busemann function with basepoint the line of v: sqrt(2) ln Q(v).
/// Requires Q(v) > 0 and v != 0.
double busemann_vector(const Eigen::VectorXd& v, const PosDefForm& q);

/// Ambient Busemann function of a generic vector basepoint on P_s:
/// sqrt(s/(s-1)) ln Q(v), and its dual sqrt(s/(s-1)) ln Q^*(v) for the
/// wall s-1. Note the different normalization from the P_s(L) version.
double busemann_ambient_vector(const Eigen::VectorXd& v, const PosDefForm& q);
double busemann_ambient_dual(const Eigen::VectorXd& v, const PosDefForm& q);

/// Ambient Busemann function of wall index i in 1..s-1:
/// sqrt(s/((s-i)i)) * ln det of the bottom-right i x i block.
double busemann_ambient(int i, const PosDefForm& q);

/// The ambient ray r_i(t) = diag(e^{lambda_i t} x (s-i), e^{-mu_i t} x i),
/// lambda_i = sqrt(i/(s(s-i))), mu_i = sqrt((s-i)/(si)); unit speed, det 1,
/// asymptotic to the basepoint of busemann_ambient(i, .).
PosDefForm ambient_ray(std::size_t s, int i, double t);

/// The Busemann ray of the frame basepoint v0: r(T) = G(-T), so that
/// distance(Q, r(T)) - T decreases to f_{v0}(Q).
PosDefForm frame_ray(const CuspFrame& frame, double t);

/// |(distance(q, ray(T)) - T) - f_closed|: deviation of the closed form
/// from the limit definition truncated at T.
double busemann_limit_check(double f_closed,
                            const std::function<PosDefForm(double)>& ray,
                            const PosDefForm& q, double T);

/// Oriented distance between the horoballs of v and w:
/// 2 sqrt(2) ln |b_L(v, w)|. Throws std::domain_error when b_L(v,w) = 0
/// (the basepoints are not opposite).
double odist(const RatVec& v, const RatVec& w, const RatSymForm& l);
double odist(const Eigen::VectorXd& v, const Eigen::VectorXd& w,
             const Eigen::MatrixXd& l);

}  // namespace cd
