#pragma once

#include "conedioph/posdef.hpp"
#include "conedioph/wittframe.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace cd {

/// Chart coordinate on the opposite unipotent group of a cusp frame:
/// a vector of length s-2 with the Euclidean invariant metric.
struct UnipotentCoord {
  Eigen::VectorXd b;
};

/// The unipotent matrix u(b) in frame coordinates:
/// [[1, -(M' b)^T, -L0'(b)/2], [0, I, b], [0, 0, 1]] with M' the middle
/// block of the normal form. Preserves the normal form exactly.
Eigen::MatrixXd unipotent_matrix(const CuspFrame& frame, const Eigen::VectorXd& b);

/// Value of the middle form L0'(b) = b^T M' b.
double middle_form(const CuspFrame& frame, const Eigen::VectorXd& b);

/// The cone line d(b): ambient representative of the +infinity endpoint of
/// the geodesic flowed by u(b). b = 0 gives the line of the opposite
/// vector w.
Eigen::VectorXd unipotent_point(const CuspFrame& frame, const Eigen::VectorXd& b);

/// Inverse chart. Throws std::domain_error when the line lies in the
/// hyperplane ker b_L(v0, .) ("line at infinity of the chart").
Eigen::VectorXd line_to_unipotent(const CuspFrame& frame, const Eigen::VectorXd& d);

/// True iff the flowed chart point lies in the horoball of w:
/// Q_t(u(b) w_frame) <= 1. Uses the closed-form inequality when w is a
/// multiple of the opposite frame vector. Throws when w is not opposite
/// to v0.
bool trace_membership(const CuspFrame& frame, const Eigen::VectorXd& w, double t,
                      const Eigen::VectorXd& b);

/// f_w at the flowed chart point, evaluated through the full matrix route:
/// sqrt(2) ln Q_t(u(b) w_frame). Membership is value <= 0.
double trace_value_matrix(const CuspFrame& frame, const Eigen::VectorXd& w, double t,
                          const Eigen::VectorXd& b);

struct TraceEstimate {
  double estimate = 0.0;
  double stderror = 0.0;
  double radius = 0.0;       // sampling ball radius kappa0 e^{-D/(2 sqrt 2)}
  Eigen::VectorXd center;    // chart coordinate of u_w
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
};

/// Monte-Carlo chart measure of the trace set Tr_t(w), sampled uniformly in
/// the bounding ball around u_w. Deterministic for a fixed seed; partitions
/// by sample ranges merge by summing hits. Requires min(a,b) >= 2 for the
/// signature (a,b) of the frame's form.
TraceEstimate trace_measure_mc(const CuspFrame& frame, const Eigen::VectorXd& w, double t,
                               std::uint64_t samples, std::uint64_t seed, double kappa0 = 1.0);

/// Volume of the Euclidean ball of the given radius in dimension d.
double ball_volume(int d, double radius);

}  // namespace cd
