#include "conedioph/chart.hpp"

#include "conedioph/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace cd {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;

// w in frame coordinates; throws when w is not opposite to v0 (last frame
// coordinate vanishes, i.e. b_L(v0, w) = 0).
Eigen::VectorXd frame_coords_opposite(const CuspFrame& frame, const Eigen::VectorXd& w) {
  Eigen::VectorXd wf = frame.Pi_inv * w;
  if (std::abs(wf(wf.size() - 1)) < 1e-14 * wf.cwiseAbs().maxCoeff())
    throw std::domain_error("chart: w is not opposite to v0");
  return wf;
}

}  // namespace

double middle_form(const CuspFrame& frame, const Eigen::VectorXd& b) {
  return b.dot(frame.middle_matrix() * b);
}

Eigen::MatrixXd unipotent_matrix(const CuspFrame& frame, const Eigen::VectorXd& b) {
  const Eigen::Index s = static_cast<Eigen::Index>(frame.dim());
  if (b.size() != s - 2) throw std::invalid_argument("unipotent_matrix: bad chart dimension");
  Eigen::MatrixXd u = Eigen::MatrixXd::Identity(s, s);
  Eigen::VectorXd mb = frame.middle_matrix() * b;
  u.block(0, 1, 1, s - 2) = -mb.transpose();
  u(0, s - 1) = -0.5 * b.dot(mb);
  u.block(1, s - 1, s - 2, 1) = b;
  return u;
}

Eigen::VectorXd unipotent_point(const CuspFrame& frame, const Eigen::VectorXd& b) {
  const Eigen::Index s = static_cast<Eigen::Index>(frame.dim());
  if (b.size() != s - 2) throw std::invalid_argument("unipotent_point: bad chart dimension");
  Eigen::VectorXd y(s);
  y(0) = -0.5 * middle_form(frame, b);
  y.segment(1, s - 2) = -b;
  y(s - 1) = 1.0;
  return frame.Pi * y;
}

Eigen::VectorXd line_to_unipotent(const CuspFrame& frame, const Eigen::VectorXd& d) {
  const Eigen::Index s = static_cast<Eigen::Index>(frame.dim());
  Eigen::VectorXd y = frame_coords_opposite(frame, d);
  y /= y(s - 1);
  return -y.segment(1, s - 2);
}

bool trace_membership(const CuspFrame& frame, const Eigen::VectorXd& w, double t,
                      const Eigen::VectorXd& b) {
  const Eigen::Index s = static_cast<Eigen::Index>(frame.dim());
  Eigen::VectorXd wf = frame_coords_opposite(frame, w);
  if (wf.head(s - 1).cwiseAbs().maxCoeff() < 1e-14 * std::abs(wf(s - 1))) {
    // w = lambda e_s in the frame: closed-form inequality.
    double lam2 = wf(s - 1) * wf(s - 1);
    double lp = middle_form(frame, b);
    double lhs = 0.25 * std::exp(t / kSqrt2) * lp * lp + b.squaredNorm() + std::exp(-t / kSqrt2);
    return lhs <= 1.0 / lam2;
  }
  return trace_value_matrix(frame, w, t, b) <= 0.0;
}

double trace_value_matrix(const CuspFrame& frame, const Eigen::VectorXd& w, double t,
                          const Eigen::VectorXd& b) {
  const Eigen::Index s = static_cast<Eigen::Index>(frame.dim());
  Eigen::VectorXd wf = frame_coords_opposite(frame, w);
  Eigen::VectorXd x = unipotent_matrix(frame, b) * wf;
  double q = std::exp(t / kSqrt2) * x(0) * x(0) + x.segment(1, s - 2).squaredNorm() +
             std::exp(-t / kSqrt2) * x(s - 1) * x(s - 1);
  return kSqrt2 * std::log(q);
}

double ball_volume(int d, double radius) {
  if (d == 0) return 1.0;
  const double pi = 3.14159265358979323846;
  return std::pow(pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0) * std::pow(radius, d);
}

TraceEstimate trace_measure_mc(const CuspFrame& frame, const Eigen::VectorXd& w, double t,
                               std::uint64_t samples, std::uint64_t seed, double kappa0) {
  auto [pos, neg] = frame.L.signature();
  if (std::min(pos, neg) < 2)
    throw std::domain_error("trace_measure_mc: signature (a,b) needs min(a,b) >= 2");
  const int delta = static_cast<int>(frame.chart_dim());
  Eigen::VectorXd wf = frame_coords_opposite(frame, w);
  double bl = wf(wf.size() - 1);  // b_{L0}(e_1, wf)
  double d0 = 2.0 * kSqrt2 * std::log(std::abs(bl));

  TraceEstimate out;
  out.center = line_to_unipotent(frame, w);
  out.radius = kappa0 * std::exp(-d0 / (2.0 * kSqrt2));
  out.samples = samples;
  if (t < d0) return out;  // empty trace set

  Rng rng(seed);
  double vol = ball_volume(delta, out.radius);
  std::uint64_t hits = 0;
  Eigen::VectorXd b(delta);
  for (std::uint64_t k = 0; k < samples; ++k) {
    // Uniform in the ball by rejection from the bounding cube; the rejected
    // draws consume RNG output, so merges must partition by sample index.
    for (;;) {
      for (int i = 0; i < delta; ++i) b(i) = rng.uniform(-out.radius, out.radius);
      if (b.squaredNorm() <= out.radius * out.radius) break;
    }
    b += out.center;
    if (trace_membership(frame, w, t, b)) ++hits;
  }
  out.hits = hits;
  double p = static_cast<double>(hits) / static_cast<double>(samples);
  out.estimate = vol * p;
  out.stderror = vol * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  return out;
}

}  // namespace cd
