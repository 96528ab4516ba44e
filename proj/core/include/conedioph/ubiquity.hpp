#pragma once

#include "conedioph/dioph.hpp"

#include <json.hpp>

#include <cstdint>
#include <vector>

namespace cd {

/// A local ubiquitous system over a compact chart patch: resonant points
/// p_i with weights w(i) = d_w, an ambient box patch carrying Lebesgue
/// measure with exponent delta, a decreasing ubiquity function rho probed
/// along u_n = n t, and the regularity factor lambda.
struct UbiquitySpec {
  std::vector<ChartPoint> resonant;  // points with weights; finite sublevels
  Eigen::VectorXd patch_lo, patch_hi;
  Rational delta = 1;       // measure exponent (Lebesgue: patch dimension)
  ApproxFunction rho = ApproxFunction::exp_rate(1);
  double t = 1.0;           // u_n = n t
  double lambda = 0.5;      // regularity factor, must lie in (0, 1)
  double r1 = 0.1;          // largest ball radius probed
  double kappa = 1.0;       // fitted coefficient of rho

  double u(int n) const { return n * t; }
  double rho_at(double x) const { return kappa * rho(x); }
};

/// Builds the canonical spec for a cone-point pool: resonant points are the
/// chart coordinates u_w inside the patch, weights are d_w, rho(x) =
/// kappa e^{-x/(2 sqrt 2)} with kappa fitted so that rho(u_n) covers the
/// patch at the deepest probed levels (scaled covering-radius fit).
UbiquitySpec make_ubiquity_spec(const std::vector<IsotropicVector>& pool, const CuspFrame& frame,
                                Eigen::VectorXd patch_lo, Eigen::VectorXd patch_hi, double t,
                                int fit_levels, int fit_samples, std::uint64_t seed);

/// True iff rho(u_{n+1}) <= lambda rho(u_n) for every probed n in
/// [n_min, n_max]. Throws std::invalid_argument unless lambda is in (0,1).
bool u_regular_check(const UbiquitySpec& spec, int n_min, int n_max = 200);

struct MeasureConditionFit {
  double a = 0.0;   // lower constant: a R^delta <= m(B)
  double b = 0.0;   // upper constant: m(B) <= b R^delta
  double r0 = 0.0;  // largest radius sampled
  nlohmann::json to_json() const;
};

/// Fits the two-sided measure-growth constants by sampling `balls` random
/// centers in the patch at each of `radii` radii up to spec.r1; m(B) is the
/// Lebesgue volume of B intersected with the patch, MC-estimated.
MeasureConditionFit fit_measure_condition(const UbiquitySpec& spec, int balls, int radii,
                                          int mc_samples, std::uint64_t seed);

struct UbiquityEstimate {
  double kappa_hat = 0.0;           // infimum of stabilized coverage fractions
  std::vector<int> n0;              // per-ball stabilization index
  std::vector<double> ball_inf;     // per-ball infimum over n >= n0
  nlohmann::json to_json() const;
};

/// MC estimate of the local ubiquity constant: for `ball_samples` random
/// balls B of radius <= r1 in the patch, estimates the covered fraction
/// m(B cap union of B(p_i, rho(u_n)) over w(i) <= u_n) / m(B) for each n
/// in [n_lo, n_hi], picks n0(B) as the first n where two consecutive
/// estimates agree within 10%, and returns the infimum over (B, n >= n0(B)).
/// Throws std::invalid_argument when the pool is too shallow for u(n_hi).
/// Deterministic for a fixed seed, independent of `threads`.
UbiquityEstimate local_ubiquity_estimate(const UbiquitySpec& spec, int ball_samples, int n_lo,
                                         int n_hi, int mc_samples, std::uint64_t seed,
                                         int threads = 1);

/// A dimension function x^s ln(1/x)^g near zero, kept exact.
struct DimensionFunction {
  Rational s = 1;
  Rational g = 0;
};

enum class DivergenceVerdict { MeasureInfinite, MeasureFiniteCover };

struct ClassifierReport {
  DivergenceVerdict verdict = DivergenceVerdict::MeasureFiniteCover;
  bool symbolic = false;       // exact exponent comparison vs numeric fallback
  Rational lhs = 0, rhs = 0;   // diverges iff lhs < rhs, or == with g >= -1
  nlohmann::json to_json() const;
};

/// Classifies sum_n phi(psi(u_n)) rho(u_n)^{-delta}: divergence means the
/// limsup set carries infinite measure (conditional on the system's
/// regularity, measure and ubiquity hypotheses, which are checked
/// separately); convergence means a finite Hausdorff-Cantelli cover. For
/// exponential-rate psi and rho the verdict is an exact rational
/// comparison s * m_psi vs delta * m_rho; otherwise numeric partial sums
/// with a geometric ratio heuristic decide. Throws std::invalid_argument
/// when phi is not a dimension function dominating x^delta.
ClassifierReport divergence_classifier(const DimensionFunction& phi, const ApproxFunction& psi,
                                       const UbiquitySpec& spec);

}  // namespace cd
