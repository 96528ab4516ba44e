#pragma once

#include "conedioph/chart.hpp"
#include "conedioph/conepoints.hpp"
#include "conedioph/forms.hpp"
#include "conedioph/wittframe.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace cd {

/// An approximating function, either a power law c x^{-alpha} (ln x)^gamma
/// on the denominator side or an exponential rate c e^{-m x / (2 sqrt 2)}
/// on the chart side. alpha, gamma and the rate multiplier m are kept as
/// exact rationals so limit hypotheses and predicted dimensions are decided
/// symbolically, not numerically.
class ApproxFunction {
 public:
  enum class Kind { PowerLaw, ExpRate };

  static ApproxFunction power_law(Rational alpha, Rational gamma = 0, double coef = 1.0);
  static ApproxFunction exp_rate(Rational mult, double coef = 1.0);

  double operator()(double x) const;

  Kind kind() const { return kind_; }
  const Rational& alpha() const;
  const Rational& gamma() const;
  /// Rate multiplier m of e^{-m x/(2 sqrt 2)}.
  const Rational& rate() const;
  double coef() const { return coef_; }
  /// x beyond which the function is decreasing.
  double x0() const { return x0_; }

  /// psi(x) -> 0, decided from the exponents.
  bool decreasing_to_zero() const;
  /// x psi(x) -> 0 (the rigidity hypothesis), decided symbolically.
  bool x_psi_to_zero() const;
  /// sigma = limsup ln x / (ln x - ln psi(x)) = 1/(1+alpha), exact.
  Rational sigma() const;

 private:
  Kind kind_ = Kind::PowerLaw;
  Rational alpha_ = 1, gamma_ = 0, rate_ = 1;
  double coef_ = 1.0;
  double x0_ = 1.0;
};

/// Exact predicted Hausdorff dimension (n-1) sigma = (n-1)/(1+alpha).
Rational predicted_dimension(const ApproxFunction& psi, int n);

/// Chart-side counterpart of a power law psi under x = 2 sqrt2 ln q:
/// psi(e^{x/2 sqrt2}) / e^{x/2 sqrt2} = e^{-(1+alpha) x / (2 sqrt 2)}.
ApproxFunction chart_side(const ApproxFunction& psi);

struct Approximant {
  IsotropicVector point;
  long long q = 0;
  double error = 0.0;  // achieved max-norm error ||q x - p||
};

/// All pool points (p, q), q <= q_max, with ||q x - p|| <= psi(q); sorted
/// by q (pool order).
std::vector<Approximant> approximants(const Eigen::VectorXd& x, const ApproxFunction& psi,
                                      long q_max, const std::vector<IsotropicVector>& pool);

struct RigidityReport {
  bool xpsi_hypothesis = false;   // x psi(x) -> 0 holds symbolically
  Int denominator = 1;            // N with q(Z^n) in (1/N) Z
  std::uint64_t events = 0;       // approximant events found by the scan
  std::uint64_t off_quadric = 0;  // events with q(p/q) != 1 exactly
  long empirical_q0 = 1;          // smallest q with no off-quadric event beyond
  double theoretical_q0 = 0.0;    // +infinity when the hypothesis fails
  nlohmann::json to_json() const;
};

/// Scans random points on the quadric against ALL nearby rationals p/q
/// (full box, not restricted to the quadric) with ||x - p/q|| <= psi(q)/q,
/// checking q(p) = q^2 in exact arithmetic. Throws when psi does not
/// decrease to zero; when psi -> 0 but x psi(x) does not, the scan still
/// runs and the theoretical threshold is reported as infinity.
RigidityReport check_rigidity(const RatSymForm& q, const ApproxFunction& psi, long q_max,
                                   int trials, std::uint64_t seed);

struct DwWeight {
  double dw = 0.0;         // 2 sqrt2 ln |b_L(v0, w)|
  double deviation = 0.0;  // |dw - 2 sqrt2 ln ||w|| |
};

/// Weight of a cusp point: the oriented distance from the reference
/// horoball. Throws std::domain_error when w is in ker b_L(v0, .).
DwWeight dw_weight(const IsotropicVector& w, const CuspFrame& frame);

struct ChartPoint {
  Eigen::VectorXd b;  // chart coordinate u_w
  double dw = 0.0;
  std::size_t pool_index = 0;
};

/// Chart coordinates and weights of the pool points opposite to v0 (points
/// on ker b_L(v0, .) carry no chart coordinate and are skipped), optionally
/// restricted to a region.
std::vector<ChartPoint> chart_points(const std::vector<IsotropicVector>& pool,
                                     const CuspFrame& frame,
                                     const ConeRegion& region = ConeRegion::all());

/// #{w in pool : ||b - u_w|| <= Psi(d_w)} — finite-truncation membership
/// count for the chart-side limsup set.
std::uint64_t stilde_count(const Eigen::VectorXd& b, const ApproxFunction& psi_chart,
                           const std::vector<IsotropicVector>& pool, const CuspFrame& frame);

struct InclusionReport {
  double l = 1.0;        // scale constant between q and e^{d_w / 2 sqrt2}
  double l1 = 1.0;       // bi-Lipschitz constant of the chart comparison
  std::uint64_t events_psi = 0;
  std::uint64_t events_psi1 = 0;
  std::uint64_t events_psi2 = 0;
  std::uint64_t violations = 0;  // bracket failures Psi1 => psi => Psi2
  nlohmann::json to_json() const;
};

/// Verifies the double inclusion S~_{Psi1} subset S_psi subset S~_{Psi2}
/// event by event over the pool, with Psi1(x) = psi(L e^{x/2 sqrt2}) /
/// (L1 e^{x/2 sqrt2}) and Psi2(x) = L1 psi(e^{x/2 sqrt2}/L) / e^{x/2 sqrt2}.
/// Constants are fitted over the patch unless overridden. Throws when the
/// line of x lies in ker b_L(v0, .).
InclusionReport inclusion_check(const Eigen::VectorXd& x, const ApproxFunction& psi,
                                const std::vector<IsotropicVector>& pool, const CuspFrame& frame,
                                std::optional<double> l_override = std::nullopt,
                                std::optional<double> l1_override = std::nullopt);

struct CrossoverReport {
  double t = 0.0;                       // shell width
  std::vector<double> s_grid;
  std::vector<bool> bounded;            // per grid point
  std::vector<std::uint64_t> shell_counts;
  double crossover = 0.0;               // smallest bounded s; NaN when none
  nlohmann::json to_json() const;
};

/// Default shell width: 2 sqrt2 ln 2 (shells align with dyadic q-bins).
double default_shell_width();

/// Hausdorff-Cantelli upper-bound estimator: partial sums
/// S(s, N) = sum Psi(d_w)^s over shells d_w in [nT, (n+1)T); a grid s is
/// "bounded" when the shell increments decay geometrically (ratio <= 0.9,
/// heuristic) across the last 4 nonempty shells at or before the count
/// peak (deeper shells are depleted by the pool height bound and excluded).
/// Requires >= 8 nonempty retained shells. Returns the smallest bounded s.
CrossoverReport critical_exponent_upper(const std::vector<IsotropicVector>& pool,
                                        const ApproxFunction& psi_chart, const CuspFrame& frame,
                                        double t, const std::vector<double>& s_grid,
                                        const ConeRegion& region = ConeRegion::all());

}  // namespace cd
