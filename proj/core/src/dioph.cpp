#include "conedioph/dioph.hpp"

#include "conedioph/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cd {

namespace {

constexpr double kTwoSqrt2 = 2.8284271247461903;

std::string real17(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

ApproxFunction ApproxFunction::power_law(Rational alpha, Rational gamma, double coef) {
  if (alpha < 0 || (alpha == 0 && gamma >= 0))
    throw std::invalid_argument("ApproxFunction: the power law must decrease");
  if (coef <= 0.0) throw std::invalid_argument("ApproxFunction: coefficient must be positive");
  ApproxFunction f;
  f.kind_ = Kind::PowerLaw;
  f.alpha_ = std::move(alpha);
  f.gamma_ = std::move(gamma);
  f.coef_ = coef;
  // x^{-a} (ln x)^g peaks at ln x = g/a; decreasing beyond that.
  double a = to_double(f.alpha_), g = to_double(f.gamma_);
  if (a == 0.0)
    f.x0_ = 1.5;  // pure log decay: decreasing on all of (1, inf)
  else
    f.x0_ = (g > 0) ? std::exp(g / a) + 1.0 : 1.0;
  return f;
}

ApproxFunction ApproxFunction::exp_rate(Rational mult, double coef) {
  if (coef <= 0.0) throw std::invalid_argument("ApproxFunction: coefficient must be positive");
  ApproxFunction f;
  f.kind_ = Kind::ExpRate;
  f.rate_ = std::move(mult);
  f.coef_ = coef;
  f.x0_ = 0.0;
  return f;
}

double ApproxFunction::operator()(double x) const {
  if (kind_ == Kind::PowerLaw) {
    double v = coef_ * std::pow(x, -to_double(alpha_));
    if (gamma_ != 0) v *= std::pow(std::log(x), to_double(gamma_));
    return v;
  }
  return coef_ * std::exp(-to_double(rate_) * x / kTwoSqrt2);
}

const Rational& ApproxFunction::alpha() const {
  if (kind_ != Kind::PowerLaw) throw std::domain_error("ApproxFunction: not a power law");
  return alpha_;
}

const Rational& ApproxFunction::gamma() const {
  if (kind_ != Kind::PowerLaw) throw std::domain_error("ApproxFunction: not a power law");
  return gamma_;
}

const Rational& ApproxFunction::rate() const {
  if (kind_ != Kind::ExpRate) throw std::domain_error("ApproxFunction: not an exponential rate");
  return rate_;
}

bool ApproxFunction::decreasing_to_zero() const {
  if (kind_ == Kind::PowerLaw) return alpha_ > 0 || (alpha_ == 0 && gamma_ < 0);
  return rate_ > 0;
}

bool ApproxFunction::x_psi_to_zero() const {
  if (kind_ == Kind::PowerLaw) return alpha_ > 1 || (alpha_ == 1 && gamma_ < 0);
  return rate_ > 0;  // exponential decay beats the linear factor
}

Rational ApproxFunction::sigma() const {
  if (kind_ != Kind::PowerLaw) throw std::domain_error("ApproxFunction: sigma needs a power law");
  return Rational(1) / (Rational(1) + alpha_);
}

Rational predicted_dimension(const ApproxFunction& psi, int n) {
  if (n < 2) throw std::invalid_argument("predicted_dimension: n must be at least 2");
  return psi.sigma() * Rational(n - 1);
}

ApproxFunction chart_side(const ApproxFunction& psi) {
  return ApproxFunction::exp_rate(Rational(1) + psi.alpha(), psi.coef());
}

std::vector<Approximant> approximants(const Eigen::VectorXd& x, const ApproxFunction& psi,
                                      long q_max, const std::vector<IsotropicVector>& pool) {
  const Eigen::Index n = x.size();
  std::vector<Approximant> out;
  for (const auto& w : pool) {
    if (w.coords.size() != static_cast<std::size_t>(n + 1)) continue;
    double q = to_double(Rational(w.coords.back()));
    if (q > static_cast<double>(q_max)) break;  // pool sorted by q
    double err = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      err = std::max(err, std::abs(q * x(i) - to_double(Rational(w.coords[i]))));
    if (err <= psi(q))
      out.push_back({w, static_cast<long long>(q), err});
  }
  return out;
}

nlohmann::json RigidityReport::to_json() const {
  nlohmann::json j;
  j["xpsi_hypothesis"] = xpsi_hypothesis;
  j["denominator"] = rational_to_string(Rational(denominator));
  j["events"] = events;
  j["off_quadric"] = off_quadric;
  j["empirical_q0"] = empirical_q0;
  j["theoretical_q0"] = std::isinf(theoretical_q0) ? "inf" : real17(theoretical_q0);
  return j;
}

RigidityReport check_rigidity(const RatSymForm& q, const ApproxFunction& psi, long q_max,
                                   int trials, std::uint64_t seed) {
  if (!psi.decreasing_to_zero())
    throw std::invalid_argument("check_rigidity: psi must decrease to zero");
  const int n = static_cast<int>(q.dim());
  if (q.signature() != std::pair<int, int>{n, 0})
    throw std::invalid_argument("check_rigidity: quadric must be positive definite");

  RigidityReport rep;
  rep.xpsi_hypothesis = psi.x_psi_to_zero();

  // N and the integer matrix with denominators cleared: q(Z^n) in (1/N) Z.
  Int den = 1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) den = boost::multiprecision::lcm(den, denominator(q.matrix()(i, j)));
  rep.denominator = den;
  std::vector<Int> mi(n * n);
  Eigen::MatrixXd md(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      mi[i * n + j] = numerator(Rational(q.matrix()(i, j) * den));
      md(i, j) = to_double(q.matrix()(i, j));
    }

  // Proof-side constant: |q(p) - q^2| <= C q psi(q) for approximant events,
  // with C from the bilinear bound over the compact quadric.
  RatMatrix inv = q.matrix().inverse();
  double radius = 0.0;
  for (int i = 0; i < n; ++i) radius = std::max(radius, std::sqrt(to_double(inv(i, i))));
  double mmax = md.cwiseAbs().maxCoeff();
  double cbound = n * n * mmax * (2.0 * radius + 1.0);

  if (rep.xpsi_hypothesis) {
    // Smallest threshold with C q psi(q) < 1/N from there on; q psi(q) is
    // eventually decreasing for alpha > 1.
    double target = 1.0 / to_double(Rational(den));
    double q0 = std::max(2.0, psi.x0());
    while (cbound * q0 * psi(q0) >= target && q0 < 1e18) q0 *= 2.0;
    // refine down by bisection against the eventually-monotone tail
    double lo = q0 / 2.0, hi = q0;
    if (q0 < 1e18) {
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (cbound * mid * psi(mid) < target)
          hi = mid;
        else
          lo = mid;
      }
    }
    rep.theoretical_q0 = hi;
  } else {
    rep.theoretical_q0 = std::numeric_limits<double>::infinity();
  }

  Rng rng(seed);
  long worst = 0;
  for (int trial = 0; trial < trials; ++trial) {
    // random point on the quadric: direction scaled to q(x) = 1
    Eigen::VectorXd y(n);
    double qy = 0.0;
    do {
      for (int i = 0; i < n; ++i) y(i) = rng.normal();
      qy = y.dot(md * y);
    } while (qy <= 1e-12);
    Eigen::VectorXd x = y / std::sqrt(qy);

    for (long qq = 1; qq <= q_max; ++qq) {
      double eps = psi(static_cast<double>(qq));
      // candidates p with ||q x - p|| <= psi(q)
      std::vector<long long> lo(n), hi(n);
      for (int i = 0; i < n; ++i) {
        lo[i] = static_cast<long long>(std::ceil(qq * x(i) - eps));
        hi[i] = static_cast<long long>(std::floor(qq * x(i) + eps));
        if (lo[i] > hi[i]) goto next_q;
      }
      {
        std::vector<long long> p(n);
        for (long long a = lo[0]; a <= hi[0]; ++a) {
          p[0] = a;
          // iterate remaining coordinates (n <= 3 at desk scale)
          std::vector<long long> idx(n, 0);
          for (int i = 1; i < n; ++i) idx[i] = lo[i];
          for (;;) {
            for (int i = 1; i < n; ++i) p[i] = idx[i];
            ++rep.events;
            // exact on-quadric test: p^T (N M) p == N q^2
            Int val = 0;
            for (int i = 0; i < n; ++i)
              for (int j = 0; j < n; ++j) val += mi[i * n + j] * Int(p[i]) * Int(p[j]);
            if (val != den * Int(qq) * Int(qq)) {
              ++rep.off_quadric;
              worst = std::max(worst, qq);
            }
            int i = n - 1;
            for (; i >= 1; --i) {
              if (idx[i] < hi[i]) {
                ++idx[i];
                break;
              }
              idx[i] = lo[i];
            }
            if (i < 1) break;
          }
        }
      }
    next_q:;
    }
  }
  rep.empirical_q0 = worst + 1;
  return rep;
}

DwWeight dw_weight(const IsotropicVector& w, const CuspFrame& frame) {
  Rational b = frame.L.bilinear(frame.v0.rational(), w.rational());
  if (b == 0) throw std::domain_error("dw_weight: w lies in ker b_L(v0, .)");
  DwWeight out;
  out.dw = kTwoSqrt2 * std::log(std::abs(to_double(b)));
  out.deviation = std::abs(out.dw - kTwoSqrt2 * std::log(w.real().norm()));
  return out;
}

std::vector<ChartPoint> chart_points(const std::vector<IsotropicVector>& pool,
                                     const CuspFrame& frame, const ConeRegion& region) {
  RatVec v0 = frame.v0.rational();
  std::vector<ChartPoint> out;
  out.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    Rational b = frame.L.bilinear(v0, pool[i].rational());
    if (b == 0) continue;
    Eigen::VectorXd d = pool[i].real();
    if (!region.is_all() && !region.contains(d)) continue;
    ChartPoint cp;
    cp.b = line_to_unipotent(frame, d);
    cp.dw = kTwoSqrt2 * std::log(std::abs(to_double(b)));
    cp.pool_index = i;
    out.push_back(std::move(cp));
  }
  return out;
}

std::uint64_t stilde_count(const Eigen::VectorXd& b, const ApproxFunction& psi_chart,
                           const std::vector<IsotropicVector>& pool, const CuspFrame& frame) {
  std::uint64_t count = 0;
  for (const auto& cp : chart_points(pool, frame))
    if ((b - cp.b).norm() <= psi_chart(cp.dw)) ++count;
  return count;
}

nlohmann::json InclusionReport::to_json() const {
  nlohmann::json j;
  j["L"] = real17(l);
  j["L1"] = real17(l1);
  j["events_psi"] = events_psi;
  j["events_psi1"] = events_psi1;
  j["events_psi2"] = events_psi2;
  j["violations"] = violations;
  return j;
}

InclusionReport inclusion_check(const Eigen::VectorXd& x, const ApproxFunction& psi,
                                const std::vector<IsotropicVector>& pool, const CuspFrame& frame,
                                std::optional<double> l_override,
                                std::optional<double> l1_override) {
  const int n = static_cast<int>(frame.dim()) - 1;
  Eigen::VectorXd xline(n + 1);
  xline.head(n) = x;
  xline(n) = 1.0;
  Eigen::VectorXd bx = line_to_unipotent(frame, xline);  // throws off-chart

  auto cps = chart_points(pool, frame);

  InclusionReport rep;
  // Fit the comparison constants over the patch: L absorbs the bounded gap
  // between q and e^{d_w/2 sqrt2}, L1 the chart/ambient bi-Lipschitz ratio.
  if (l_override && l1_override) {
    rep.l = *l_override;
    rep.l1 = *l1_override;
  } else {
    double lfit = 1.0, cfit = 1.0;
    for (const auto& cp : cps) {
      double q = to_double(Rational(pool[cp.pool_index].coords.back()));
      double e = std::exp(cp.dw / kTwoSqrt2);
      lfit = std::max({lfit, q / e, e / q});
      double amb = 0.0;
      for (int i = 0; i < n; ++i)
        amb = std::max(amb, std::abs(x(i) - to_double(Rational(pool[cp.pool_index].coords[i])) / q));
      double cha = (bx - cp.b).norm();
      if (amb > 1e-15 && cha > 1e-15) cfit = std::max({cfit, amb / cha, cha / amb});
    }
    rep.l = l_override.value_or(lfit);
    rep.l1 = l1_override.value_or(cfit * lfit);
  }

  auto psi1 = [&](double d) { return psi(rep.l * std::exp(d / kTwoSqrt2)) / (rep.l1 * std::exp(d / kTwoSqrt2)); };
  auto psi2 = [&](double d) { return rep.l1 * psi(std::exp(d / kTwoSqrt2) / rep.l) / std::exp(d / kTwoSqrt2); };

  for (const auto& cp : cps) {
    const auto& w = pool[cp.pool_index];
    double q = to_double(Rational(w.coords.back()));
    double err = 0.0;
    for (int i = 0; i < n; ++i)
      err = std::max(err, std::abs(x(i) - to_double(Rational(w.coords[i])) / q));
    bool epsi = err <= psi(q) / q;
    double cha = (bx - cp.b).norm();
    bool e1 = cha <= psi1(cp.dw);
    bool e2 = cha <= psi2(cp.dw);
    rep.events_psi += epsi;
    rep.events_psi1 += e1;
    rep.events_psi2 += e2;
    if ((e1 && !epsi) || (epsi && !e2)) ++rep.violations;
  }
  return rep;
}

double default_shell_width() { return kTwoSqrt2 * std::log(2.0); }

nlohmann::json CrossoverReport::to_json() const {
  nlohmann::json j;
  j["T"] = real17(t);
  std::vector<std::string> grid;
  for (double s : s_grid) grid.push_back(real17(s));
  j["s_grid"] = grid;
  j["bounded"] = bounded;
  j["shell_counts"] = shell_counts;
  j["crossover"] = std::isnan(crossover) ? "none" : real17(crossover);
  return j;
}

CrossoverReport critical_exponent_upper(const std::vector<IsotropicVector>& pool,
                                        const ApproxFunction& psi_chart, const CuspFrame& frame,
                                        double t, const std::vector<double>& s_grid,
                                        const ConeRegion& region) {
  if (t <= 0.0) throw std::invalid_argument("critical_exponent_upper: shell width");
  for (std::size_t i = 0; i + 1 < s_grid.size(); ++i)
    if (s_grid[i] >= s_grid[i + 1])
      throw std::invalid_argument("critical_exponent_upper: s_grid must be ascending");
  auto cps = chart_points(pool, frame, region);

  CrossoverReport rep;
  rep.t = t;
  rep.s_grid = s_grid;

  std::size_t n_shells = 0;
  for (const auto& cp : cps)
    if (cp.dw >= 0.0) n_shells = std::max(n_shells, static_cast<std::size_t>(cp.dw / t) + 1);
  rep.shell_counts.assign(n_shells, 0);
  std::vector<std::vector<double>> sums(s_grid.size(), std::vector<double>(n_shells, 0.0));
  for (const auto& cp : cps) {
    if (cp.dw < 0.0) continue;
    std::size_t shell = static_cast<std::size_t>(cp.dw / t);
    ++rep.shell_counts[shell];
    double p = psi_chart(cp.dw);
    for (std::size_t i = 0; i < s_grid.size(); ++i) sums[i][shell] += std::pow(p, s_grid[i]);
  }

  // Shells past the count peak are depleted by the pool height bound (the
  // pool only reaches weight ~ 2 sqrt2 ln q_max), so they underestimate the
  // true shell sums and are excluded from the decay test.
  std::size_t peak = 0;
  for (std::size_t k = 0; k < n_shells; ++k)
    if (rep.shell_counts[k] >= rep.shell_counts[peak]) peak = k;
  std::vector<std::size_t> nonempty;
  for (std::size_t k = 0; k <= peak; ++k)
    if (rep.shell_counts[k] > 0) nonempty.push_back(k);
  if (nonempty.size() < 8)
    throw std::domain_error("critical_exponent_upper: need at least 8 nonempty shells");

  rep.bounded.assign(s_grid.size(), false);
  rep.crossover = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    bool ok = true;
    // geometric decay (ratio <= 0.9, heuristic) across the last 4 shells
    for (std::size_t k = nonempty.size() - 4; k < nonempty.size() - 1 && ok; ++k) {
      double a = sums[i][nonempty[k]], b = sums[i][nonempty[k + 1]];
      ok = b <= 0.9 * a;
    }
    rep.bounded[i] = ok;
    if (ok && std::isnan(rep.crossover)) rep.crossover = s_grid[i];
  }
  return rep;
}

}  // namespace cd
