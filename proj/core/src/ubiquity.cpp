#include "conedioph/ubiquity.hpp"

#include "conedioph/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace cd {

namespace {

constexpr double kTwoSqrt2 = 2.8284271247461903;

Eigen::VectorXd uniform_in_patch(Rng& rng, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  Eigen::VectorXd x(lo.size());
  for (Eigen::Index i = 0; i < lo.size(); ++i) x[i] = rng.uniform(lo[i], hi[i]);
  return x;
}

Eigen::VectorXd uniform_in_ball(Rng& rng, const Eigen::VectorXd& center, double radius) {
  Eigen::VectorXd dir(center.size());
  double norm = 0.0;
  do {
    for (Eigen::Index i = 0; i < dir.size(); ++i) dir[i] = rng.normal();
    norm = dir.norm();
  } while (norm == 0.0);
  double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(center.size()));
  return center + (r / norm) * dir;
}

bool in_box(const Eigen::VectorXd& x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  return true;
}

}  // namespace

UbiquitySpec make_ubiquity_spec(const std::vector<IsotropicVector>& pool, const CuspFrame& frame,
                                Eigen::VectorXd patch_lo, Eigen::VectorXd patch_hi, double t,
                                int fit_levels, int fit_samples, std::uint64_t seed) {
  if (t <= 0.0) throw std::invalid_argument("level spacing must be positive");
  UbiquitySpec spec;
  spec.patch_lo = std::move(patch_lo);
  spec.patch_hi = std::move(patch_hi);
  spec.t = t;
  spec.delta = Rational(static_cast<long>(spec.patch_lo.size()));
  spec.rho = ApproxFunction::exp_rate(1);

  auto all = chart_points(pool, frame);
  for (auto& cp : all)
    if (in_box(cp.b, spec.patch_lo, spec.patch_hi)) spec.resonant.push_back(cp);
  if (spec.resonant.empty()) throw std::invalid_argument("no resonant points in the patch");

  std::sort(spec.resonant.begin(), spec.resonant.end(),
            [](const ChartPoint& a, const ChartPoint& b) { return a.dw < b.dw; });
  double max_dw = spec.resonant.back().dw;
  int n_max = static_cast<int>(std::floor(max_dw / t));
  if (n_max < 1) throw std::invalid_argument("pool too shallow for the level spacing");
  int n_from = std::max(1, n_max - std::max(1, fit_levels) + 1);

  // Scaled covering-radius fit: kappa is the largest MC covering radius of
  // the sublevel pools, measured in units of e^{-u_n / (2 sqrt 2)}.
  Rng rng(seed);
  double kappa = 0.0;
  for (int n = n_from; n <= n_max; ++n) {
    double un = n * t;
    std::size_t prefix = 0;
    while (prefix < spec.resonant.size() && spec.resonant[prefix].dw <= un) ++prefix;
    if (prefix == 0) continue;
    double cover = 0.0;
    for (int s = 0; s < fit_samples; ++s) {
      Eigen::VectorXd x = uniform_in_patch(rng, spec.patch_lo, spec.patch_hi);
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < prefix; ++i)
        best = std::min(best, (x - spec.resonant[i].b).norm());
      cover = std::max(cover, best);
    }
    kappa = std::max(kappa, cover * std::exp(un / kTwoSqrt2));
  }
  spec.kappa = kappa > 0.0 ? kappa : 1.0;
  spec.r1 = 0.1 * (spec.patch_hi - spec.patch_lo).minCoeff();
  return spec;
}

bool u_regular_check(const UbiquitySpec& spec, int n_min, int n_max) {
  if (!(spec.lambda > 0.0 && spec.lambda < 1.0))
    throw std::invalid_argument("regularity factor must lie in (0, 1)");
  if (n_min < 1) n_min = 1;
  for (int n = n_min; n < n_max; ++n) {
    if (spec.rho_at(spec.u(n + 1)) > spec.lambda * spec.rho_at(spec.u(n))) return false;
  }
  return true;
}

nlohmann::json MeasureConditionFit::to_json() const {
  return {{"a", a}, {"b", b}, {"r0", r0}};
}

MeasureConditionFit fit_measure_condition(const UbiquitySpec& spec, int balls, int radii,
                                          int mc_samples, std::uint64_t seed) {
  if (balls < 1 || radii < 1 || mc_samples < 1)
    throw std::invalid_argument("sample counts must be positive");
  const int d = static_cast<int>(spec.patch_lo.size());
  const double delta = to_double(spec.delta);
  Rng rng(seed);
  MeasureConditionFit fit;
  fit.a = std::numeric_limits<double>::infinity();
  fit.b = 0.0;
  fit.r0 = spec.r1;
  for (int j = 1; j <= radii; ++j) {
    double radius = spec.r1 * static_cast<double>(j) / static_cast<double>(radii);
    for (int k = 0; k < balls; ++k) {
      Eigen::VectorXd center = uniform_in_patch(rng, spec.patch_lo, spec.patch_hi);
      int inside = 0;
      for (int s = 0; s < mc_samples; ++s)
        if (in_box(uniform_in_ball(rng, center, radius), spec.patch_lo, spec.patch_hi)) ++inside;
      double m = ball_volume(d, radius) * static_cast<double>(inside) / mc_samples;
      double scaled = m / std::pow(radius, delta);
      fit.a = std::min(fit.a, scaled);
      fit.b = std::max(fit.b, scaled);
    }
  }
  return fit;
}

nlohmann::json UbiquityEstimate::to_json() const {
  return {{"kappa_hat", kappa_hat}, {"n0", n0}, {"ball_inf", ball_inf}};
}

UbiquityEstimate local_ubiquity_estimate(const UbiquitySpec& spec, int ball_samples, int n_lo,
                                         int n_hi, int mc_samples, std::uint64_t seed,
                                         int threads) {
  if (spec.resonant.empty()) throw std::invalid_argument("empty resonant pool");
  if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("bad level range");
  double max_dw = 0.0;
  for (const auto& cp : spec.resonant) max_dw = std::max(max_dw, cp.dw);
  if (spec.u(n_hi) > max_dw)
    throw std::invalid_argument("pool too shallow for the deepest probed level");

  auto sorted = spec.resonant;
  std::sort(sorted.begin(), sorted.end(),
            [](const ChartPoint& a, const ChartPoint& b) { return a.dw < b.dw; });

  const int levels = n_hi - n_lo + 1;
  UbiquityEstimate est;
  est.n0.assign(ball_samples, n_hi);
  est.ball_inf.assign(ball_samples, 1.0);

  auto run_ball = [&](int ball) {
    Rng rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(ball + 1));
    Eigen::VectorXd center = uniform_in_patch(rng, spec.patch_lo, spec.patch_hi);
    double radius = spec.r1 * rng.uniform(0.5, 1.0);

    std::vector<double> frac(levels, 0.0);
    int kept = 0;
    std::vector<std::uint32_t> covered_count(levels, 0);
    std::vector<char> covered(levels);
    for (int s = 0; s < mc_samples; ++s) {
      Eigen::VectorXd x = uniform_in_ball(rng, center, radius);
      if (!in_box(x, spec.patch_lo, spec.patch_hi)) continue;
      ++kept;
      std::fill(covered.begin(), covered.end(), 0);
      for (const auto& cp : sorted) {
        if (cp.dw > spec.u(n_hi)) break;
        double dist = (x - cp.b).norm();
        // covered at level n iff dw <= u_n and dist <= rho(u_n); rho decays,
        // so the levels form an interval [first visible, last close enough].
        int from = std::max(n_lo, static_cast<int>(std::ceil(cp.dw / spec.t - 1e-12)));
        for (int n = from; n <= n_hi; ++n) {
          if (spec.rho_at(spec.u(n)) < dist) break;
          covered[n - n_lo] = 1;
        }
      }
      for (int i = 0; i < levels; ++i) covered_count[i] += covered[i];
    }
    if (kept == 0) {
      est.n0[ball] = n_hi;
      est.ball_inf[ball] = 1.0;  // degenerate ball, ignored by the min
      return;
    }
    for (int i = 0; i < levels; ++i)
      frac[i] = static_cast<double>(covered_count[i]) / static_cast<double>(kept);

    int n0 = n_hi;
    for (int i = 0; i + 1 < levels; ++i) {
      if (frac[i] <= 0.0) continue;  // the union is still empty: no estimate yet
      double hi = std::max(frac[i], frac[i + 1]);
      if (std::abs(frac[i + 1] - frac[i]) <= 0.1 * hi) {
        n0 = n_lo + i;
        break;
      }
    }
    double inf = 1.0;
    for (int n = n0; n <= n_hi; ++n) inf = std::min(inf, frac[n - n_lo]);
    est.n0[ball] = n0;
    est.ball_inf[ball] = inf;
  };

  if (threads <= 1) {
    for (int ball = 0; ball < ball_samples; ++ball) run_ball(ball);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (int ball = w; ball < ball_samples; ball += threads) run_ball(ball);
      });
    for (auto& th : pool) th.join();
  }

  est.kappa_hat = 1.0;
  for (double v : est.ball_inf) est.kappa_hat = std::min(est.kappa_hat, v);
  return est;
}

nlohmann::json ClassifierReport::to_json() const {
  return {{"verdict", verdict == DivergenceVerdict::MeasureInfinite ? "measure-infinite"
                                                                    : "measure-finite-cover"},
          {"symbolic", symbolic},
          {"lhs", rational_to_string(lhs)},
          {"rhs", rational_to_string(rhs)}};
}

ClassifierReport divergence_classifier(const DimensionFunction& phi, const ApproxFunction& psi,
                                       const UbiquitySpec& spec) {
  if (phi.s <= 0) throw std::invalid_argument("dimension function exponent must be positive");
  if (phi.s > spec.delta || (phi.s == spec.delta && phi.g < 0))
    throw std::invalid_argument("dimension function must dominate x^delta");
  if (!psi.decreasing_to_zero())
    throw std::invalid_argument("psi must decrease to zero on the probed ray");

  ClassifierReport report;
  if (psi.kind() == ApproxFunction::Kind::ExpRate &&
      spec.rho.kind() == ApproxFunction::Kind::ExpRate) {
    // Terms are c^s kappa^{-delta} e^{(delta m_rho - s m_psi) u_n / (2 sqrt 2)}
    // times n^g from the log factor; exact geometric-series criterion.
    report.symbolic = true;
    report.lhs = Rational(phi.s * psi.rate());
    report.rhs = Rational(spec.delta * spec.rho.rate());
    bool diverges = report.lhs < report.rhs || (report.lhs == report.rhs && phi.g >= -1);
    report.verdict =
        diverges ? DivergenceVerdict::MeasureInfinite : DivergenceVerdict::MeasureFiniteCover;
    return report;
  }

  // Numeric fallback: geometric-ratio heuristic on the partial-sum terms.
  const double s = to_double(phi.s), g = to_double(phi.g), delta = to_double(spec.delta);
  auto term = [&](int n) {
    double un = spec.u(n);
    double p = psi(un);
    if (!(p > 0.0)) return 0.0;
    double logphi = s * std::log(p) + (g != 0.0 ? g * std::log(std::log(1.0 / p)) : 0.0);
    return std::exp(logphi - delta * std::log(spec.rho_at(un)));
  };
  const int n_terms = 400;
  double ratio_sum = 0.0;
  int ratio_count = 0;
  for (int n = n_terms - 10; n < n_terms; ++n) {
    double a = term(n), b = term(n + 1);
    if (a > 0.0 && b > 0.0) {
      ratio_sum += b / a;
      ++ratio_count;
    }
  }
  double avg_ratio = ratio_count > 0 ? ratio_sum / ratio_count : 0.0;
  report.verdict = avg_ratio >= 0.98 ? DivergenceVerdict::MeasureInfinite
                                     : DivergenceVerdict::MeasureFiniteCover;
  return report;
}

}  // namespace cd
