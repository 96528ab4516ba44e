#include <doctest.h>

#include "conedioph/dioph.hpp"

#include <cmath>

using namespace cd;

namespace {

const double kTwoSqrt2 = 2.0 * std::sqrt(2.0);

RatSymForm circle_q() {
  RatMatrix q(2, 2);
  q(0, 0) = q(1, 1) = 1;
  return RatSymForm(q);
}

CuspFrame circle_frame() {
  return witt_frame(suspend_form(circle_q()), IsotropicVector{{Int(1), Int(0), Int(1)}});
}

}  // namespace

TEST_CASE("approx function symbolic properties") {
  auto psi = ApproxFunction::power_law(2);
  CHECK(psi(10.0) == doctest::Approx(0.01));
  CHECK(psi.sigma() == Rational(1, 3));
  CHECK(psi.x_psi_to_zero());

  auto slow = ApproxFunction::power_law(Rational(1, 2));
  CHECK(slow.decreasing_to_zero());
  CHECK(!slow.x_psi_to_zero());

  // borderline alpha = 1: the log factor decides
  CHECK(!ApproxFunction::power_law(1).x_psi_to_zero());
  CHECK(ApproxFunction::power_law(1, -1).x_psi_to_zero());

  CHECK_THROWS_AS(ApproxFunction::power_law(0), std::invalid_argument);

  auto chart = chart_side(psi);
  CHECK(chart.rate() == 3);
  CHECK(chart(1.0) == doctest::Approx(std::exp(-3.0 / kTwoSqrt2)));
}

TEST_CASE("predicted dimension is exact") {
  CHECK(predicted_dimension(ApproxFunction::power_law(2), 3) == Rational(2, 3));
  CHECK(predicted_dimension(ApproxFunction::power_law(2), 2) == Rational(1, 3));
  CHECK(predicted_dimension(ApproxFunction::power_law(Rational(7, 2)), 4) == Rational(2, 3));
  // scale invariance: the coefficient does not change sigma
  CHECK(predicted_dimension(ApproxFunction::power_law(2, 0, 5.0), 3) == Rational(2, 3));
  // alpha large -> dimension tends to 0
  CHECK(predicted_dimension(ApproxFunction::power_law(1000), 3) < Rational(1, 100));
}

TEST_CASE("approximants on the circle") {
  auto pool = enumerate_isotropic(suspend_form(circle_q()), 100);
  Eigen::Vector2d x(0.6, 0.8);  // (3/5, 4/5), exactly rational on the circle
  auto hits = approximants(x, ApproxFunction::power_law(1), 100, pool);
  REQUIRE(!hits.empty());
  // the primitive representative is an exact hit
  bool exact = false;
  for (const auto& h : hits) {
    CHECK(h.error <= 1.0 / h.q + 1e-15);
    if (h.q == 5 && h.error == 0.0) exact = true;
  }
  CHECK(exact);
  // every reported hit is sorted by q and satisfies the inequality
  for (std::size_t i = 1; i < hits.size(); ++i) CHECK(hits[i - 1].q <= hits[i].q);
}

TEST_CASE("rigidity scan on the circle") {
  auto psi = ApproxFunction::power_law(2);
  auto rep = check_rigidity(circle_q(), psi, 300, 4, 2024);
  CHECK(rep.xpsi_hypothesis);
  CHECK(rep.denominator == 1);
  CHECK(std::isfinite(rep.theoretical_q0));
  CHECK(rep.empirical_q0 <= rep.theoretical_q0);

  // psi(q) = q^{-1/2}: the scan still runs, the threshold is infinite
  auto weak = check_rigidity(circle_q(), ApproxFunction::power_law(Rational(1, 2)), 100, 2, 7);
  CHECK(!weak.xpsi_hypothesis);
  CHECK(std::isinf(weak.theoretical_q0));

  // a non-vanishing psi is rejected outright
  CHECK_THROWS_AS(check_rigidity(circle_q(), ApproxFunction::exp_rate(0), 10, 1, 1),
                  std::invalid_argument);
}

TEST_CASE("quadric without rational points has only off-quadric events") {
  RatMatrix m(2, 2);
  m(0, 0) = m(1, 1) = Rational(1, 3);  // x^2 + y^2 = 3 has no rational points
  auto rep = check_rigidity(RatSymForm(m), ApproxFunction::power_law(1), 120, 3, 99);
  CHECK(rep.denominator == 3);
  CHECK(rep.off_quadric == rep.events);
}

TEST_CASE("cusp point weights") {
  CuspFrame fr = circle_frame();
  // w = (-1, 0, 1) is opposite with b_L(v0, w) = -2
  IsotropicVector w{{Int(-1), Int(0), Int(1)}};
  auto d = dw_weight(w, fr);
  CHECK(d.dw == doctest::Approx(kTwoSqrt2 * std::log(2.0)).epsilon(1e-12));
  // scaling by 3 adds 2 sqrt2 ln 3
  IsotropicVector w3{{Int(-3), Int(0), Int(3)}};
  CHECK(dw_weight(w3, fr).dw - d.dw == doctest::Approx(kTwoSqrt2 * std::log(3.0)).epsilon(1e-12));
  // v0 itself is in ker b_L(v0, .)
  CHECK_THROWS_AS(dw_weight(fr.v0, fr), std::domain_error);

  // deviation from 2 sqrt2 ln ||w|| stays bounded over a fixed cap as the
  // pool deepens
  Eigen::VectorXd c(3);
  c << -1, 0, 1;
  ConeRegion cap = ConeRegion::cap(c, 0.5);
  double worst1 = 0, worst2 = 0;
  for (long qm : {128L, 256L}) {
    double& worst = (qm == 128) ? worst1 : worst2;
    for (const auto& p : enumerate_isotropic(suspend_form(circle_q()), qm, cap))
      worst = std::max(worst, dw_weight(p, fr).deviation);
  }
  CHECK(worst2 <= worst1 + 0.5);
}

TEST_CASE("stilde counts") {
  CuspFrame fr = circle_frame();
  auto pool = enumerate_isotropic(suspend_form(circle_q()), 256);
  auto cps = chart_points(pool, fr);
  REQUIRE(!cps.empty());
  auto psi = ApproxFunction::exp_rate(3);
  // centered exactly on a resonant point: at least one event
  CHECK(stilde_count(cps[5].b, psi, pool, fr) >= 1);
  // monotone in pool depth
  auto small = enumerate_isotropic(suspend_form(circle_q()), 64);
  Eigen::VectorXd b = cps[5].b;
  CHECK(stilde_count(b, psi, small, fr) <= stilde_count(b, psi, pool, fr));
}

TEST_CASE("double inclusion bracket") {
  CuspFrame fr = circle_frame();
  auto pool = enumerate_isotropic(suspend_form(circle_q()), 1 << 10);
  auto psi = ApproxFunction::power_law(1);

  // a circle point close to the cone point (3,4,5) but not equal to it
  double a0 = std::atan2(0.8, 0.6) + 1e-5;
  Eigen::Vector2d x(std::cos(a0), std::sin(a0));
  auto rep = inclusion_check(x, psi, pool, fr);
  CHECK(rep.events_psi >= 1);
  CHECK(rep.violations == 0);
  // events are nested: Psi1 events <= psi events <= Psi2 events
  CHECK(rep.events_psi1 <= rep.events_psi);
  CHECK(rep.events_psi <= rep.events_psi2);

  // collapsing the constants breaks the right inclusion
  auto bad = inclusion_check(x, psi, pool, fr, 1e-9, 1e-9);
  CHECK(bad.violations > 0);
}

TEST_CASE("crossover estimator, circle") {
  CuspFrame fr = circle_frame();
  auto pool = enumerate_isotropic(suspend_form(circle_q()), 1 << 10);
  std::vector<double> grid;
  for (int i = 1; i <= 20; ++i) grid.push_back(0.05 * i);

  auto rep = critical_exponent_upper(pool, ApproxFunction::exp_rate(3), fr,
                                     default_shell_width(), grid);
  CHECK(std::abs(rep.crossover - 1.0 / 3.0) <= 0.15);
  // bounded region is an up-set of the grid
  bool seen = false;
  for (bool b : rep.bounded) {
    if (b) seen = true;
    if (seen) CHECK(b);
  }

  // constant Psi: everything grows, no bounded s
  auto flat = critical_exponent_upper(pool, ApproxFunction::exp_rate(0, 1.0), fr,
                                      default_shell_width(), grid);
  CHECK(std::isnan(flat.crossover));
}
