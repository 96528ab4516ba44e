#include <doctest.h>

#include "conedioph/chart.hpp"
#include "conedioph/rng.hpp"

#include <cmath>

using namespace cd;

namespace {

const double kSqrt2 = std::sqrt(2.0);

// Signature (2,2) split form 2x1x4 + 2x2x3, already in normal shape.
CuspFrame split22_frame() {
  RatSymForm l(normal_form_matrix(4, 2, 1));
  return witt_frame(l, IsotropicVector{{Int(1), Int(0), Int(0), Int(0)}});
}

CuspFrame sphere_frame() {
  RatMatrix q(3, 3);
  q(0, 0) = q(1, 1) = q(2, 2) = 1;
  return witt_frame(suspend_form(RatSymForm(q)), IsotropicVector{{Int(1), Int(2), Int(2), Int(3)}});
}

Eigen::VectorXd random_chart(Rng& rng, int d, double lo = -2.0, double hi = 2.0) {
  Eigen::VectorXd b(d);
  for (int i = 0; i < d; ++i) b(i) = rng.uniform(lo, hi);
  return b;
}

}  // namespace

TEST_CASE("unipotent matrices preserve the normal form and obey the group law") {
  for (const CuspFrame& fr : {split22_frame(), sphere_frame()}) {
    Eigen::MatrixXd m = fr.normal_matrix().to_double();
    Rng rng(3);
    const int d = static_cast<int>(fr.chart_dim());
    for (int k = 0; k < 50; ++k) {
      Eigen::VectorXd b1 = random_chart(rng, d), b2 = random_chart(rng, d);
      Eigen::MatrixXd u1 = unipotent_matrix(fr, b1), u2 = unipotent_matrix(fr, b2);
      CHECK((u1.transpose() * m * u1 - m).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((u1 * u2 - unipotent_matrix(fr, b1 + b2)).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("chart points are isotropic and hit the opposite vector at zero") {
  for (const CuspFrame& fr : {split22_frame(), sphere_frame()}) {
    Eigen::MatrixXd ml = fr.L.matrix().to_double();
    const int d = static_cast<int>(fr.chart_dim());
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd w = unipotent_point(fr, zero);
    // b = 0 maps to the line of the opposite vector.
    Eigen::VectorXd opp = fr.opposite();
    double cross = (w * opp.norm() - opp * w.norm()).cwiseAbs().maxCoeff();
    CHECK(std::min(cross, (w * opp.norm() + opp * w.norm()).cwiseAbs().maxCoeff()) < 1e-10);

    Rng rng(4);
    for (int k = 0; k < 100; ++k) {
      Eigen::VectorXd b = random_chart(rng, d);
      Eigen::VectorXd p = unipotent_point(fr, b);
      CHECK(std::abs(p.dot(ml * p)) / p.squaredNorm() < 1e-10);
    }
  }
}

TEST_CASE("chart round trip is the identity") {
  for (const CuspFrame& fr : {split22_frame(), sphere_frame()}) {
    Rng rng(5);
    const int d = static_cast<int>(fr.chart_dim());
    for (int k = 0; k < 100; ++k) {
      Eigen::VectorXd b = random_chart(rng, d, -5.0, 5.0);
      Eigen::VectorXd back = line_to_unipotent(fr, unipotent_point(fr, b));
      CHECK((back - b).cwiseAbs().maxCoeff() < 1e-10);
    }
    // The chart blows up exactly on ker b_L(v0, .): the line of v0 itself.
    Eigen::VectorXd v0(fr.dim());
    for (std::size_t i = 0; i < fr.dim(); ++i) v0(static_cast<int>(i)) = to_double(Rational(fr.v0.coords[i]));
    CHECK_THROWS_AS(line_to_unipotent(fr, v0), std::domain_error);
  }
}

TEST_CASE("trace membership closed form") {
  CuspFrame fr = split22_frame();
  Eigen::VectorXd es = Eigen::VectorXd::Unit(4, 3);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  // D = 0: b = 0 is inside the trace for every t >= 0.
  for (double t : {0.0, 1.0, 5.0, 30.0}) CHECK(trace_membership(fr, es, t, zero));
  // t below the oriented distance D: empty trace.
  Eigen::VectorXd w = std::exp(3.0 / (2.0 * kSqrt2)) * es;  // D = 3
  Rng rng(6);
  for (int k = 0; k < 200; ++k)
    CHECK(!trace_membership(fr, w, 2.9, random_chart(rng, 2, -1.0, 1.0)));
}

TEST_CASE("closed form agrees with the matrix route") {
  CuspFrame fr = split22_frame();
  Rng rng(7);
  for (int k = 0; k < 200; ++k) {
    double d0 = rng.uniform(0.0, 3.0);
    double lam = std::exp(d0 / (2.0 * kSqrt2));
    Eigen::VectorXd w = lam * Eigen::VectorXd::Unit(4, 3);
    double t = d0 + rng.uniform(0.0, 6.0);
    Eigen::VectorXd b = random_chart(rng, 2, -1.0, 1.0);
    double lp = middle_form(fr, b);
    double lhs = 0.25 * std::exp(t / kSqrt2) * lp * lp + b.squaredNorm() + std::exp(-t / kSqrt2);
    double closed = kSqrt2 * std::log(lam * lam * lhs);
    CHECK(std::abs(closed - trace_value_matrix(fr, w, t, b)) < 1e-9);
    CHECK(trace_membership(fr, w, t, b) == (closed <= 0.0));
  }
}

TEST_CASE("trace monte carlo is deterministic and sane") {
  CuspFrame fr = split22_frame();
  Eigen::VectorXd es = Eigen::VectorXd::Unit(4, 3);
  auto a = trace_measure_mc(fr, es, 4.0, 20000, 99);
  auto b = trace_measure_mc(fr, es, 4.0, 20000, 99);
  CHECK(a.estimate == b.estimate);
  CHECK(a.hits == b.hits);
  CHECK(a.estimate > 0.0);
  CHECK(a.radius == doctest::Approx(1.0));  // D = 0

  // Below D the set is empty.
  Eigen::VectorXd w = std::exp(5.0 / (2.0 * kSqrt2)) * es;
  auto c = trace_measure_mc(fr, w, 4.0, 1000, 99);
  CHECK(c.estimate == 0.0);

  // Signature hypothesis: a rank-one form is rejected.
  CHECK_THROWS_AS(trace_measure_mc(sphere_frame(), Eigen::VectorXd::Unit(4, 3), 4.0, 10, 1),
                  std::domain_error);
}

TEST_CASE("trace inclusion in the bounding ball") {
  CuspFrame fr = split22_frame();
  Rng rng(8);
  for (double d0 : {0.0, 1.0, 2.5}) {
    double lam = std::exp(d0 / (2.0 * kSqrt2));
    Eigen::VectorXd w = lam * Eigen::VectorXd::Unit(4, 3);
    double r = std::exp(-d0 / (2.0 * kSqrt2));
    for (int k = 0; k < 2000; ++k) {
      Eigen::VectorXd b = random_chart(rng, 2, -1.5, 1.5);
      double t = d0 + rng.uniform(0.0, 8.0);
      if (trace_membership(fr, w, t, b)) CHECK(b.norm() <= r + 1e-12);
    }
  }
}
