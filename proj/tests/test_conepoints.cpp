#include <doctest.h>

#include "conedioph/conepoints.hpp"

#include <set>
#include <sstream>

using namespace cd;

namespace {

RatSymForm circle_l() {
  RatMatrix q(2, 2);
  q(0, 0) = q(1, 1) = 1;
  return suspend_form(RatSymForm(q));
}

RatSymForm sphere_l() {
  RatMatrix q(3, 3);
  q(0, 0) = q(1, 1) = q(2, 2) = 1;
  return suspend_form(RatSymForm(q));
}

std::set<std::vector<Int>> as_set(const std::vector<IsotropicVector>& pts) {
  std::set<std::vector<Int>> s;
  for (const auto& p : pts) s.insert(p.coords);
  return s;
}

// Independent brute-force oracle for the circle: all primitive (x, y, q)
// with x^2 + y^2 = q^2 by a plain double loop.
std::set<std::vector<Int>> circle_oracle(long q_max) {
  std::set<std::vector<Int>> s;
  for (long long q = 1; q <= q_max; ++q)
    for (long long x = -q; x <= q; ++x)
      for (long long y = -q; y <= q; ++y) {
        if (x * x + y * y != q * q) continue;
        if (std::gcd(std::gcd(std::abs(x), std::abs(y)), q) != 1) continue;
        s.insert({Int(x), Int(y), Int(q)});
      }
  return s;
}

}  // namespace

TEST_CASE("circle enumeration small cases") {
  auto pts = enumerate_isotropic(circle_l(), 5);
  REQUIRE(pts.size() == 12);
  auto s = as_set(pts);
  CHECK(s.count({Int(1), Int(0), Int(1)}));
  CHECK(s.count({Int(-1), Int(0), Int(1)}));
  CHECK(s.count({Int(0), Int(1), Int(1)}));
  CHECK(s.count({Int(0), Int(-1), Int(1)}));
  CHECK(s.count({Int(3), Int(4), Int(5)}));
  CHECK(s.count({Int(-3), Int(4), Int(5)}));
  CHECK(s.count({Int(4), Int(-3), Int(5)}));
  CHECK(s.count({Int(-4), Int(-3), Int(5)}));
  // sorted by (q, lex)
  CHECK(pts.front().coords == std::vector<Int>{-1, 0, 1});
  CHECK(pts.back().coords.back() == 5);
}

TEST_CASE("circle enumeration matches the brute force oracle") {
  CHECK(as_set(enumerate_isotropic(circle_l(), 60)) == circle_oracle(60));
}

TEST_CASE("sphere and empty quadrics") {
  auto pts = enumerate_isotropic(sphere_l(), 1);
  CHECK(pts.size() == 6);

  RatMatrix q(2, 2);
  q(0, 0) = q(1, 1) = Rational(1, 3);
  CHECK(enumerate_isotropic(suspend_form(RatSymForm(q)), 30).empty());
}

TEST_CASE("enumeration properties") {
  auto a = enumerate_isotropic(circle_l(), 40);
  // thread partitioning changes nothing
  auto b = enumerate_isotropic(circle_l(), 40, ConeRegion::all(), 4);
  CHECK(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].coords == b[i].coords);

  // monotone coverage: smaller q_max output is a prefix
  auto small = enumerate_isotropic(circle_l(), 20);
  REQUIRE(small.size() <= a.size());
  for (std::size_t i = 0; i < small.size(); ++i) CHECK(small[i].coords == a[i].coords);

  // closed under the sign/coordinate symmetries of the quadric
  auto s = as_set(a);
  for (const auto& p : a) {
    CHECK(s.count({p.coords[1], p.coords[0], p.coords[2]}));
    CHECK(s.count({-p.coords[0], p.coords[1], p.coords[2]}));
  }

  // every point is exactly on the cone and primitive
  RatSymForm l = circle_l();
  for (const auto& p : a) {
    CHECK(l(p.rational()) == 0);
    Int g = 0;
    for (const auto& c : p.coords) g = boost::multiprecision::gcd(g, c);
    CHECK(g == 1);
    CHECK(p.coords.back() > 0);
  }
}

TEST_CASE("histogram and exponent fit") {
  // synthetic exact law N(k) = 3 * 2^{2(k+1)}
  CountingHistogram h;
  h.base = 2.0;
  for (int k = 0; k < 8; ++k) h.bins.push_back(3ull << (2 * (k + 1)));
  auto [slope, r2] = fit_exponent(h, 0);
  CHECK(slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r2 == doctest::Approx(1.0).epsilon(1e-12));

  auto pts = enumerate_isotropic(circle_l(), 256);
  CountingHistogram ch = counting_histogram(pts, 2.0);
  CHECK(ch.total() == pts.size());
  // primitive hypotenuses are odd, so the top bin is k = 7 (largest q = 255)
  CHECK(ch.bins.size() == 8);
  auto [cs, cr2] = fit_exponent(ch, choose_k_min(ch));
  CHECK(cs > 0.5);
  CHECK(cs < 1.5);

  CountingHistogram empty;
  empty.base = 2.0;
  CHECK_THROWS_AS(fit_exponent(empty, 0), std::domain_error);
}

TEST_CASE("equidistribution ratio basics") {
  auto pts = enumerate_isotropic(sphere_l(), 64);
  // identical caps give ratio 1
  Eigen::VectorXd c(4);
  c << 1, 2, 2, 3;
  ConeRegion o = ConeRegion::cap(c, 0.4);
  CHECK(equidist_ratio(pts, 5, o, o, 2.0) == doctest::Approx(1.0));
  ConeRegion tiny = ConeRegion::cap(c, 1e-9);
  CHECK_THROWS_AS(equidist_ratio(pts, 5, o, tiny, 2.0), std::domain_error);
}

TEST_CASE("points csv round trip") {
  auto pts = enumerate_isotropic(circle_l(), 25);
  std::stringstream ss;
  write_points_csv(ss, pts);
  auto back = read_points_csv(ss);
  REQUIRE(back.size() == pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(back[i].coords == pts[i].coords);
}
