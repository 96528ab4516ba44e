#include "conedioph/conepoints.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

namespace cd {

namespace {

Eigen::VectorXd to_real(const IsotropicVector& v) {
  Eigen::VectorXd r(v.coords.size());
  for (std::size_t i = 0; i < v.coords.size(); ++i) r(i) = to_double(Rational(v.coords[i]));
  return r;
}

// Integer square root test for x >= 0.
bool perfect_square(long long x, long long& root) {
  if (x < 0) return false;
  root = static_cast<long long>(std::sqrt(static_cast<double>(x)));
  while (root * root > x) --root;
  while ((root + 1) * (root + 1) <= x) ++root;
  return root * root == x;
}

struct IntQuadric {
  int n = 0;
  std::vector<long long> m;  // n x n symmetric, denominators cleared
  long long scale = 1;       // m = scale * M_q
  std::vector<double> axis;  // axis(i) = sqrt((M_q^{-1})_{ii})

  long long at(int i, int j) const { return m[i * n + j]; }
};

IntQuadric prepare_quadric(const RatSymForm& l) {
  const int s = static_cast<int>(l.dim());
  const int n = s - 1;
  // Check the suspended shape: bottom-right 1, zero off-block.
  if (l.matrix()(s - 1, s - 1) != 1)
    throw std::invalid_argument("enumerate_isotropic: expected a suspended form");
  for (int i = 0; i < n; ++i)
    if (l.matrix()(i, s - 1) != 0)
      throw std::invalid_argument("enumerate_isotropic: expected a suspended form");

  IntQuadric q;
  q.n = n;
  Int den = 1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      den = boost::multiprecision::lcm(den, denominator(l.matrix()(i, j)));
  RatMatrix mq(n, n);
  q.m.resize(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      mq(i, j) = -l.matrix()(i, j);  // M_q = -top-left block
      Int e = numerator(Rational(mq(i, j) * den));
      if (boost::multiprecision::abs(e) > Int(1) << 40)
        throw std::invalid_argument("enumerate_isotropic: quadric coefficients too large");
      q.m[i * n + j] = static_cast<long long>(e);
    }
  q.scale = static_cast<long long>(den);

  RatSymForm qf(mq);
  if (qf.signature() != std::pair<int, int>{n, 0})
    throw std::invalid_argument("enumerate_isotropic: quadric must be positive definite");
  RatMatrix inv = mq.inverse();
  q.axis.resize(n);
  for (int i = 0; i < n; ++i) q.axis[i] = std::sqrt(to_double(inv(i, i)));
  return q;
}

// Emits, in lexicographic order of p, all integer p with p^T m p == target
// (target = scale * q^2), primitive jointly with q, as (p, q).
void scan_points(const IntQuadric& quad, long long q, const ConeRegion& region,
                 std::vector<IsotropicVector>& out) {
  const int n = quad.n;
  const long long target = quad.scale * q * q;
  const double qd = static_cast<double>(q);
  std::vector<long long> lo(n), hi(n), p(n);
  for (int i = 0; i < n; ++i) {
    long long b = static_cast<long long>(std::floor(qd * quad.axis[i])) + 1;
    lo[i] = -b;
    hi[i] = b;
  }

  // Iterate the first n-1 coordinates, solve the last one exactly.
  std::vector<long long> idx(n, 0);
  for (int i = 0; i + 1 < n; ++i) idx[i] = lo[i];
  const long long mnn = quad.at(n - 1, n - 1);
  for (;;) {
    // quadratic in p_{n-1}: mnn x^2 + 2 r x + (c - target) = 0
    long long r = 0, c = 0;
    for (int i = 0; i + 1 < n; ++i) {
      r += quad.at(n - 1, i) * idx[i];
      for (int j = 0; j + 1 < n; ++j) c += quad.at(i, j) * idx[i] * idx[j];
    }
    long long disc = r * r - mnn * (c - target), root;
    if (disc >= 0 && perfect_square(disc, root)) {
      for (long long num : {-r - root, -r + root}) {
        if (num % mnn != 0) continue;
        long long x = num / mnn;
        if (num == 0 && root == 0 && x == 0) {
          // single root; fall through once (the two branches coincide)
        }
        p.assign(idx.begin(), idx.end());
        p[n - 1] = x;
        long long g = q;
        for (long long pi : p) g = std::gcd(g, pi);
        if (g != 1) continue;
        std::vector<Int> coords(n + 1);
        for (int i = 0; i < n; ++i) coords[i] = p[i];
        coords[n] = q;
        IsotropicVector v{std::move(coords)};
        if (region.is_all() || region.contains(v)) {
          if (out.empty() || out.back().coords != v.coords) out.push_back(std::move(v));
        }
        if (root == 0) break;  // double root, emit once
      }
    }
    // advance the odometer over the first n-1 coordinates
    int i = n - 2;
    for (; i >= 0; --i) {
      if (idx[i] < hi[i]) {
        ++idx[i];
        break;
      }
      idx[i] = lo[i];
    }
    if (i < 0) break;
    if (n == 1) break;
  }
}

}  // namespace

ConeRegion ConeRegion::all() { return ConeRegion{}; }

ConeRegion ConeRegion::box(const CuspFrame* chart, Eigen::VectorXd lo, Eigen::VectorXd hi) {
  if (chart == nullptr) throw std::invalid_argument("ConeRegion::box: null chart");
  if (lo.size() != hi.size() || lo.size() != static_cast<Eigen::Index>(chart->chart_dim()))
    throw std::invalid_argument("ConeRegion::box: bad box dimension");
  ConeRegion r;
  r.kind_ = Kind::Box;
  r.chart_ = chart;
  r.lo_ = std::move(lo);
  r.hi_ = std::move(hi);
  return r;
}

ConeRegion ConeRegion::cap(Eigen::VectorXd center, double max_angle) {
  ConeRegion r;
  r.kind_ = Kind::Cap;
  r.center_ = std::move(center);
  r.max_angle_ = max_angle;
  return r;
}

bool ConeRegion::contains(const Eigen::VectorXd& d) const {
  switch (kind_) {
    case Kind::All:
      return true;
    case Kind::Box: {
      Eigen::VectorXd b;
      try {
        b = line_to_unipotent(*chart_, d);
      } catch (const std::domain_error&) {
        return false;  // line at infinity of the chart
      }
      return (b.array() >= lo_.array()).all() && (b.array() <= hi_.array()).all();
    }
    case Kind::Cap: {
      double c = std::abs(center_.dot(d)) / (center_.norm() * d.norm());
      return std::acos(std::min(1.0, c)) <= max_angle_;
    }
  }
  return false;
}

bool ConeRegion::contains(const IsotropicVector& v) const {
  if (kind_ == Kind::All) return true;
  return contains(to_real(v));
}

double ConeRegion::chart_volume() const {
  if (kind_ != Kind::Box) throw std::domain_error("chart_volume: only defined for boxes");
  return (hi_ - lo_).prod();
}

std::vector<IsotropicVector> enumerate_isotropic(const RatSymForm& l, long q_max,
                                                 const ConeRegion& region, int threads) {
  if (q_max < 1) return {};
  IntQuadric quad = prepare_quadric(l);
  // overflow guard: disc ~ scale^2 * q^4 * n^2 * max|m| must fit in 63 bits
  double worst = static_cast<double>(quad.scale) * q_max * q_max;
  worst = worst * worst * quad.n * quad.n;
  if (worst > 4e17) throw std::invalid_argument("enumerate_isotropic: q_max too large");

  threads = std::max(1, threads);
  std::vector<std::vector<IsotropicVector>> parts(threads);
  auto worker = [&](int w) {
    for (long long q = 1 + w; q <= q_max; q += threads) scan_points(quad, q, region, parts[w]);
  };
  if (threads == 1) {
    worker(0);
    return parts[0];
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) pool.emplace_back(worker, w);
  for (auto& t : pool) t.join();
  // merge in (q, lex) order: each part is already sorted that way
  std::vector<IsotropicVector> out;
  for (auto& p : parts) {
    auto mid = out.size();
    out.insert(out.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
    std::inplace_merge(out.begin(), out.begin() + mid, out.end(),
                       [](const IsotropicVector& a, const IsotropicVector& b) {
                         if (a.coords.back() != b.coords.back())
                           return a.coords.back() < b.coords.back();
                         return a.coords < b.coords;
                       });
  }
  return out;
}

std::uint64_t CountingHistogram::total() const {
  return std::accumulate(bins.begin(), bins.end(), std::uint64_t{0});
}

nlohmann::json CountingHistogram::to_json() const {
  nlohmann::json j;
  std::ostringstream os;
  os.precision(17);
  os << base;
  j["base"] = os.str();
  j["bins"] = bins;
  os.str("");
  os << fitted_slope;
  j["fitted_slope"] = os.str();
  os.str("");
  os << fit_r2;
  j["fit_r2"] = os.str();
  return j;
}

CountingHistogram counting_histogram(const std::vector<IsotropicVector>& points, double base,
                                     const ConeRegion& region) {
  if (base <= 1.0) throw std::invalid_argument("counting_histogram: base must exceed 1");
  CountingHistogram h;
  h.base = base;
  for (const auto& v : points) {
    if (!region.is_all() && !region.contains(v)) continue;
    double q = to_double(Rational(v.coords.back()));
    int k = static_cast<int>(std::floor(std::log(q) / std::log(base)));
    // boundary correction for inexact logs
    while (std::pow(base, k + 1) <= q) ++k;
    while (std::pow(base, k) > q) --k;
    if (static_cast<std::size_t>(k) >= h.bins.size()) h.bins.resize(k + 1, 0);
    ++h.bins[k];
  }
  return h;
}

std::pair<double, double> fit_exponent(CountingHistogram& hist, int k_min) {
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < hist.bins.size(); ++k) {
    if (static_cast<int>(k) < k_min || hist.bins[k] == 0) continue;
    xs.push_back(static_cast<double>(k + 1));
    ys.push_back(std::log(static_cast<double>(hist.bins[k])) / std::log(hist.base));
  }
  if (xs.size() < 3) throw std::domain_error("fit_exponent: fewer than 3 usable bins");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double denom = (n * sxx - sx * sx) * (n * syy - sy * sy);
  double r = (n * sxy - sx * sy);
  double r2 = denom > 0 ? (r * r) / denom : 1.0;
  hist.fitted_slope = slope;
  hist.fit_r2 = r2;
  return {slope, r2};
}

int choose_k_min(const CountingHistogram& hist, std::uint64_t min_count) {
  for (std::size_t k = 0; k < hist.bins.size(); ++k)
    if (hist.bins[k] >= min_count) return static_cast<int>(k);
  return 0;
}

double equidist_ratio(const std::vector<IsotropicVector>& points, int k, const ConeRegion& o1,
                      const ConeRegion& o2, double base) {
  CountingHistogram h1 = counting_histogram(points, base, o1);
  CountingHistogram h2 = counting_histogram(points, base, o2);
  std::uint64_t n1 = (static_cast<std::size_t>(k) < h1.bins.size()) ? h1.bins[k] : 0;
  std::uint64_t n2 = (static_cast<std::size_t>(k) < h2.bins.size()) ? h2.bins[k] : 0;
  if (n2 == 0) throw std::domain_error("equidist_ratio: empty denominator bin");
  return static_cast<double>(n1) / static_cast<double>(n2);
}

void write_points_csv(std::ostream& out, const std::vector<IsotropicVector>& points) {
  for (const auto& v : points) {
    for (std::size_t i = 0; i < v.coords.size(); ++i) {
      if (i) out << ',';
      out << v.coords[i];
    }
    out << '\n';
  }
}

std::vector<IsotropicVector> read_points_csv(std::istream& in) {
  std::vector<IsotropicVector> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<Int> coords;
    std::string tok;
    std::istringstream ls(line);
    while (std::getline(ls, tok, ',')) coords.emplace_back(tok);
    out.push_back(IsotropicVector{std::move(coords)});
  }
  return out;
}

}  // namespace cd
