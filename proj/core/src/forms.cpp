#include "conedioph/forms.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cd {

namespace {

// Inertia by symmetric Gaussian reduction over Q. When every diagonal entry
// of the remaining block vanishes but some off-diagonal a_ij does not, the
// standard row+column addition creates a nonzero diagonal entry first.
std::pair<int, int> inertia(RatMatrix a) {
  const std::size_t n = a.rows();
  int pos = 0, neg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t swap_to = k;
      for (std::size_t i = k + 1; i < n && swap_to == k; ++i)
        if (a(i, i) != 0) swap_to = i;
      if (swap_to != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(swap_to, j));
        for (std::size_t i = 0; i < n; ++i) std::swap(a(i, k), a(i, swap_to));
      } else {
        std::size_t j_off = n;
        for (std::size_t j = k + 1; j < n && j_off == n; ++j)
          if (a(k, j) != 0) j_off = j;
        if (j_off == n) continue;  // zero row: degenerate direction
        for (std::size_t j = 0; j < n; ++j) a(k, j) += a(j_off, j);
        for (std::size_t i = 0; i < n; ++i) a(i, k) += a(i, j_off);
      }
    }
    const Rational p = a(k, k);
    if (p > 0) ++pos; else ++neg;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (a(i, k) == 0) continue;
      Rational f = a(i, k) / p;
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      for (std::size_t j = 0; j < n; ++j) a(j, i) = a(i, j);
    }
  }
  return {pos, neg};
}

}  // namespace

RatSymForm::RatSymForm(RatMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0)
    throw std::invalid_argument("form matrix must be square and nonempty");
  for (std::size_t i = 0; i < entries_.rows(); ++i)
    for (std::size_t j = i + 1; j < entries_.cols(); ++j)
      if (entries_(i, j) != entries_(j, i))
        throw std::invalid_argument("form matrix must be symmetric");
  det_ = entries_.det();
  signature_ = inertia(entries_);
}

Rational RatSymForm::operator()(const RatVec& v) const { return bilinear(v, v); }

Rational RatSymForm::bilinear(const RatVec& v, const RatVec& w) const {
  if (v.size() != dim() || w.size() != dim())
    throw std::invalid_argument("bilinear: dimension mismatch");
  return dot(v, entries_ * w);
}

RatSymForm RatSymForm::congruent(const RatMatrix& b) const {
  return RatSymForm(b.transpose() * entries_ * b);
}

Int IsotropicVector::height() const {
  Int h = 0;
  for (const auto& c : coords) h = std::max(h, Int(boost::multiprecision::abs(c)));
  return h;
}

double IsotropicVector::eheight() const {
  double s = 0;
  for (const auto& c : coords) {
    double x = c.convert_to<double>();
    s += x * x;
  }
  return std::sqrt(s);
}

RatVec IsotropicVector::rational() const {
  RatVec v;
  v.reserve(coords.size());
  for (const auto& c : coords) v.emplace_back(c);
  return v;
}

Eigen::VectorXd IsotropicVector::real() const {
  Eigen::VectorXd v(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) v(static_cast<Eigen::Index>(i)) = to_double(Rational(coords[i]));
  return v;
}

bool IsotropicVector::operator<(const IsotropicVector& o) const {
  Int h1 = height(), h2 = o.height();
  if (h1 != h2) return h1 < h2;
  return coords < o.coords;
}

IsotropicVector normalize_primitive(std::vector<Int> coords) {
  Int g = gcd_vector(coords);
  if (g == 0) throw std::invalid_argument("zero vector has no primitive representative");
  for (auto& c : coords) c /= g;
  for (auto it = coords.rbegin(); it != coords.rend(); ++it) {
    if (*it == 0) continue;
    if (*it < 0)
      for (auto& c : coords) c = -c;
    break;
  }
  return IsotropicVector{std::move(coords)};
}

RatSymForm suspend_form(const RatSymForm& q) {
  if (!q.nondegenerate())
    throw std::invalid_argument("suspend_form: the base form is degenerate");
  const std::size_t n = q.dim();
  RatMatrix m(n + 1, n + 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = -q.matrix()(i, j);
  m(n, n) = 1;
  return RatSymForm(std::move(m));
}

std::optional<IsotropicVector> find_isotropic_seed(const RatSymForm& L, long height_bound) {
  if (!L.nondegenerate())
    throw std::invalid_argument("find_isotropic_seed: degenerate form");
  const std::size_t s = L.dim();
  // Clear denominators once so the inner evaluation is pure integer work.
  Int den = 1;
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j)
      den = boost::multiprecision::lcm(den, denominator(L.matrix()(i, j)));
  std::vector<Int> m(s * s);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j)
      m[i * s + j] = numerator(Rational(L.matrix()(i, j) * den));

  std::vector<Int> v(s), mv(s);
  for (long h = 1; h <= height_bound; ++h) {
    // Max-norm sphere of radius h, scanned in lexicographic order.
    std::vector<long> x(s, -h);
    std::optional<IsotropicVector> best;
    while (true) {
      long maxabs = 0;
      for (auto c : x) maxabs = std::max(maxabs, std::abs(c));
      if (maxabs == h) {
        for (std::size_t i = 0; i < s; ++i) v[i] = x[i];
        Int val = 0;
        for (std::size_t i = 0; i < s; ++i) {
          if (v[i] == 0) continue;
          Int row = 0;
          for (std::size_t j = 0; j < s; ++j) row += m[i * s + j] * v[j];
          val += v[i] * row;
        }
        if (val == 0 && gcd_vector(v) == 1) {
          IsotropicVector cand = normalize_primitive(v);
          if (!best || cand.coords < best->coords) best = cand;
        }
      }
      std::size_t k = s;
      while (k > 0 && x[k - 1] == h) x[--k] = -h;
      if (k == 0) break;
      ++x[k - 1];
    }
    if (best) return best;
  }
  return std::nullopt;
}

RatSymForm read_form(std::istream& in) {
  std::size_t dim = 0;
  if (!(in >> dim) || dim == 0) throw std::invalid_argument("form literal: bad dimension");
  RatMatrix m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i; j < dim; ++j) {
      std::string tok;
      if (!(in >> tok)) throw std::invalid_argument("form literal: missing entries");
      m(i, j) = parse_rational(tok);
      m(j, i) = m(i, j);
    }
  return RatSymForm(std::move(m));
}

void write_form(std::ostream& out, const RatSymForm& f) {
  out << f.dim() << "\n";
  for (std::size_t i = 0; i < f.dim(); ++i) {
    for (std::size_t j = i; j < f.dim(); ++j) {
      if (j > i) out << " ";
      out << rational_to_string(f.matrix()(i, j));
    }
    out << "\n";
  }
}

RatSymForm read_form_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open form file: " + path);
  return read_form(in);
}

}  // namespace cd
