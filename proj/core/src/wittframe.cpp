#include "conedioph/wittframe.hpp"

#include <cmath>
#include <stdexcept>

namespace cd {

namespace {

constexpr long kSeedBound = 12;

struct NormalBasis {
  RatMatrix cols;                 // n x n rational part
  std::vector<double> scale;
  Eigen::MatrixXd cols_real;      // authoritative real basis
  bool rational_valid = true;
  bool exact = true;
  int ell = 0;
  int eps = 1;
};

RatVec column(const RatMatrix& m, std::size_t j) {
  RatVec v(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) v[i] = m(i, j);
  return v;
}

// Completes an isotropic u of M to a hyperbolic pair (u, w) with b(u,w)=1
// and L(w)=0.
RatVec hyperbolic_partner(const RatSymForm& M, const RatVec& u) {
  const std::size_t n = M.dim();
  RatVec w;
  for (std::size_t i = 0; i < n; ++i) {
    RatVec e(n, Rational(0));
    e[i] = 1;
    Rational b = M.bilinear(u, e);
    if (b != 0) {
      w = e;
      for (auto& c : w) c /= b;
      break;
    }
  }
  if (w.empty()) throw std::domain_error("isotropic vector is in the radical");
  Rational lw = M(w);
  for (std::size_t i = 0; i < n; ++i) w[i] -= lw / 2 * u[i];
  return w;
}

// Basis of {x : b(u,x)=0, b(w,x)=0} as columns of an n x (n-2) matrix.
RatMatrix pair_complement(const RatSymForm& M, const RatVec& u, const RatVec& w) {
  const std::size_t n = M.dim();
  RatMatrix rows(2, n);
  RatVec mu = M.matrix() * u, mw = M.matrix() * w;
  for (std::size_t j = 0; j < n; ++j) {
    rows(0, j) = mu[j];
    rows(1, j) = mw[j];
  }
  auto basis = rows.nullspace();
  if (basis.size() != n - 2) throw std::domain_error("unexpected complement dimension");
  RatMatrix b(n, n - 2);
  for (std::size_t j = 0; j < n - 2; ++j)
    for (std::size_t i = 0; i < n; ++i) b(i, j) = basis[j][i];
  return b;
}

// Congruence transform P with P^T M P diagonal, returned with the diagonal.
std::pair<RatMatrix, RatVec> diagonalize(const RatSymForm& f) {
  const std::size_t n = f.dim();
  RatMatrix a = f.matrix();
  RatMatrix p = RatMatrix::identity(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t piv = k;
      for (std::size_t i = k + 1; i < n && piv == k; ++i)
        if (a(i, i) != 0) piv = i;
      if (piv != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
        for (std::size_t i = 0; i < n; ++i) {
          std::swap(a(i, k), a(i, piv));
          std::swap(p(i, k), p(i, piv));
        }
      } else {
        std::size_t joff = n;
        for (std::size_t j = k + 1; j < n && joff == n; ++j)
          if (a(k, j) != 0) joff = j;
        if (joff == n) throw std::domain_error("degenerate block while diagonalizing");
        for (std::size_t j = 0; j < n; ++j) a(k, j) += a(joff, j);
        for (std::size_t i = 0; i < n; ++i) {
          a(i, k) += a(i, joff);
          p(i, k) += p(i, joff);
        }
      }
    }
    Rational piv = a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (a(i, k) == 0) continue;
      Rational fct = a(i, k) / piv;
      for (std::size_t j = 0; j < n; ++j) a(i, j) -= fct * a(k, j);
      for (std::size_t j = 0; j < n; ++j) a(j, i) = a(i, j);
      for (std::size_t j = 0; j < n; ++j) p(j, i) -= fct * p(j, k);
    }
  }
  RatVec d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);
  return {std::move(p), std::move(d)};
}

// Largest r with r^2 dividing |x| (trial division; desk-scale inputs).
Int square_part(Int x) {
  x = boost::multiprecision::abs(x);
  Int r = 1;
  for (Int p = 2; p * p <= x && p < 20000; ++p) {
    while (x % (p * p) == 0) {
      x /= p * p;
      r *= p;
    }
  }
  return r;
}

// Rational scale c with d*c^2 of minimal height, pulling out square factors.
Rational square_reduce(const Rational& d) {
  Int np = square_part(numerator(d));
  Int dp = square_part(denominator(d));
  return Rational(dp, np);
}

NormalBasis normalize(const RatSymForm& M);

// Assembles [u | middle basis | w] given the hyperbolic pair and the
// normalized middle block.
NormalBasis assemble_pair(const RatSymForm& M, const RatVec& u, const RatVec& w) {
  const std::size_t n = M.dim();
  RatMatrix comp = (n > 2) ? pair_complement(M, u, w) : RatMatrix(n, 0);
  NormalBasis mid;
  if (n > 2) {
    RatSymForm middle((comp.transpose() * M.matrix()) * comp);
    mid = normalize(middle);
  }
  NormalBasis out;
  out.cols = RatMatrix(n, n);
  out.scale.assign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    out.cols(i, 0) = u[i];
    out.cols(i, n - 1) = w[i];
  }
  out.ell = 1 + mid.ell;
  out.eps = (n > 2) ? mid.eps : 1;
  out.rational_valid = (n <= 2) || mid.rational_valid;
  out.exact = (n <= 2) || mid.exact;
  out.cols_real = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd comp_real = comp.to_double();
  for (std::size_t i = 0; i < n; ++i) {
    out.cols_real(i, 0) = to_double(u[i]);
    out.cols_real(i, n - 1) = to_double(w[i]);
  }
  if (n > 2) {
    out.cols_real.block(0, 1, n, n - 2) = comp_real * mid.cols_real;
    if (mid.rational_valid) {
      RatMatrix midcols = comp * mid.cols;
      for (std::size_t j = 0; j < n - 2; ++j) {
        out.scale[j + 1] = mid.scale[j];
        for (std::size_t i = 0; i < n; ++i) out.cols(i, j + 1) = midcols(i, j);
      }
    }
  }
  return out;
}

NormalBasis normalize(const RatSymForm& M) {
  const std::size_t n = M.dim();
  NormalBasis out;
  if (n == 0) {
    out.cols = RatMatrix(0, 0);
    out.cols_real = Eigen::MatrixXd(0, 0);
    return out;
  }
  if (!M.nondegenerate()) throw std::domain_error("degenerate middle block");

  if (auto seed = find_isotropic_seed(M, kSeedBound)) {
    RatVec u = seed->rational();
    RatVec w = hyperbolic_partner(M, u);
    return assemble_pair(M, u, w);
  }

  // Anisotropic over Q within the search bound: diagonalize and rescale.
  auto [p, d] = diagonalize(M);
  out.cols = p;
  out.scale.assign(n, 1.0);
  std::vector<int> sign_of(n);
  bool all_exact = true;
  for (std::size_t j = 0; j < n; ++j) {
    Rational red = square_reduce(d[j]);
    for (std::size_t i = 0; i < n; ++i) out.cols(i, j) *= red;
    Rational dj = d[j] * red * red;
    sign_of[j] = dj > 0 ? 1 : -1;
    Rational a = boost::multiprecision::abs(dj);
    if (a != 1) {
      out.scale[j] = 1.0 / std::sqrt(to_double(a));
      all_exact = false;
    }
  }
  out.exact = all_exact;

  // Group signs so the block reads as a single-sign square block when the
  // signature is definite. A mixed indefinite block here means the form has
  // real hyperbolic planes not visible over Q within the seed bound; pair
  // +1/-1 columns in real arithmetic.
  std::size_t pos = 0, neg = 0;
  for (auto s : sign_of) (s > 0 ? pos : neg)++;
  Eigen::MatrixXd real = out.cols.to_double();
  for (std::size_t j = 0; j < n; ++j) real.col(j) *= out.scale[j];
  if (pos == 0 || neg == 0) {
    out.eps = pos ? 1 : -1;
    out.ell = 0;
    out.cols_real = real;
    return out;
  }

  std::vector<std::size_t> plus, minus;
  for (std::size_t j = 0; j < n; ++j) (sign_of[j] > 0 ? plus : minus).push_back(j);
  const std::size_t pairs = std::min(plus.size(), minus.size());
  const int eps = plus.size() > minus.size() ? 1 : -1;
  Eigen::MatrixXd arranged(n, n);
  for (std::size_t k = 0; k < pairs; ++k) {
    Eigen::VectorXd pcol = real.col(plus[k]), mcol = real.col(minus[k]);
    arranged.col(k) = pcol + mcol;                  // isotropic
    arranged.col(n - 1 - k) = (pcol - mcol) / 2.0;  // isotropic, b = 1
  }
  std::size_t mid = pairs;
  for (std::size_t k = pairs; k < plus.size(); ++k) arranged.col(mid++) = real.col(plus[k]);
  for (std::size_t k = pairs; k < minus.size(); ++k) arranged.col(mid++) = real.col(minus[k]);
  out.cols_real = arranged;
  out.rational_valid = false;
  out.exact = false;
  out.ell = static_cast<int>(pairs);
  out.eps = eps;
  return out;
}

}  // namespace

RatMatrix normal_form_matrix(std::size_t s, int ell, int eps) {
  RatMatrix m(s, s);
  for (int k = 0; k < ell; ++k) {
    m(k, s - 1 - k) = 1;
    m(s - 1 - k, k) = 1;
  }
  for (std::size_t j = ell; j < s - ell; ++j) m(j, j) = eps;
  return m;
}

RatMatrix CuspFrame::normal_matrix() const { return normal_form_matrix(dim(), ell, eps); }

Eigen::MatrixXd CuspFrame::middle_matrix() const {
  const std::size_t s = dim();
  return normal_matrix().to_double().block(1, 1, s - 2, s - 2);
}

RatVec CuspFrame::opposite_rational() const {
  if (!rational_valid) throw std::domain_error("frame basis is not rational");
  RatVec w(dim());
  for (std::size_t i = 0; i < dim(); ++i) w[i] = basis(i, dim() - 1);
  return w;
}

Eigen::MatrixXd CuspFrame::geodesic_frame(double t) const {
  const std::size_t s = dim();
  Eigen::VectorXd d = Eigen::VectorXd::Ones(s);
  d(0) = std::exp(t / std::sqrt(2.0));
  d(s - 1) = std::exp(-t / std::sqrt(2.0));
  return d.asDiagonal();
}

Eigen::MatrixXd CuspFrame::geodesic(double t) const {
  return Pi_inv.transpose() * geodesic_frame(t) * Pi_inv;
}

CuspFrame witt_frame(const RatSymForm& L, const IsotropicVector& v0) {
  if (!L.nondegenerate()) throw std::invalid_argument("witt_frame: degenerate form");
  RatVec v = v0.rational();
  if (v.size() != L.dim()) throw std::invalid_argument("witt_frame: dimension mismatch");
  if (L(v) != 0) throw std::invalid_argument("witt_frame: v0 is not isotropic");

  RatVec w = hyperbolic_partner(L, v);
  NormalBasis nb = assemble_pair(L, v, w);

  CuspFrame frame{L, v0};
  frame.basis = nb.cols;
  frame.col_scale = nb.scale;
  frame.rational_valid = nb.rational_valid;
  frame.exact = nb.exact;
  frame.ell = nb.ell;
  frame.eps = nb.eps;
  frame.Pi = nb.cols_real;
  frame.Pi_inv = frame.Pi.inverse();
  return frame;
}

}  // namespace cd
