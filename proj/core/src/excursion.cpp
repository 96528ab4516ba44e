#include "conedioph/excursion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace cd {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kTwoSqrt2 = 2.8284271247461903;

}  // namespace

CuspDepth cusp_depth_quadric(const PosDefForm& q, const std::vector<IsotropicVector>& pool) {
  if (pool.empty()) throw std::invalid_argument("empty isotropic pool");
  CuspDepth best;
  best.depth = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pool.size(); ++i) {
    double d = -busemann_vector(pool[i].real(), q);
    if (d > best.depth) {
      best.depth = d;
      best.witness = i;
    }
  }
  return best;
}

ExcursionTrace flow_and_record(const CuspFrame& frame, const Eigen::VectorXd& b, double t_max,
                               double dt, const std::vector<IsotropicVector>& pool, double beta,
                               long pool_qmax) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (beta < 0.0 || beta > 1.0) throw std::invalid_argument("beta must lie in [0, 1]");
  if (pool.empty()) throw std::invalid_argument("empty isotropic pool");

  const std::size_t s = frame.dim();
  const Eigen::MatrixXd u = unipotent_matrix(frame, b);

  // Frame coordinates z_w = u(b) Pi^{-1} w are flow-invariant; the flowed
  // form is diagonal on them, so each depth sample is a scan over the pool.
  std::vector<Eigen::VectorXd> z;
  z.reserve(pool.size());
  for (const auto& w : pool) z.push_back(u * frame.to_frame(w.real()));

  ExcursionTrace trace;
  trace.b = b;
  trace.beta = beta;
  trace.dt = dt;
  trace.pool_qmax = pool_qmax;

  const long steps = static_cast<long>(std::floor(t_max / dt + 1e-9));
  for (long k = 0; k <= steps; ++k) {
    double t = k * dt;
    double e_plus = std::exp(t / kSqrt2), e_minus = std::exp(-t / kSqrt2);
    double best = std::numeric_limits<double>::infinity();
    std::size_t witness = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      const Eigen::VectorXd& v = z[i];
      double val = e_plus * v[0] * v[0] + e_minus * v[s - 1] * v[s - 1];
      for (std::size_t j = 1; j + 1 < s; ++j) val += v[j] * v[j];
      if (val < best) {
        best = val;
        witness = i;
      }
    }
    double depth = -kSqrt2 * std::log(best);
    trace.samples.emplace_back(t, depth);
    if (depth > 0.0 && depth >= beta * t - 1e-12) trace.events.emplace_back(t, witness);
  }
  return trace;
}

std::pair<ApproxFunction, ApproxFunction> phi_correspondence(const PhiSpec& phi, double kappa0,
                                                             double c) {
  if (phi.slope <= 0 || phi.slope > 1)
    throw std::invalid_argument("phi and id - phi must both be monotone: slope in (0, 1]");
  Rational mult = Rational(1) / phi.slope;
  double slope = to_double(phi.slope);
  ApproxFunction phi1 = ApproxFunction::exp_rate(mult, kappa0);
  ApproxFunction phi2 = ApproxFunction::exp_rate(mult, c * std::exp(-1.0 / (kTwoSqrt2 * slope)));
  return {phi1, phi2};
}

Rational phi_pipeline_dimension(const ApproxFunction& phi1, int delta) {
  if (phi1.kind() != ApproxFunction::Kind::ExpRate)
    throw std::domain_error("pipeline dimension needs an exponential chart rate");
  return Rational(delta) / phi1.rate();
}

SlDepth sl_depth_identity(const Eigen::VectorXd& x, const Eigen::VectorXd& p, long long q,
                          double t, int slope) {
  const int n = static_cast<int>(x.size());
  if (p.size() != n) throw std::invalid_argument("dimension mismatch between x and p");
  if (q == 0 && p.isZero(0.0)) throw std::invalid_argument("(p, q) must be nonzero");
  if (slope != 1 && slope != n) throw std::invalid_argument("slope must be 1 or n");

  const int s = n + 1;
  const double root = std::sqrt(static_cast<double>(n) * (n + 1));
  const double qd = static_cast<double>(q);

  SlDepth out;
  Eigen::VectorXd v(s);
  Eigen::MatrixXd u = Eigen::MatrixXd::Identity(s, s);
  Eigen::VectorXd half(s);  // ray exponents t_i / 2 of the diagonal form

  if (slope == 1) {
    out.closed_form =
        std::exp(t / root) * (p + qd * x).squaredNorm() + std::exp(-n * t / root) * qd * qd;
    u.topRightCorner(n, 1) = x;
    v.head(n) = p;
    v[n] = qd;
    half.head(n).setConstant(t / (2.0 * root));
    half[n] = -n * t / (2.0 * root);
  } else {
    out.closed_form =
        std::exp(-n * t / root) * qd * qd + std::exp(t / root) * (p - qd * x).squaredNorm();
    u.topRightCorner(1, n) = x.transpose();
    v[0] = qd;
    v.tail(n) = p;
    half[0] = n * t / (2.0 * root);
    half.tail(n).setConstant(-t / (2.0 * root));
  }

  // The flowed form is u^T R u with R the diagonal ray form; assemble it
  // from the factor pair so large |t| keeps full relative accuracy.
  Eigen::MatrixXd f = u.transpose() * half.array().exp().matrix().asDiagonal();
  Eigen::MatrixXd u_inv = 2.0 * Eigen::MatrixXd::Identity(s, s) - u;  // unipotent inverse
  Eigen::MatrixXd f_inv = (-half).array().exp().matrix().asDiagonal() * u_inv.transpose();
  PosDefForm form = PosDefForm::from_factor(f, f_inv, 1.0);

  out.matrix_form =
      slope == 1 ? busemann_ambient_vector(v, form) : busemann_ambient_dual(v, form);
  return out;
}

nlohmann::json RbetaSummary::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows)
    rows_json.push_back(
        {{"events", r.events}, {"last_event_t", r.last_event_t}, {"persistent", r.persistent}});
  return {{"rows", rows_json},
          {"persistent_count", persistent_count},
          {"persistence_exponent", persistence_exponent}};
}

RbetaSummary rbeta_event_summary(const std::vector<ExcursionTrace>& traces, double beta) {
  RbetaSummary summary;
  if (traces.empty()) return summary;

  double t_max = 0.0;
  for (const auto& tr : traces)
    if (!tr.samples.empty()) t_max = std::max(t_max, tr.samples.back().first);

  std::vector<double> last_times;
  for (const auto& tr : traces) {
    RbetaSummary::Row row;
    for (const auto& [t, depth] : tr.samples) {
      if (depth > 0.0 && depth >= beta * t - 1e-12) {
        ++row.events;
        row.last_event_t = t;
      }
    }
    row.persistent = row.events > 0 && row.last_event_t >= t_max - 1.5 * tr.dt;
    if (row.persistent) ++summary.persistent_count;
    if (row.events > 0) last_times.push_back(row.last_event_t);
    summary.rows.push_back(row);
  }

  // Fit ln #(traces whose events reach beyond tau) against tau.
  summary.persistence_exponent = std::numeric_limits<double>::quiet_NaN();
  if (!last_times.empty() && t_max > 0.0) {
    std::sort(last_times.begin(), last_times.end());
    std::vector<double> xs, ys;
    for (int j = 1; j <= 8; ++j) {
      double tau = t_max * j / 10.0;
      auto it = std::lower_bound(last_times.begin(), last_times.end(), tau);
      auto count = static_cast<double>(last_times.end() - it);
      if (count > 0.0) {
        xs.push_back(tau);
        ys.push_back(std::log(count));
      }
    }
    if (xs.size() >= 2) {
      double mx = 0, my = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
      mx /= xs.size(), my /= ys.size();
      double num = 0, den = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
      }
      if (den > 0) summary.persistence_exponent = num / den;
    }
  }
  return summary;
}

void write_trace_csv(std::ostream& out, const ExcursionTrace& trace) {
  out << "t,depth,witness\n";
  std::size_t e = 0;
  for (const auto& [t, depth] : trace.samples) {
    long long witness = -1;
    if (e < trace.events.size() && trace.events[e].first == t) {
      witness = static_cast<long long>(trace.events[e].second);
      ++e;
    }
    out << t << ',' << depth << ',' << witness << '\n';
  }
}

}  // namespace cd
