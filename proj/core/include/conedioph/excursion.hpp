#pragma once

#include "conedioph/chart.hpp"
#include "conedioph/dioph.hpp"
#include "conedioph/posdef.hpp"

#include <json.hpp>

#include <cstdint>
#include <utility>
#include <vector>

namespace cd {

/// Depth of a point against the cusp neighborhoods: the negative of the
/// smallest Busemann value over a finite pool of integer isotropic
/// vectors, together with the minimizing vector. A lower bound for the
/// true depth (min over the full orbit); doubling the pool never
/// decreases it.
struct CuspDepth {
  double depth = 0.0;
  std::size_t witness = 0;  // pool index of the minimizer
};

/// depth = -min over the pool of sqrt(2) ln Q(v). Throws
/// std::invalid_argument on an empty pool.
CuspDepth cusp_depth_quadric(const PosDefForm& q, const std::vector<IsotropicVector>& pool);

/// A sampled geodesic excursion t -> G(t)[u(b)] with its depth profile and
/// the events depth >= beta t.
struct ExcursionTrace {
  Eigen::VectorXd b;  // starting unipotent chart coordinate
  double beta = 0.0;
  double dt = 0.05;
  long pool_qmax = 0;
  std::vector<std::pair<double, double>> samples;       // (t, depth)
  std::vector<std::pair<double, std::size_t>> events;   // (t, witness index)
};

/// Samples the depth along the flowed chart point on the uniform grid
/// t = 0, dt, ..., t_max and records the events depth >= beta t (with
/// positive depth). Deterministic.
ExcursionTrace flow_and_record(const CuspFrame& frame, const Eigen::VectorXd& b, double t_max,
                               double dt, const std::vector<IsotropicVector>& pool, double beta,
                               long pool_qmax = 0);

/// A monotone bijection phi(t) = slope * t with exact slope; both phi and
/// id - phi must be monotone, so slope lies in (0, 1].
struct PhiSpec {
  Rational slope = 1;
};

/// The chart-side bracket of the excursion set R_phi: Phi1(x) =
/// kappa0 e^{-phi^{-1}(x)/(2 sqrt 2)} and Phi2(x) =
/// c e^{-phi^{-1}(x+1)/(2 sqrt 2)}, so S~_{Phi2} subset R_phi subset
/// S~_{Phi1}. For phi(t) = (1-beta) t both are exponential rates with
/// exact multiplier 1/(1-beta). Throws std::invalid_argument when the
/// slope leaves (0, 1].
std::pair<ApproxFunction, ApproxFunction> phi_correspondence(const PhiSpec& phi, double kappa0,
                                                             double c);

/// Exact dimension predicted by the chart-side exponential rate: the
/// critical exponent delta / m of sum Phi(d_w)^s over the pool, so for
/// phi(t) = (1-beta) t it returns delta (1-beta). Throws unless Phi is an
/// exponential rate.
Rational phi_pipeline_dimension(const ApproxFunction& phi1, int delta);

/// Dual-path evaluation of the ambient-space depth along the slope-1 or
/// slope-n singular ray flowed by the unipotent of x: closed_form is
/// e^{t/sqrt(n(n+1))} ||p + q x||^2 + e^{-nt/sqrt(n(n+1))} q^2 for slope 1
/// (with p - q x and mirrored exponents for slope n), matrix_form is
/// eta_n ln of the same quantity obtained by assembling the ray and the
/// unipotent as matrices and evaluating the Busemann function of (p, q)
/// (slope 1) or its dual at (q, p) (slope n); eta_n = sqrt((n+1)/n).
/// Throws std::invalid_argument when (p, q) = 0 or slope is neither 1
/// nor n.
struct SlDepth {
  double closed_form = 0.0;  // the displayed quadratic expression
  double matrix_form = 0.0;  // eta_n ln of the matrix-route evaluation
};

SlDepth sl_depth_identity(const Eigen::VectorXd& x, const Eigen::VectorXd& p, long long q,
                          double t, int slope);

struct RbetaSummary {
  struct Row {
    std::size_t events = 0;
    double last_event_t = 0.0;
    bool persistent = false;  // events reach the end of the trace
  };
  std::vector<Row> rows;
  std::size_t persistent_count = 0;
  /// Slope of ln #(traces with events beyond tau) against tau.
  double persistence_exponent = 0.0;
  nlohmann::json to_json() const;
};

/// Per-trace event counts, last event times and the empirical persistence
/// exponent across the starting grid; events are re-thresholded at the
/// given beta (which must be >= the beta the traces were recorded with
/// for the event sets to nest).
RbetaSummary rbeta_event_summary(const std::vector<ExcursionTrace>& traces, double beta);

/// CSV streaming of a trace: rows "t,depth,witness" (witness -1 when the
/// sample is not an event).
void write_trace_csv(std::ostream& out, const ExcursionTrace& trace);

}  // namespace cd
