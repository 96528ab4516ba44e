// End-to-end acceptance suite: one PASS/FAIL line per criterion, exit code
// = number of failing criteria.

#include "conedioph/chart.hpp"
#include "conedioph/dioph.hpp"
#include "conedioph/harness.hpp"
#include "conedioph/rng.hpp"
#include "conedioph/ubiquity.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace cd;
namespace fs = std::filesystem;

namespace {

const double kSqrt2 = std::sqrt(2.0);

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return ExperimentConfig::from_stream(in);
}

ExperimentResult run(const std::string& config_text, const std::string& name,
                     const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("cd_acceptance_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return run_experiment(parse(config_text), name, dir.string());
}

std::string jstr(const nlohmann::json& j, const char* key) {
  return j.contains(key) ? j.at(key).dump() : "?";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Least-squares slope of y against x.
double slope_of(const std::vector<double>& x, const std::vector<double>& y) {
  double n = static_cast<double>(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

int g_failures = 0;

void report(int number, const std::string& label, bool pass, const std::string& detail) {
  std::printf("criterion %2d  %-24s %s  (%s)\n", number, label.c_str(),
              pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

// ---- criterion 1: counting-law exponents -----------------------------------

void criterion_counting() {
  auto circle = run("[form]\ndiag = 1,1\n[run]\nthreads = 4\n[counting]\nq_max = 4096\n",
                    "counting", "count_circle");
  auto sphere = run("[form]\ndiag = 1,1,1\n[run]\nthreads = 4\n[counting]\nq_max = 512\n",
                    "counting", "count_sphere");
  std::ostringstream d;
  d << "circle slope " << jstr(circle.summary, "fitted_slope") << " r2 "
    << jstr(circle.summary, "fit_r2") << "; sphere slope "
    << jstr(sphere.summary, "fitted_slope");
  report(1, "counting law", circle.pass && sphere.pass, d.str());
}

// ---- criterion 2: equidistribution ratios -----------------------------------

void criterion_equidist() {
  auto res = run("[form]\ndiag = 1,1,1\n[run]\nthreads = 4\n[equidist]\nq_max = 512\n",
                 "equidist", "equidist");
  std::ostringstream d;
  d << "congruent " << jstr(res.summary, "congruent_ratio") << ", volume-2 "
    << jstr(res.summary, "volume2_ratio");
  report(2, "equidistribution", res.pass, d.str());
}

// ---- criterion 3: geometry closed forms --------------------------------------

void criterion_geometry() {
  auto res = run("[form]\ndiag = 1,1\n[run]\nthreads = 4\n[geometry]\ninstances = 200\n",
                 "geometry", "geometry");
  std::ostringstream d;
  d << "busemann " << jstr(res.summary, "busemann_limit_worst") << ", odist "
    << jstr(res.summary, "odist_worst") << ", chart "
    << jstr(res.summary, "chart_roundtrip_worst") << ", depth-identity "
    << jstr(res.summary, "depth_identity_worst");
  report(3, "geometry closed forms", res.pass, d.str());
}

// ---- criterion 4: horoball trace law ------------------------------------------

void criterion_trace_law() {
  // split signature (2,2) normal form 2 x1 x4 + 2 x2 x3
  RatSymForm l(normal_form_matrix(4, 2, 1));
  CuspFrame fr = witt_frame(l, IsotropicVector{{Int(1), Int(0), Int(0), Int(0)}});
  Eigen::VectorXd es = Eigen::VectorXd::Unit(4, 3);

  // slope of the log-measure in the excursion depth tau at fixed D = 0
  std::vector<double> taus, logs;
  for (double tau = 2.0; tau <= 10.0; tau += 1.0) {
    auto est = trace_measure_mc(fr, es, tau, 400000, 11);
    if (est.hits == 0) continue;
    taus.push_back(tau);
    logs.push_back(std::log(est.estimate));
  }
  double tau_slope = slope_of(taus, logs);
  double tau_target = -1.0 / (2.0 * kSqrt2);
  bool tau_ok = taus.size() >= 5 && std::abs(tau_slope - tau_target) <= 0.15 * std::abs(tau_target);

  // slope in the cusp weight D at fixed tau = 4 (chart dimension 2)
  std::vector<double> ds, dlogs;
  for (double d0 = 0.0; d0 <= 4.0; d0 += 1.0) {
    Eigen::VectorXd w = std::exp(d0 / (2.0 * kSqrt2)) * es;
    auto est = trace_measure_mc(fr, w, d0 + 4.0, 400000, 13);
    if (est.hits == 0) continue;
    ds.push_back(d0);
    dlogs.push_back(std::log(est.estimate));
  }
  double d_slope = slope_of(ds, dlogs);
  double d_target = -2.0 / (2.0 * kSqrt2);
  bool d_ok = ds.size() >= 4 && std::abs(d_slope - d_target) <= 0.15 * std::abs(d_target);

  // bounding-ball inclusion: membership implies |b - u_w| <= e^{-D / 2 sqrt 2}
  Rng rng(17);
  std::uint64_t samples = 0, violations = 0;
  for (double d0 : {0.0, 1.0, 2.5}) {
    Eigen::VectorXd w = std::exp(d0 / (2.0 * kSqrt2)) * es;
    double r = std::exp(-d0 / (2.0 * kSqrt2));
    for (int k = 0; k < 40000; ++k) {
      Eigen::VectorXd b(2);
      b << rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5);
      double t = d0 + rng.uniform(0.0, 8.0);
      ++samples;
      if (trace_membership(fr, w, t, b) && b.norm() > r + 1e-12) ++violations;
    }
  }
  bool incl_ok = samples >= 100000 && violations == 0;

  std::ostringstream d;
  d << "tau slope " << tau_slope << " vs " << tau_target << ", D slope " << d_slope << " vs "
    << d_target << ", inclusion violations " << violations << "/" << samples;
  report(4, "horoball trace law", tau_ok && d_ok && incl_ok, d.str());
}

// ---- criterion 5: approximant rigidity ----------------------------------------

void criterion_aprox() {
  const char* tmpl =
      "[form]\ndiag = %s\n[run]\nthreads = 4\n[aprox]\nq_max = 500\nalpha = 1/2\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, tmpl, "1,1");
  auto circle = run(buf, "aprox", "aprox_circle");
  std::snprintf(buf, sizeof buf, tmpl, "1,1,1");
  auto sphere = run(buf, "aprox", "aprox_sphere");
  std::ostringstream d;
  d << "circle q0 " << jstr(circle.summary, "empirical_q0") << " <= "
    << jstr(circle.summary, "theoretical_q0") << ", sphere q0 "
    << jstr(sphere.summary, "empirical_q0") << " <= "
    << jstr(sphere.summary, "theoretical_q0");
  report(5, "approximant rigidity", circle.pass && sphere.pass, d.str());
}

// ---- criterion 6: dimension crossover ------------------------------------------

void criterion_crossover() {
  auto circle = run("[form]\ndiag = 1,1\n[run]\nthreads = 4\n[crossover]\nalpha = 2\nq_max = 4096\n",
                    "crossover", "cross_circle");
  auto sphere = run("[form]\ndiag = 1,1,1\n[run]\nthreads = 4\n[crossover]\nalpha = 2\nq_max = 512\n",
                    "crossover", "cross_sphere");
  bool exact = predicted_dimension(ApproxFunction::power_law(2), 2) == Rational(1, 3) &&
               predicted_dimension(ApproxFunction::power_law(2), 3) == Rational(2, 3);
  std::ostringstream d;
  d << "circle crossover " << jstr(circle.summary, "crossover") << " (target 1/3), sphere "
    << jstr(sphere.summary, "crossover") << " (target 2/3), symbolic "
    << (exact ? "exact" : "WRONG");
  report(6, "dimension crossover", circle.pass && sphere.pass && exact, d.str());
}

// ---- criterion 7: divergence classifier -----------------------------------------

void criterion_classifier() {
  UbiquitySpec spec;
  spec.rho = ApproxFunction::exp_rate(1);
  spec.t = 1.0;
  spec.delta = 1;
  spec.kappa = 1.0;
  spec.lambda = 0.5;

  int checked = 0, wrong = 0;
  for (int ai = 1; ai <= 4; ++ai) {
    Rational alpha(ai, 1);
    auto psi = chart_side(ApproxFunction::power_law(alpha));
    Rational critical = Rational(1) / (Rational(1) + alpha);
    for (int k = 1; k <= 5; ++k) {
      Rational s = critical * Rational(2 * k, 6);
      if (s >= spec.delta || s <= 0) continue;
      auto rep = divergence_classifier({s, 0}, psi, spec);
      bool expect_infinite = s <= critical;
      ++checked;
      if (!rep.symbolic ||
          (rep.verdict == DivergenceVerdict::MeasureInfinite) != expect_infinite)
        ++wrong;
    }
  }
  std::ostringstream d;
  d << checked << " grid points, " << wrong << " wrong verdicts";
  report(7, "divergence classifier", checked >= 20 && wrong == 0, d.str());
}

// ---- criterion 8: ubiquity -------------------------------------------------------

void criterion_ubiquity() {
  auto res = run("[form]\ndiag = 1,1\n[run]\nthreads = 4\n[ubiquity]\nq_max = 512\nballs = 50\n",
                 "ubiquity", "ubiquity");
  std::ostringstream d;
  d << "kappa-hat " << jstr(res.summary, "kappa_hat") << ", regularity "
    << jstr(res.summary, "regular");
  report(8, "local ubiquity", res.pass, d.str());
}

// ---- criterion 9: excursion correspondence ----------------------------------------

void criterion_excursion() {
  auto res = run("[form]\ndiag = 1,1\n[run]\nthreads = 4\n[excursion]\nq_max = 1024\n",
                 "excursion", "excursion");
  std::ostringstream d;
  d << "predicted dims " << jstr(res.summary, "predicted") << ", cusp traces persistent "
    << jstr(res.summary, "bound_persistent") << "/" << jstr(res.summary, "bound_total")
    << ", generic persistent " << jstr(res.summary, "generic_persistent");
  report(9, "excursion dimensions", res.pass, d.str());
}

// ---- criterion 10: determinism ------------------------------------------------------

void criterion_determinism() {
  const std::string cfg =
      "[form]\ndiag = 1,1\n[run]\nseed = 4242\nthreads = 3\n[counting]\nq_max = 512\n";
  fs::path d1 = fs::temp_directory_path() / "cd_acceptance_det1";
  fs::path d2 = fs::temp_directory_path() / "cd_acceptance_det2";
  for (const auto& d : {d1, d2}) {
    fs::remove_all(d);
    fs::create_directories(d);
  }
  auto r1 = run_experiment(parse(cfg), "counting", d1.string());
  auto r2 = run_experiment(parse(cfg), "counting", d2.string());
  bool same = r1.files == r2.files && !r1.files.empty();
  std::size_t compared = 0;
  if (same)
    for (const auto& f : r1.files) {
      ++compared;
      if (slurp(d1 / f) != slurp(d2 / f)) {
        same = false;
        break;
      }
    }
  std::ostringstream d;
  d << compared << " files byte-compared";
  report(10, "determinism", same, d.str());
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  struct Entry {
    void (*fn)();
  };
  const Entry entries[] = {
      {criterion_counting},  {criterion_equidist},   {criterion_geometry},
      {criterion_trace_law}, {criterion_aprox},      {criterion_crossover},
      {criterion_classifier}, {criterion_ubiquity},  {criterion_excursion},
      {criterion_determinism},
  };
  auto start = clock::now();
  for (const auto& e : entries) e.fn();
  double secs = std::chrono::duration<double>(clock::now() - start).count();
  std::printf("%d/10 criteria passed in %.1f s\n", 10 - g_failures, secs);
  return g_failures;
}
