#include <benchmark/benchmark.h>

#include "conedioph/chart.hpp"
#include "conedioph/conepoints.hpp"
#include "conedioph/forms.hpp"
#include "conedioph/posdef.hpp"
#include "conedioph/wittframe.hpp"

namespace {

cd::RatSymForm circle_suspension() {
  cd::RatMatrix q(2, 2);
  q(0, 0) = q(1, 1) = 1;
  return cd::suspend_form(cd::RatSymForm(q));
}

void BM_WittFrame(benchmark::State& state) {
  cd::RatSymForm l = circle_suspension();
  cd::IsotropicVector v0{{cd::Int(3), cd::Int(4), cd::Int(5)}};
  for (auto _ : state) {
    auto fr = cd::witt_frame(l, v0);
    benchmark::DoNotOptimize(fr.Pi);
  }
}
BENCHMARK(BM_WittFrame);

void BM_IsotropicSeed(benchmark::State& state) {
  cd::RatMatrix q(3, 3);
  q(0, 0) = q(1, 1) = q(2, 2) = 1;
  cd::RatSymForm l = cd::suspend_form(cd::RatSymForm(q));
  for (auto _ : state) {
    auto s = cd::find_isotropic_seed(l, 4);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_IsotropicSeed);

void BM_EnumerateCircle(benchmark::State& state) {
  cd::RatSymForm l = circle_suspension();
  const long q_max = state.range(0);
  for (auto _ : state) {
    auto pool = cd::enumerate_isotropic(l, q_max, cd::ConeRegion::all(), 1);
    benchmark::DoNotOptimize(pool.size());
  }
}
BENCHMARK(BM_EnumerateCircle)->Arg(256)->Arg(1024)->Arg(4096);

void BM_SymmetricDistance(benchmark::State& state) {
  Eigen::MatrixXd m1 = Eigen::MatrixXd::Identity(4, 4);
  Eigen::MatrixXd m2 = m1;
  m2(0, 0) = 4.0;
  m2(3, 3) = 0.25;
  m2(0, 1) = m2(1, 0) = 0.5;
  m2 = (m2 * m2.transpose()).eval();
  m2 /= std::pow(m2.determinant(), 0.25);  // distance needs matching det 1
  cd::PosDefForm a(m1, 1.0), b(m2, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(cd::distance(a, b));
}
BENCHMARK(BM_SymmetricDistance);

void BM_TraceMembership(benchmark::State& state) {
  cd::RatSymForm l(cd::normal_form_matrix(4, 2, 1));
  cd::CuspFrame fr = cd::witt_frame(l, cd::IsotropicVector{{cd::Int(1), cd::Int(0), cd::Int(0), cd::Int(0)}});
  Eigen::VectorXd w = Eigen::VectorXd::Unit(4, 3);
  Eigen::VectorXd b(2);
  b << 0.31, -0.12;
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cd::trace_membership(fr, w, t, b));
    t = t < 20.0 ? t + 0.1 : 0.0;
  }
}
BENCHMARK(BM_TraceMembership);

}  // namespace

BENCHMARK_MAIN();
