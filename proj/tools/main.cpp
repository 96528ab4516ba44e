#include "conedioph/conepoints.hpp"
#include "conedioph/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

cd::ExperimentConfig load_config(const std::string& path, long threads, long seed) {
  cd::ExperimentConfig config;
  if (!path.empty()) config = cd::ExperimentConfig::from_file(path);
  if (threads > 0) config.set("run.threads", std::to_string(threads));
  if (seed >= 0) config.set("run.seed", std::to_string(seed));
  return config;
}

int run_named(const cd::ExperimentConfig& config, const std::vector<std::string>& names,
              const std::string& out) {
  bool all_pass = true;
  for (const auto& name : names) {
    auto result = cd::run_experiment(config, name, out);
    std::cout << name << ": " << (result.pass ? "pass" : "FAIL") << "\n"
              << result.summary.dump(2) << "\n";
    all_pass = all_pass && result.pass;
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cone-point counting, Diophantine limsup sets and cusp excursions"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir = "out";
  long threads = 0, seed = -1;
  app.add_option("--config", config_path, "experiment config file");
  app.add_option("--threads", threads, "worker threads");
  app.add_option("--seed", seed, "RNG seed");
  app.add_option("--out", out_dir, "output directory");

  long qmax = 100;
  std::string points_out;
  auto* enumerate = app.add_subcommand("enumerate", "enumerate primitive cone points");
  enumerate->add_option("--qmax", qmax, "largest denominator");
  enumerate->add_option("--points-out", points_out, "points CSV path (default stdout)");

  auto* count = app.add_subcommand("count", "counting histogram and exponent fit");
  count->add_option("--qmax", qmax, "largest denominator");

  std::string points_in;
  auto* fit = app.add_subcommand("fit", "fit the counting exponent of a points CSV");
  fit->add_option("--points", points_in, "points CSV path")->required();

  auto* verify = app.add_subcommand("verify-geometry", "closed-form vs numeric geometry checks");
  auto* dioph = app.add_subcommand("dioph", "rigidity scan for approximants off the quadric");
  std::string ubiquity_mode = "check";
  auto* ubiquity = app.add_subcommand("ubiquity", "regularity, coverage and divergence checks");
  ubiquity->add_option("--mode", ubiquity_mode,
                       "check | kappa | classify (all run the same experiment)");
  auto* excursion = app.add_subcommand("excursion", "geodesic cusp-excursion traces");

  std::vector<std::string> run_names;
  auto* run = app.add_subcommand("run", "run named experiments");
  run->add_option("names", run_names, "experiment names (default: all)");

  CLI11_PARSE(app, argc, argv);

  try {
    auto config = load_config(config_path, threads, seed);

    if (enumerate->parsed() || count->parsed()) {
      config.set("counting.q_max", std::to_string(qmax));
      if (enumerate->parsed()) {
        auto pool = cd::enumerate_isotropic(cd::suspend_form(config.form()), qmax,
                                            cd::ConeRegion::all(), config.threads());
        if (points_out.empty()) {
          cd::write_points_csv(std::cout, pool);
        } else {
          std::ofstream os(points_out, std::ios::binary);
          cd::write_points_csv(os, pool);
        }
        return 0;
      }
      return run_named(config, {"counting"}, out_dir);
    }
    if (fit->parsed()) {
      std::ifstream is(points_in);
      if (!is) throw std::runtime_error("cannot read " + points_in);
      auto pool = cd::read_points_csv(is);
      auto hist = cd::counting_histogram(pool, 2.0);
      auto [slope, r2] = cd::fit_exponent(hist, cd::choose_k_min(hist));
      std::cout << hist.to_json().dump(2) << "\n";
      return 0;
    }
    if (verify->parsed()) return run_named(config, {"geometry"}, out_dir);
    if (dioph->parsed()) return run_named(config, {"aprox"}, out_dir);
    if (ubiquity->parsed()) return run_named(config, {"ubiquity"}, out_dir);
    if (excursion->parsed()) return run_named(config, {"excursion"}, out_dir);
    if (run->parsed()) {
      if (run_names.empty()) run_names = cd::experiment_names();
      return run_named(config, run_names, out_dir);
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 0;
}
