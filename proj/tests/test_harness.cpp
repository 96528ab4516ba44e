#include "conedioph/harness.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cd;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return ExperimentConfig::from_stream(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("config parsing: sections, comments, typed accessors") {
  ExperimentConfig cfg = parse(
      "# leading comment\n"
      "[form]\n"
      "diag = 1, 1   # trailing comment\n"
      "denominator = 3\n"
      "\n"
      "[run]\n"
      "seed = 99\n"
      "threads = 2\n"
      "alpha = 5/4\n"
      "grid = 0.25, 0.5, 0.75\n"
      "label = sphere run\n");

  CHECK(cfg.has("form.diag"));
  CHECK(!cfg.has("form.missing"));
  CHECK(cfg.get_string("run.label", "") == "sphere run");
  CHECK(cfg.get_long("run.seed", 0) == 99);
  CHECK(cfg.seed() == 99);
  CHECK(cfg.threads() == 2);
  CHECK(cfg.get_rational("run.alpha", Rational(0)) == Rational(5, 4));
  CHECK(cfg.get_rational("run.beta", Rational(7, 2)) == Rational(7, 2));
  auto grid = cfg.get_vector("run.grid", {});
  REQUIRE(grid.size() == 3);
  CHECK(grid[1] == doctest::Approx(0.5));
  auto rgrid = cfg.get_rational_vector("form.diag", {});
  REQUIRE(rgrid.size() == 2);
  CHECK(rgrid[0] == Rational(1));

  RatSymForm q = cfg.form();
  CHECK(q.dim() == 2);
  CHECK(q.matrix()(0, 0) == Rational(1, 3));

  CHECK_THROWS_AS(parse("[run]\nthis line has no equals sign\n"),
                  std::invalid_argument);
}

TEST_CASE("config canonical text and hash are insertion-order independent") {
  ExperimentConfig a = parse("[run]\nseed = 7\n[form]\ndiag = 1,1\n");
  ExperimentConfig b = parse("[form]\ndiag = 1,1\n[run]\nseed = 7\n");
  CHECK(a.canonical_text() == b.canonical_text());
  CHECK(a.hash() == b.hash());
  b.set("run.seed", "8");
  CHECK(a.hash() != b.hash());
  // the hash is hex and stable across runs of the same build
  CHECK(a.hash() == parse("[run]\nseed = 7\n[form]\ndiag = 1,1\n").hash());
}

TEST_CASE("config form and frame defaults") {
  ExperimentConfig cfg = parse("[form]\ndiag = 1,1\n");
  RatSymForm l = suspend_form(cfg.form());
  CHECK(l.dim() == 3);
  CuspFrame fr = cfg.frame();
  // default cusp is the standard isotropic vector (1, 0, ..., 0, 1)
  CHECK(fr.v0.coords.front() == Int(1));
  CHECK(fr.v0.coords.back() == Int(1));

  ExperimentConfig cfg2 = parse("[form]\ndiag = 1,1\n[frame]\nv0 = 3,4,5\n");
  CuspFrame fr2 = cfg2.frame();
  CHECK(fr2.v0.coords.front() == Int(3));
  CHECK(fr2.dim() == 3);
}

TEST_CASE("run_experiment rejects unknown names and lists known ones") {
  ExperimentConfig cfg = parse("[form]\ndiag = 1,1\n");
  CHECK_THROWS_AS(run_experiment(cfg, "no-such-experiment", "/tmp"),
                  std::invalid_argument);
  const auto& names = experiment_names();
  CHECK(names.size() == 7);
  CHECK(std::find(names.begin(), names.end(), "counting") != names.end());
  CHECK(std::find(names.begin(), names.end(), "ubiquity") != names.end());
}

TEST_CASE("counting experiment reports insufficient data on an empty region") {
  ExperimentConfig cfg = parse(
      "[form]\ndiag = 1,1\n"
      "[counting]\nq_max = 64\n"
      "region_lo = 5.0\nregion_hi = 5.1\n");
  fs::path dir = fs::temp_directory_path() / "cd_harness_empty";
  fs::remove_all(dir);
  fs::create_directories(dir);
  ExperimentResult res = run_experiment(cfg, "counting", dir.string());
  CHECK(!res.pass);
  CHECK(res.summary.at("verdict").get<std::string>() == "insufficient data");
  fs::remove_all(dir);
}

TEST_CASE("experiments rerun byte-identically") {
  ExperimentConfig cfg = parse(
      "[form]\ndiag = 1,1\n"
      "[run]\nseed = 2024\nthreads = 2\n"
      "[counting]\nq_max = 256\n");
  fs::path d1 = fs::temp_directory_path() / "cd_harness_det1";
  fs::path d2 = fs::temp_directory_path() / "cd_harness_det2";
  for (const auto& d : {d1, d2}) {
    fs::remove_all(d);
    fs::create_directories(d);
  }
  ExperimentResult r1 = run_experiment(cfg, "counting", d1.string());
  ExperimentResult r2 = run_experiment(cfg, "counting", d2.string());
  CHECK(r1.pass);
  CHECK(r1.pass == r2.pass);
  REQUIRE(r1.files == r2.files);
  CHECK(!r1.files.empty());
  for (const auto& f : r1.files) CHECK(slurp(d1 / f) == slurp(d2 / f));
  // the manifest records the config hash and version
  auto manifest = nlohmann::json::parse(slurp(d1 / "counting_manifest.json"));
  CHECK(manifest.at("config_hash").get<std::string>() == cfg.hash());
  CHECK(manifest.at("experiment").get<std::string>() == "counting");
  fs::remove_all(d1);
  fs::remove_all(d2);
}
