#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "hdsvar/montecarlo.hpp"

using namespace hdsvar;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.dgp.p = 6;
  cfg.dgp.n = 80;
  cfg.dgp.d = 1;
  cfg.dgp.k_a = 2;
  cfg.dgp.rho_target = 0.8;
  cfg.dgp.k_u = 2;
  cfg.dgp.shock_of_interest = 1;
  cfg.dgp.k_b = 2;
  cfg.dgp.k_d = 2;
  cfg.mc_reps = 3;
  cfg.horizons = {0, 2};
  cfg.alpha = 0.1;
  cfg.boot.reps = 25;
  cfg.seed = 42;
  cfg.lasso.grid_size = 10;
  cfg.lasso.grid_min_ratio = 0.1;
  cfg.covreg.grid_size = 10;
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  REQUIRE(bool(file));
  std::ostringstream out;
  out << file.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("a tiny coverage experiment produces well-formed cells") {
  const ExperimentConfig cfg = tiny_config();
  const ExperimentReport report = run_experiment(cfg);
  CHECK(report.replicates_ok == 3);
  CHECK(report.replicates_failed == 0);
  CHECK(report.wall_seconds > 0.0);

  // Shock of interest rides variable 1, so the tracked set {0..5} splits into
  // bands of sizes 1 / 1 / 4; cells: 2 methods x 2 centers x 2 horizons x 3 bands.
  REQUIRE(report.cells.size() == 24);
  const char* methods[2] = {"boot", "gaussian"};
  const char* centers[2] = {"de", "re"};
  const int horizons[2] = {0, 2};
  const char* bands[3] = {"below", "shock", "above"};
  const int band_sizes[3] = {1, 1, 4};
  std::size_t idx = 0;
  for (const char* method : methods)
    for (const char* center : centers)
      for (int h : horizons)
        for (int b = 0; b < 3; ++b) {
          const ExperimentCell& c = report.cells[idx++];
          CHECK(c.method == method);
          CHECK(c.center == center);
          CHECK(c.horizon == h);
          CHECK(c.band == bands[b]);
          CHECK(c.coverage >= 0.0);
          CHECK(c.coverage <= 1.0);
          // Variable 0 sits above the rotation diagonal, so its h = 0 response
          // is a structural zero: that cell's width is rounding noise at most.
          if (h == 0 && b == 0)
            CHECK(c.length < 1e-10);
          else
            CHECK(c.length > 1e-10);
          CHECK(c.n_ok == 3 * band_sizes[b]);
          CHECK(c.n_fail == 0);
        }

  // The stored length is the re-centered interval width, shared across centers.
  for (std::size_t i = 0; i < 24; i += 1) {
    const ExperimentCell& c = report.cells[i];
    if (c.center != "de") continue;
    bool found = false;
    for (const ExperimentCell& other : report.cells)
      if (other.method == c.method && other.center == "re" && other.horizon == c.horizon &&
          other.band == c.band) {
        CHECK(other.length == c.length);
        found = true;
      }
    CHECK(found);
  }
}

TEST_CASE("empty bands are omitted from the report") {
  ExperimentConfig cfg = tiny_config();
  cfg.dgp.shock_of_interest = 0;  // nothing sits below the shock variable
  cfg.mc_reps = 2;
  cfg.run_boot = false;
  const ExperimentReport report = run_experiment(cfg);
  CHECK(report.replicates_ok == 2);
  REQUIRE(report.cells.size() == 8);  // 1 method x 2 centers x 2 horizons x 2 bands
  const int band_sizes[2] = {1, 5};
  std::size_t idx = 0;
  for (const char* center : {"de", "re"})
    for (int h : {0, 2})
      for (int b = 0; b < 2; ++b) {
        const ExperimentCell& c = report.cells[idx++];
        CHECK(c.method == "gaussian");
        CHECK(c.center == center);
        CHECK(c.horizon == h);
        CHECK(c.band == (b == 0 ? "shock" : "above"));
        CHECK(c.n_ok == 2 * band_sizes[b]);
      }
}

TEST_CASE("reports round-trip through their CSV form") {
  const ExperimentReport report = run_experiment(tiny_config());
  const std::string dir = "hdsvar_test_tmp";
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/report.csv";
  emit_report(report, path);

  const std::string text = slurp(path);
  CHECK(text.rfind("method,centering,horizon,band,coverage,length,n_ok,n_fail\n", 0) == 0);

  const ExperimentReport back = read_report(path);
  REQUIRE(back.cells.size() == report.cells.size());
  for (std::size_t i = 0; i < report.cells.size(); ++i) {
    CHECK(back.cells[i].method == report.cells[i].method);
    CHECK(back.cells[i].center == report.cells[i].center);
    CHECK(back.cells[i].horizon == report.cells[i].horizon);
    CHECK(back.cells[i].band == report.cells[i].band);
    CHECK(back.cells[i].coverage == report.cells[i].coverage);
    CHECK(back.cells[i].length == report.cells[i].length);
    CHECK(back.cells[i].n_ok == report.cells[i].n_ok);
    CHECK(back.cells[i].n_fail == report.cells[i].n_fail);
  }

  std::ofstream bad(dir + "/bad_report.csv");
  bad << "method,centering\n";
  bad.close();
  CHECK_THROWS_AS((void)read_report(dir + "/bad_report.csv"), DataError);
  CHECK_THROWS_AS((void)read_report(dir + "/no_such_report.csv"), DataError);
}

TEST_CASE("experiments are reproducible across reruns and worker counts") {
  const std::string dir = "hdsvar_test_tmp";
  std::filesystem::create_directories(dir);
  ExperimentConfig cfg = tiny_config();

  emit_report(run_experiment(cfg), dir + "/mc_a.csv");
  emit_report(run_experiment(cfg), dir + "/mc_b.csv");
  cfg.threads = 2;
  emit_report(run_experiment(cfg), dir + "/mc_c.csv");

  const std::string a = slurp(dir + "/mc_a.csv");
  CHECK(a == slurp(dir + "/mc_b.csv"));
  CHECK(a == slurp(dir + "/mc_c.csv"));
}

TEST_CASE("config helpers resolve defaults") {
  ExperimentConfig cfg = tiny_config();
  cfg.horizons.clear();
  const std::vector<int> hs = cfg.horizon_list();
  REQUIRE(hs.size() == 21);
  CHECK(hs.front() == 0);
  CHECK(hs.back() == 20);

  cfg.horizons = {5, 2, 5, 0};
  CHECK(cfg.horizon_list() == std::vector<int>{0, 2, 5});

  cfg.track_limit = 4;
  CHECK(cfg.tracked_vars() == std::vector<Index>{0, 1, 2, 3});
  cfg.track_limit = 50;
  CHECK(cfg.tracked_vars().size() == 6);
}

TEST_CASE("experiment config files cover every recognized key") {
  const std::string dir = "hdsvar_test_tmp";
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/exp.cfg";
  {
    std::ofstream file(path);
    file << "hdsvar-mc v1\n"
         << "# comment lines and blanks are skipped\n"
         << "\n"
         << "preset class1\n"
         << "p 6\nn 80\nd 1\nk_a 2\nrho 0.8\nk_u 2\nshock_of_interest 1\n"
         << "k_b 2\nk_d 2\nlaw student_t10\nmc_reps 3\nhorizons 0 2 7\n"
         << "methods boot gaussian\nalpha 0.1\nboot_reps 25\nboot_burn_in 37\n"
         << "freeze_tuning 1\nsim_burn_in 99\ntrack_limit 10\nthreads 2\n"
         << "boot_threads 1\nseed 42\ntrace trace.csv\nlasso_grid 10\n"
         << "lasso_min_ratio 0.1\nthreshold_grid 10\ncv_folds 4\n";
  }
  const ExperimentConfig cfg = load_experiment_config(path);
  CHECK(cfg.dgp.p == 6);
  CHECK(cfg.dgp.n == 80);
  CHECK(cfg.dgp.d == 1);
  CHECK(cfg.dgp.k_a == 2);
  CHECK(cfg.dgp.rho_target == 0.8);
  CHECK(cfg.dgp.k_u == 2);
  CHECK(cfg.dgp.shock_idx.empty());
  CHECK(cfg.dgp.shock_of_interest == 1);
  CHECK(cfg.dgp.k_b == 2);
  CHECK(cfg.dgp.k_d == 2);
  CHECK(cfg.dgp.law == InnovationLaw::student_t10);
  CHECK(cfg.mc_reps == 3);
  CHECK(cfg.horizons == std::vector<int>{0, 2, 7});
  CHECK(cfg.run_boot);
  CHECK(cfg.run_gaussian);
  CHECK(cfg.alpha == 0.1);
  CHECK(cfg.boot.reps == 25);
  CHECK(cfg.boot.burn_in == 37);
  CHECK(cfg.boot.freeze_tuning);
  CHECK(cfg.sim_burn_in == 99);
  CHECK(cfg.track_limit == 10);
  CHECK(cfg.threads == 2);
  CHECK(cfg.boot.threads == 1);
  CHECK(cfg.seed == 42);
  CHECK(cfg.trace_path == "trace.csv");
  CHECK(cfg.lasso.grid_size == 10);
  CHECK(cfg.lasso.grid_min_ratio == 0.1);
  CHECK(cfg.covreg.grid_size == 10);
  CHECK(cfg.covreg.folds == 4);

  std::ofstream bad1(dir + "/exp_bad1.cfg");
  bad1 << "hdsvar-mc v2\n";
  bad1.close();
  CHECK_THROWS_AS((void)load_experiment_config(dir + "/exp_bad1.cfg"), DataError);

  std::ofstream bad2(dir + "/exp_bad2.cfg");
  bad2 << "hdsvar-mc v1\nwibble 3\n";
  bad2.close();
  CHECK_THROWS_AS((void)load_experiment_config(dir + "/exp_bad2.cfg"), DataError);

  std::ofstream bad3(dir + "/exp_bad3.cfg");
  bad3 << "hdsvar-mc v1\nmethods jackknife\n";
  bad3.close();
  CHECK_THROWS_AS((void)load_experiment_config(dir + "/exp_bad3.cfg"), DataError);

  std::ofstream bad4(dir + "/exp_bad4.cfg");
  bad4 << "hdsvar-mc v1\nmc_reps\n";
  bad4.close();
  CHECK_THROWS_AS((void)load_experiment_config(dir + "/exp_bad4.cfg"), DataError);
}

TEST_CASE("experiment validation rejects bad settings") {
  ExperimentConfig cfg = tiny_config();
  cfg.mc_reps = 0;
  CHECK_THROWS_AS(cfg.validate(), DataError);
  cfg = tiny_config();
  cfg.alpha = 1.0;
  CHECK_THROWS_AS(cfg.validate(), DataError);
  cfg = tiny_config();
  cfg.run_boot = false;
  cfg.run_gaussian = false;
  CHECK_THROWS_AS(cfg.validate(), DataError);
  cfg = tiny_config();
  cfg.boot.reps = 0;
  CHECK_THROWS_AS(cfg.validate(), DataError);
  cfg = tiny_config();
  cfg.sim_burn_in = -1;
  CHECK_THROWS_AS(cfg.validate(), DataError);
  cfg = tiny_config();
  cfg.track_limit = 0;
  CHECK_THROWS_AS(cfg.validate(), DataError);
  cfg = tiny_config();
  cfg.horizons = {3, -1};
  CHECK_THROWS_AS(cfg.validate(), DataError);
  cfg = tiny_config();
  cfg.dgp.k_u = 0;
  CHECK_THROWS_AS(cfg.validate(), DataError);
}
