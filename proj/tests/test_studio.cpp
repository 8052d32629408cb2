#include "doctest.h"

#include "eigenrate/study.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <algorithm>
#include <fstream>
#include <sstream>

using namespace eigenrate;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

const char* kSmallLaplace = R"(
[study]
kind = laplace-1d
family = p1
name = smoke
[mesh]
cells0 = 8
levels = 3
[eigen]
modes = 1
[gates]
eoc_e0_omega = 2.0 0.1
eoc_e1_omega = 1.0 0.1
eoc_lambda = 2.0 0.2
)";

}  // namespace

TEST_CASE("config parsing and validation") {
  const StudyConfig cfg = parse_config_text(kSmallLaplace);
  CHECK(cfg.kind == "laplace-1d");
  CHECK(cfg.family == "p1");
  CHECK(cfg.name == "smoke");
  CHECK(cfg.levels == 3);
  CHECK(cfg.gates.size() == 3);

  CHECK_THROWS(parse_config_text("[study]\nkind = laplace-1d\n[mesh]\nbogus = 3\n"));
  CHECK_THROWS(parse_config_text("[study]\nkind = nope\n"));
  CHECK_THROWS(parse_config_text("[weird]\nx = 1\n"));
  CHECK_THROWS(parse_config_text("kind = laplace-1d\n"));  // key outside a section

  const StudyConfig norms = parse_config_text(
      "[study]\nkind = laplace-1d\n[norms]\npairs = 0:2 1:2 0:inf\n");
  CHECK(norms.norm_pairs.size() == 3);
  CHECK(norms.norm_pairs[2].second >= NormSpec::INF_P);
}

TEST_CASE("small eigen study passes its gates and is deterministic") {
  const StudyConfig cfg = parse_config_text(kSmallLaplace);
  const StudyReport rep = run_study(cfg, 1);
  CHECK(rep.records.size() == 3);
  CHECK(rep.pass);
  for (const auto& g : rep.gates) CHECK(g.pass);

  const std::string j1 = report_to_json(rep);
  const StudyReport rep2 = run_study(cfg, 1);
  CHECK(report_to_json(rep2) == j1);

  // Round-trip through the parser is byte-identical.
  const StudyReport parsed = report_from_json(j1);
  CHECK(report_to_json(parsed) == j1);

  // A gate that cannot hold flips the exit status.
  StudyConfig bad = cfg;
  bad.gates["eoc_e0_omega"] = {7.0, 0.1};
  CHECK_FALSE(run_study(bad, 1).pass);
}

TEST_CASE("level parallelism does not change the report bytes") {
  StudyConfig cfg = parse_config_text(kSmallLaplace);
  cfg.levels = 4;
  const std::string seq = report_to_json(run_study(cfg, 1));
  const std::string par = report_to_json(run_study(cfg, 3));
  CHECK(seq == par);
}

TEST_CASE("emitted files carry full precision and valid headers") {
  const StudyConfig cfg = parse_config_text(kSmallLaplace);
  const StudyReport rep = run_study(cfg, 1);
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "eigenrate_emit_test";
  std::filesystem::remove_all(dir);
  emit_report(rep, cfg, dir.string());

  const std::string json = slurp(dir / "smoke.json");
  CHECK(json == report_to_json(rep));
  CHECK(json.find("\"schema\"") != std::string::npos);
  CHECK(json.find("timing") == std::string::npos);

  const std::string csv = slurp(dir / "smoke.csv");
  CHECK(csv.rfind("h,h1,h2,n_free,mode,lambda,lambda_h", 0) == 0);
  // 17 significant digits: the printed lambda must round-trip bitwise.
  const auto pos = csv.find("9.869604401089358");
  REQUIRE(pos != std::string::npos);
  CHECK(std::strtod(csv.c_str() + pos, nullptr) == rep.records.front().lambda);

  const std::string dat = slurp(dir / "smoke.dat");
  CHECK(dat.rfind("# h h1 h2", 0) == 0);
  CHECK(std::filesystem::exists(dir / "smoke.gp"));
  CHECK(std::filesystem::exists(dir / "smoke_timings.txt"));

  // Headers-only output for an empty record list.
  StudyReport empty;
  StudyConfig ecfg = cfg;
  ecfg.name = "empty";
  emit_report(empty, ecfg, dir.string());
  const std::string ecsv = slurp(dir / "empty.csv");
  CHECK(ecsv == "h,h1,h2,n_free,mode,lambda,lambda_h\n");
  std::filesystem::remove_all(dir);
}

TEST_CASE("approximation study: refining the inactive direction changes nothing") {
  StudyConfig cfg;
  cfg.kind = "approx";
  cfg.family = "q2";
  cfg.name = "approx-smoke";
  cfg.target = "x3";
  cfg.cells0 = 4;
  cfg.ny = 4;
  cfg.levels = 3;
  cfg.gates["eoc_refine"] = {3.0, 0.1};
  cfg.gates["flat_change_max"] = {0.01};
  cfg.gates["rhs_factor_max"] = {5.0};
  const StudyReport rep = run_study(cfg, 1);
  CHECK(rep.pass);
  // Sequence 1 records (y refinement) hold the error fixed to well under 1%.
  const double e0 = rep.records[cfg.levels].values.at("err_l2");
  for (int li = 1; li < cfg.levels; ++li) {
    const double e = rep.records[cfg.levels + li].values.at("err_l2");
    CHECK(std::abs(e - e0) / e0 <= 1e-10);
  }
}

TEST_CASE("reliability study structure") {
  StudyConfig cfg;
  cfg.kind = "reliability";
  cfg.family = "p1";
  cfg.name = "rel-smoke";
  cfg.cells_list = {64, 128, 256};
  cfg.tol_value = 0.01;
  const StudyReport rep = run_study(cfg, 1);
  REQUIRE(rep.has_reliability);
  REQUIRE(rep.rel.jstar.size() == 3);
  for (std::size_t i = 0; i + 1 < rep.rel.jstar.size(); ++i)
    CHECK(rep.rel.jstar[i] <= rep.rel.jstar[i + 1]);
  CHECK(double(rep.rel.jstar[2]) / rep.rel.n_values[2] == doctest::Approx(0.11).epsilon(0.08));
}

TEST_CASE("spectrum study gates") {
  StudyConfig cfg;
  cfg.kind = "spectrum";
  cfg.domain = "interval";
  cfg.name = "spec-smoke";
  cfg.count = 40;
  cfg.gates["exact_match_tol"] = {1e-12};
  const StudyReport rep = run_study(cfg, 1);
  CHECK(rep.pass);

  StudyConfig sq = cfg;
  sq.domain = "square";
  sq.count = 200;
  sq.gates.clear();
  sq.gates["weyl_band"] = {0.85, 1.19, 50, 200};
  CHECK(run_study(sq, 1).pass);
  sq.gates["weyl_band"] = {0.85, 1.15, 50, 200};
  CHECK_FALSE(run_study(sq, 1).pass);  // the exact ratio tops out near 1.186
}

TEST_CASE("beam study converges at fourth order") {
  StudyConfig cfg;
  cfg.kind = "beam";
  cfg.family = "hermite3";
  cfg.name = "beam-smoke";
  cfg.cells0 = 8;
  cfg.levels = 3;
  cfg.norm_pairs = {{0, 2.0}, {1, 2.0}, {2, 2.0}};
  cfg.gates["eoc_lambda"] = {4.0, 0.2};
  const StudyReport rep = run_study(cfg, 1);
  CHECK(rep.pass);
  CHECK(rep.records.front().lambda == doctest::Approx(500.5639).epsilon(1e-6));
}

TEST_CASE("run_study propagates resource-cap violations with context") {
  StudyConfig cfg = parse_config_text(kSmallLaplace);
  cfg.max_free_dofs = 4;
  try {
    run_study(cfg, 1);
    CHECK(false);
  } catch (const std::exception& e) {
    const std::string msg = e.what();
    CHECK(msg.find("level") != std::string::npos);
    CHECK(msg.find("resource cap") != std::string::npos);
  }
}

TEST_CASE("tensor-mesh eigen study on the square") {
  StudyConfig cfg;
  cfg.kind = "laplace-2d";
  cfg.family = "q1";
  cfg.name = "q1-square-smoke";
  cfg.cells0 = 4;
  cfg.levels = 3;
  cfg.gates["eoc_e0_omega"] = {2.0, 0.15};
  cfg.gates["eoc_e1_omega"] = {1.0, 0.15};
  const StudyReport rep = run_study(cfg, 1);
  CHECK(rep.pass);
  for (const auto& rec : rep.records) CHECK(rec.lambda_h >= rec.lambda);
}

TEST_CASE("projection-only families cannot drive eigen studies") {
  StudyConfig cfg;
  cfg.kind = "laplace-2d";
  cfg.family = "intermediate";
  cfg.name = "bad";
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("spectrum table matches a direct lattice enumeration") {
  StudyConfig cfg;
  cfg.kind = "spectrum";
  cfg.domain = "square";
  cfg.name = "square-table";
  cfg.count = 20;
  const StudyReport rep = run_study(cfg, 1);
  REQUIRE(rep.records.size() == 20);

  std::vector<double> brute;
  for (int k = 1; k <= 10; ++k)
    for (int l = 1; l <= 10; ++l) brute.push_back((k * k + l * l) * M_PI * M_PI);
  std::sort(brute.begin(), brute.end());
  for (int j = 0; j < 20; ++j)
    CHECK(rep.records[j].lambda == doctest::Approx(brute[j]).epsilon(1e-15));
}
