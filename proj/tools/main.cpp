#include "eigenrate/study.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

using namespace eigenrate;

namespace {

int run(const std::string& kind, const std::string& config_path, const std::string& out_dir,
        int levels_override, const std::string& family_override, bool sequential) {
  StudyConfig cfg;
  if (!config_path.empty()) {
    cfg = parse_config_file(config_path);
    if (!kind.empty() && cfg.kind != kind) {
      std::cerr << "error: config kind '" << cfg.kind << "' does not match subcommand '" << kind
                << "'\n";
      return 2;
    }
  } else {
    cfg.kind = kind;
  }
  if (levels_override > 0) cfg.levels = levels_override;
  if (!family_override.empty()) cfg.family = family_override;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (cfg.name.empty()) cfg.name = cfg.kind + "-" + cfg.family;
  cfg.validate();

  const int threads = sequential ? 1 : threads_from_env();
  const StudyReport rep = run_study(cfg, threads);
  if (!cfg.out_dir.empty()) emit_report(rep, cfg, cfg.out_dir);

  std::printf("study %s: %zu records, %zu fits\n", cfg.name.c_str(), rep.records.size(),
              rep.fits.size());
  for (const auto& [name, fit] : rep.fits)
    std::printf("  fit %-28s slope %.4f (residual %.2e, %d pts)\n", name.c_str(), fit.slope,
                fit.residual, fit.points);
  if (rep.has_reliability) {
    for (std::size_t i = 0; i < rep.rel.jstar.size(); ++i)
      std::printf("  N %6d  j* %5d  j*/N %.4f\n", rep.rel.n_values[i], rep.rel.jstar[i],
                  double(rep.rel.jstar[i]) / rep.rel.n_values[i]);
    std::printf("  j*(N) exponent %.4f\n", rep.rel.exponent);
  }
  for (const auto& g : rep.gates)
    std::printf("  gate %-28s measured %.6g in [%.6g, %.6g] : %s\n", g.name.c_str(), g.measured,
                g.lo, g.hi, g.pass ? "pass" : "FAIL");
  std::printf("result: %s\n", rep.pass ? "pass" : "FAIL");
  return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eigenrate: finite element eigenvalue convergence-rate studies"};
  app.require_subcommand(1);

  std::string config_path, out_dir, family;
  int levels = 0;
  bool sequential = false;

  const std::vector<std::string> kinds = {"laplace-1d", "laplace-2d", "beam",
                                          "approx",     "reliability", "spectrum"};
  for (const auto& kind : kinds) {
    CLI::App* sub = app.add_subcommand(kind, "run a " + kind + " study");
    sub->add_option("--config", config_path, "study config file");
    sub->add_option("--out", out_dir, "output directory for reports");
    sub->add_option("--levels", levels, "override the number of mesh levels");
    sub->add_option("--family", family, "override the element family");
    sub->add_flag("--seq", sequential, "force the sequential reference mode");
  }

  CLI::App* mesh_cmd = app.add_subcommand("mesh", "dump a mesh as JSON");
  int mesh_cells = 8, mesh_dim = 1;
  bool mesh_tri = false;
  std::string mesh_out;
  mesh_cmd->add_option("--cells", mesh_cells, "cells per direction");
  mesh_cmd->add_option("--dim", mesh_dim, "1 or 2");
  mesh_cmd->add_flag("--tri", mesh_tri, "split rectangles into triangles");
  mesh_cmd->add_option("--out", mesh_out, "output file (default stdout)")->required(false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (mesh_cmd->parsed()) {
      Mesh mesh = (mesh_dim == 1)
                      ? interval_mesh(0.0, 1.0, mesh_cells)
                      : rect_mesh(mesh_cells, mesh_cells, {0.0, 0.0}, {1.0, 1.0});
      if (mesh_dim == 2 && mesh_tri) mesh = tri_mesh_from_rect(mesh);
      if (mesh_out.empty()) {
        dump_mesh_json(mesh, std::cout);
      } else {
        std::ofstream os(mesh_out);
        dump_mesh_json(mesh, os);
      }
      return 0;
    }
    for (const auto& kind : kinds)
      if (app.get_subcommand(kind)->parsed())
        return run(kind, config_path, out_dir, levels, family, sequential);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
