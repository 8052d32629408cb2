#include "eigenrate/study.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

namespace eigenrate {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config parsing

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double to_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  require(pos == s.size(), "config: bad number '" + s + "'");
  return v;
}

int to_int(const std::string& s) {
  std::size_t pos = 0;
  const int v = std::stoi(s, &pos);
  require(pos == s.size(), "config: bad integer '" + s + "'");
  return v;
}

void apply_key(StudyConfig& cfg, const std::string& section, const std::string& key,
               const std::string& value) {
  auto bad_key = [&]() -> void {
    require(false, "config: unknown key '" + key + "' in section [" + section + "]");
  };
  if (section == "study") {
    if (key == "kind") cfg.kind = value;
    else if (key == "family") cfg.family = value;
    else if (key == "name") cfg.name = value;
    else if (key == "domain") cfg.domain = value;
    else if (key == "seed") cfg.seed = to_int(value);
    else bad_key();
  } else if (section == "mesh") {
    if (key == "cells0") cfg.cells0 = to_int(value);
    else if (key == "levels") cfg.levels = to_int(value);
    else if (key == "refine") cfg.refine = to_int(value);
    else if (key == "grading") cfg.grading = to_double(value);
    else if (key == "grading_y") cfg.grading_y = to_double(value);
    else if (key == "mesh") cfg.mesh2d = value;
    else if (key == "split") cfg.split = value;
    else if (key == "ny") cfg.ny = to_int(value);
    else if (key == "cells") {
      cfg.cells_list.clear();
      for (const auto& t : split_ws(value)) cfg.cells_list.push_back(to_int(t));
    } else bad_key();
  } else if (section == "eigen") {
    if (key == "modes") {
      cfg.modes.clear();
      for (const auto& t : split_ws(value)) cfg.modes.push_back(to_int(t));
    } else if (key == "count") cfg.count = to_int(value);
    else if (key == "window") cfg.window = to_int(value);
    else bad_key();
  } else if (section == "norms") {
    if (key == "pairs") {
      cfg.norm_pairs.clear();
      for (const auto& t : split_ws(value)) {
        const auto colon = t.find(':');
        require(colon != std::string::npos, "config: norm pair must be j:p");
        const int j = to_int(t.substr(0, colon));
        const std::string ps = t.substr(colon + 1);
        const double p = (ps == "inf") ? NormSpec::INF_P : to_double(ps);
        cfg.norm_pairs.push_back({j, p});
      }
    } else bad_key();
  } else if (section == "limits") {
    if (key == "max_free_dofs") cfg.max_free_dofs = to_int(value);
    else if (key == "method") cfg.method = value;
    else if (key == "lambda_h2_cap") cfg.lambda_h2_cap = to_double(value);
    else bad_key();
  } else if (section == "target") {
    if (key == "function") cfg.target = value;
    else bad_key();
  } else if (section == "tolerance") {
    if (key == "value") cfg.tol_value = to_double(value);
    else if (key == "mode") cfg.tol_mode = value;
    else bad_key();
  } else if (section == "gates") {
    std::vector<double> params;
    for (const auto& t : split_ws(value)) params.push_back(to_double(t));
    cfg.gates[key] = params;
  } else if (section == "output") {
    if (key == "out") cfg.out_dir = value;
    else if (key == "dump_matrices") cfg.dump_matrices = (value == "true" || value == "1");
    else if (key == "dump_mesh") cfg.dump_mesh = (value == "true" || value == "1");
    else bad_key();
  } else {
    require(false, "config: unknown section [" + section + "]");
  }
}

// ---------------------------------------------------------------------------
// Shared study helpers

std::shared_ptr<const ScalarField> make_target(const std::string& name) {
  if (name == "x3") {
    return std::make_shared<PolyField>(Poly::monomial(MultiIndex(3, 0)));
  } else if (name == "x4") {
    return std::make_shared<PolyField>(Poly::monomial(MultiIndex(4, 0)));
  } else if (name == "sin") {
    return std::make_shared<SineMode2D>(1, 1, 2.0);
  }
  require(false, "unknown target function: " + name);
  return nullptr;
}

SolveOptions solve_options(const StudyConfig& cfg) {
  SolveOptions opts;
  if (cfg.method == "dense") opts.method = SolveOptions::Method::Dense;
  else if (cfg.method == "shift-invert") opts.method = SolveOptions::Method::ShiftInvert;
  else require(cfg.method == "auto", "config: unknown solver method " + cfg.method);
  return opts;
}

std::string norm_key(int j, double p, const char* region) {
  std::string key = "e" + std::to_string(j);
  if (p >= NormSpec::INF_P) key += "pinf";
  else if (p != 2.0) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "p%g", p);
    key += buf;
  }
  return key + "_" + region;
}

struct StageTimer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

template <typename Fn>
void run_levels(int n, int threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  const int nthreads = std::min(threads, n);
  for (int t = 0; t < nthreads; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void echo_config(const StudyConfig& cfg, StudyReport& rep) {
  auto& e = rep.config_echo;
  e["kind"] = cfg.kind;
  e["family"] = cfg.family;
  e["name"] = cfg.name;
  if (!cfg.domain.empty()) e["domain"] = cfg.domain;
  e["seed"] = std::to_string(cfg.seed);
  e["cells0"] = std::to_string(cfg.cells0);
  e["levels"] = std::to_string(cfg.levels);
  e["refine"] = std::to_string(cfg.refine);
  e["method"] = cfg.method;
  e["max_free_dofs"] = std::to_string(cfg.max_free_dofs);
  if (cfg.kind == "approx") {
    e["target"] = cfg.target;
    e["ny"] = std::to_string(cfg.ny);
  }
  if (cfg.kind == "reliability") {
    std::string cells;
    for (int c : cfg.cells_list) cells += (cells.empty() ? "" : " ") + std::to_string(c);
    e["cells"] = cells;
    e["tolerance"] = std::to_string(cfg.tol_value);
    e["tolerance_mode"] = cfg.tol_mode;
  }
  std::string modes;
  for (int m : cfg.modes) modes += (modes.empty() ? "" : " ") + std::to_string(m);
  e["modes"] = modes;
}

void eval_band_gate(StudyReport& rep, const std::string& name, double measured, double lo,
                    double hi) {
  GateResult g;
  g.name = name;
  g.measured = measured;
  g.lo = lo;
  g.hi = hi;
  g.pass = measured >= lo && measured <= hi;
  rep.pass = rep.pass && g.pass;
  rep.gates.push_back(g);
}

// ---------------------------------------------------------------------------
// Eigen studies (laplace-1d, laplace-2d, beam)

struct EigenLevel {
  double h = 0.0, h1 = 0.0, h2 = 0.0;
  int n_free = 0;
  std::vector<ErrorRecord> records;  // one per tracked mode
  double seconds = 0.0;
};

Mesh build_level_mesh(const StudyConfig& cfg, int cells) {
  if (cfg.kind == "laplace-1d" || cfg.kind == "beam")
    return interval_mesh(0.0, 1.0, cells, cfg.grading);
  const Mesh rect = rect_mesh(cells, cells, {0.0, 0.0}, {1.0, 1.0}, cfg.grading, cfg.grading_y);
  const ElementFamily& fam = ElementFamily::get(cfg.family);
  std::string mesh2d = cfg.mesh2d;
  if (mesh2d.empty()) mesh2d = fam.supports(CellKind::Triangle) ? "tri" : "quad";
  if (mesh2d == "quad") return rect;
  require(mesh2d == "tri", "config: mesh must be tri or quad");
  return tri_mesh_from_rect(rect, cfg.split == "alternating" ? SplitRule::Alternating
                                                             : SplitRule::FixedDiagonal);
}

std::vector<ExactEigenpair> exact_spectrum(const StudyConfig& cfg, int count) {
  if (cfg.kind == "laplace-1d") return laplace_interval(count);
  if (cfg.kind == "laplace-2d") return laplace_square(count);
  if (cfg.kind == "beam") return beam_clamped(count);
  fail("exact_spectrum: not an eigen study");
}

void run_eigen_study(const StudyConfig& cfg, StudyReport& rep, int threads) {
  const ElementFamily& fam = ElementFamily::get(cfg.family);
  const int m = (cfg.kind == "beam") ? 2 : 1;
  require(m <= fam.m_max(), cfg.family + ": family does not support this operator order");

  const int max_mode = *std::max_element(cfg.modes.begin(), cfg.modes.end());
  const std::vector<ExactEigenpair> exact = exact_spectrum(cfg, max_mode + 2);
  int k_needed = 0;
  for (int i = 0; i < max_mode; ++i) k_needed += exact[i].multiplicity;

  std::vector<EigenLevel> levels(cfg.levels);
  run_levels(cfg.levels, threads, [&](int li) {
    StageTimer timer;
    int cells = cfg.cells0;
    for (int i = 0; i < li; ++i) cells *= cfg.refine;
    try {
      const Mesh mesh = build_level_mesh(cfg, cells);
      const DofMap dm = build_dofmap(mesh, fam, m);
      require(dm.n_free <= cfg.max_free_dofs,
              "level exceeds the free-DOF resource cap (" + std::to_string(dm.n_free) + ")");
      require(k_needed <= dm.n_free, "requested eigenvalue window exceeds the free DOF count");
      const SymmetricPair pair = assemble(mesh, fam, m, dm);
      const std::vector<EigenPair> disc = solve_gevp(pair, k_needed, solve_options(cfg));

      EigenLevel& lvl = levels[li];
      lvl.h = mesh.h();
      lvl.h1 = mesh.elements.front().hx;
      lvl.h2 = mesh.dim == 2 ? mesh.elements.front().hy : 0.0;
      lvl.n_free = dm.n_free;

      for (int mode : cfg.modes) {
        const MatchResult mr = match_eigenpair(disc, exact, mode);
        ErrorRecord rec;
        rec.h = lvl.h;
        rec.h1 = lvl.h1;
        rec.h2 = lvl.h2;
        rec.n_free = dm.n_free;
        rec.mode = mode;
        rec.lambda = mr.lambda_exact;
        rec.lambda_h = mr.discrete_lambdas.front();
        if (fam.conformity() == Conformity::Conforming)
          ensure(rec.lambda_h >= rec.lambda * (1.0 - 1e-9),
                 "conforming eigenvalue fell below the exact one");
        rec.values["lambda_err"] = rec.lambda_h - rec.lambda;
        rec.values["lambda_err_abs"] = std::abs(rec.lambda_h - rec.lambda);
        rec.values["lambda_err_rel"] = (rec.lambda_h - rec.lambda) / rec.lambda;

        const ScalarField& u = *mr.exact->functions.front();
        NormSpec base;
        base.r = fam.r();
        const FeFunction uh = matched_eigenfunction(mr, disc, mesh, fam, dm, u, base);
        for (const auto& [j, p] : cfg.norm_pairs) {
          NormSpec spec;
          spec.j = j;
          spec.p = p;
          spec.r = fam.r();
          spec.region = Region::Omega;
          rec.values[norm_key(j, p, "omega")] = broken_error(u, uh, spec);
          spec.region = Region::InteriorBox;
          const double eg = broken_error(u, uh, spec);
          rec.values[norm_key(j, p, "G")] = eg;
          spec.weight = WeightKind::LocalPower;
          const double wg = broken_error(u, uh, spec);
          rec.values["w" + std::to_string(j) + "_G"] = wg;
          if (p == 2.0) {
            rec.values["ratio" + std::to_string(j) + "_G"] =
                bound_ratio(eg, rec.h, rec.lambda, fam.r(), j, m);
            rec.values["ratio" + std::to_string(j) + "_w"] =
                wg / std::pow(rec.lambda, double(fam.r()) / (2.0 * m));
          }
        }
        lvl.records.push_back(std::move(rec));
      }

      if (cfg.dump_matrices && li == 0 && !cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        std::ofstream fa(cfg.out_dir + "/" + cfg.name + "_A.txt");
        dump_matrix(pair.A, fa);
        std::ofstream fb(cfg.out_dir + "/" + cfg.name + "_B.txt");
        dump_matrix(pair.B, fb);
      }
      if (cfg.dump_mesh && li == 0 && !cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        std::ofstream fm(cfg.out_dir + "/" + cfg.name + "_mesh.json");
        dump_mesh_json(mesh, fm);
      }
    } catch (const std::exception& err) {
      fail("study " + cfg.name + " level " + std::to_string(li) + " (cells " +
           std::to_string(cells) + "): " + err.what());
    }
    levels[li].seconds = timer.elapsed();
  });

  for (int li = 0; li < cfg.levels; ++li) {
    for (auto& rec : levels[li].records) rep.records.push_back(rec);
    rep.timings.push_back({"level" + std::to_string(li), levels[li].seconds});
  }

  // Convergence fits per tracked mode (full window and the last three levels).
  if (cfg.levels >= 3) {
    std::vector<double> hs;
    for (const auto& lvl : levels) hs.push_back(lvl.h);
    for (std::size_t mi = 0; mi < cfg.modes.size(); ++mi) {
      const std::string prefix = cfg.modes.size() > 1
                                     ? "mode" + std::to_string(cfg.modes[mi]) + "_"
                                     : "";
      auto series = [&](const std::string& key) {
        std::vector<double> v;
        for (const auto& lvl : levels) v.push_back(lvl.records[mi].values.at(key));
        return v;
      };
      auto fit_pair = [&](const std::string& key, const std::string& fit_name) {
        const std::vector<double> e = series(key);
        rep.fits[prefix + fit_name] = eoc(e, hs);
        const std::vector<double> e3(e.end() - 3, e.end());
        const std::vector<double> h3(hs.end() - 3, hs.end());
        rep.fits[prefix + fit_name + "_last3"] = eoc(e3, h3);
      };
      for (const auto& [j, p] : cfg.norm_pairs) {
        fit_pair(norm_key(j, p, "omega"), "eoc_" + norm_key(j, p, "omega"));
        fit_pair(norm_key(j, p, "G"), "eoc_" + norm_key(j, p, "G"));
      }
      fit_pair("lambda_err_abs", "eoc_lambda");
    }
  }

  // Eigenvalue scaling across the tracked modes at the finest level.
  if (cfg.modes.size() >= 3) {
    const EigenLevel& fin = levels.back();
    std::vector<double> errs, lambdas;
    for (const auto& rec : fin.records) {
      errs.push_back(std::abs(rec.values.at("lambda_err_rel")));
      lambdas.push_back(rec.lambda);
    }
    rep.fits["lambda_scaling"] = lambda_scaling(errs, lambdas, fin.h, cfg.lambda_h2_cap);
  }

  // Gates.
  for (const auto& [name, params] : cfg.gates) {
    if (name.rfind("eoc_", 0) == 0 && name.size() > 4 && name.substr(name.size() - 4) == "_max") {
      const std::string fit_name = name.substr(0, name.size() - 4) + "_last3";
      require(rep.fits.count(fit_name), "gate " + name + ": fit not computed");
      require(params.size() == 1, "gate " + name + ": expects one parameter");
      eval_band_gate(rep, name, rep.fits.at(fit_name).slope, -1e300, params[0]);
    } else if (name.rfind("eoc_", 0) == 0) {
      require(params.size() == 2, "gate " + name + ": expects expected tol");
      const std::string fit_name = name + "_last3";
      require(rep.fits.count(fit_name), "gate " + name + ": fit not computed");
      eval_band_gate(rep, name, rep.fits.at(fit_name).slope, params[0] - params[1],
                     params[0] + params[1]);
    } else if (name == "lambda_slope") {
      require(params.size() == 2, "gate lambda_slope: expects expected tol");
      require(rep.fits.count("lambda_scaling"), "gate lambda_slope: fit not computed");
      eval_band_gate(rep, name, rep.fits.at("lambda_scaling").slope, params[0] - params[1],
                     params[0] + params[1]);
    } else if (name.rfind("ratio", 0) == 0 && name.size() > 11 &&
               name.substr(name.size() - 11) == "_spread_max") {
      require(params.size() == 1, "gate " + name + ": expects one parameter");
      const std::string key = name.substr(0, name.size() - 11) + "_G";
      double mn = 1e300, mx = 0.0;
      for (std::size_t li = 0; li < levels.size(); ++li) {
        const double v = levels[li].records.front().values.at(key);
        mn = std::min(mn, v);
        mx = std::max(mx, v);
      }
      GateResult g;
      g.name = name;
      g.measured = (mn > 0.0) ? mx / mn : 1e300;
      g.lo = 0.0;
      g.hi = params[0];
      g.pass = mn > 0.0 && g.measured <= params[0];
      rep.pass = rep.pass && g.pass;
      rep.gates.push_back(g);
    } else {
      require(false, "unknown gate for eigen study: " + name);
    }
  }
}

// ---------------------------------------------------------------------------
// Approximation study (anisotropic best-approximation rates)

void run_approx_study(const StudyConfig& cfg, StudyReport& rep, int threads) {
  const ElementFamily& fam = ElementFamily::get(cfg.family);
  require(fam.supports(CellKind::Rectangle), "approx study needs a rectangle family");
  const std::shared_ptr<const ScalarField> target = make_target(cfg.target);
  const MultiIndexSet space = fam.ind_used(CellKind::Rectangle);

  struct Row {
    ErrorRecord rec;
    double seconds = 0.0;
  };
  // Sequence 0 refines x with ny frozen; sequence 1 refines y with cells0 frozen.
  std::vector<Row> rows(2 * cfg.levels);
  run_levels(2 * cfg.levels, threads, [&](int slot) {
    StageTimer timer;
    const int seq = slot / cfg.levels;
    const int li = slot % cfg.levels;
    int mult = 1;
    for (int i = 0; i < li; ++i) mult *= cfg.refine;
    const int nx = (seq == 0) ? cfg.cells0 * mult : cfg.cells0;
    const int ny = (seq == 0) ? cfg.ny : cfg.ny * mult;
    try {
      const Mesh mesh = rect_mesh(nx, ny, {0.0, 0.0}, {1.0, 1.0});
      double err2 = 0.0;
      for (const auto& el : mesh.elements) {
        const LocalPolynomial proj = project_local(mesh, el.id, space, *target);
        const ElementQuadrature eq = oversampled_quadrature(mesh, el.id);
        for (std::size_t q = 0; q < eq.points.size(); ++q) {
          const double d = (*target)(eq.points[q]) - proj.eval(eq.points[q]);
          err2 += eq.weights[q] * d * d;
        }
      }
      const double err = std::sqrt(err2);
      const double rhs = rhs_seminorm(*target, mesh, fam, MultiIndex(0, 0), 2.0);

      Row& row = rows[slot];
      row.rec.h = mesh.h();
      row.rec.h1 = mesh.elements.front().hx;
      row.rec.h2 = mesh.elements.front().hy;
      row.rec.n_free = int(mesh.elements.size());
      row.rec.mode = seq;
      row.rec.values["err_l2"] = err;
      row.rec.values["rhs_bound"] = rhs;
      row.rec.values["err_over_rhs"] = rhs > 0.0 ? err / rhs : 0.0;
    } catch (const std::exception& err) {
      fail("study " + cfg.name + " slot " + std::to_string(slot) + ": " + err.what());
    }
    rows[slot].seconds = timer.elapsed();
  });

  for (int i = 0; i < 2 * cfg.levels; ++i) {
    rep.records.push_back(rows[i].rec);
    rep.timings.push_back({"slot" + std::to_string(i), rows[i].seconds});
  }

  if (cfg.levels >= 3) {
    std::vector<double> errs, h1s;
    for (int li = 0; li < cfg.levels; ++li) {
      errs.push_back(rows[li].rec.values.at("err_l2"));
      h1s.push_back(rows[li].rec.h1);
    }
    rep.fits["eoc_refine"] = eoc(errs, h1s);
  }

  for (const auto& [name, params] : cfg.gates) {
    if (name == "eoc_refine") {
      require(params.size() == 2, "gate eoc_refine: expects expected tol");
      require(rep.fits.count("eoc_refine"), "gate eoc_refine: fit not computed");
      eval_band_gate(rep, name, rep.fits.at("eoc_refine").slope, params[0] - params[1],
                     params[0] + params[1]);
    } else if (name == "flat_change_max") {
      require(params.size() == 1, "gate flat_change_max: expects one parameter");
      const double e0 = rows[cfg.levels].rec.values.at("err_l2");
      double worst = 0.0;
      for (int li = 1; li < cfg.levels; ++li) {
        const double e = rows[cfg.levels + li].rec.values.at("err_l2");
        worst = std::max(worst, std::abs(e - e0) / e0);
      }
      eval_band_gate(rep, name, worst, 0.0, params[0]);
    } else if (name == "rhs_factor_max") {
      require(params.size() == 1, "gate rhs_factor_max: expects one parameter");
      double worst = 0.0;
      for (const auto& row : rows) worst = std::max(worst, row.rec.values.at("err_over_rhs"));
      eval_band_gate(rep, name, worst, 0.0, params[0]);
    } else {
      require(false, "unknown gate for approx study: " + name);
    }
  }
}

// ---------------------------------------------------------------------------
// Reliability study

void run_reliability_study(const StudyConfig& cfg, StudyReport& rep, int threads) {
  const ElementFamily& fam = ElementFamily::get(cfg.family);
  require(fam.supports(CellKind::Interval), "reliability study runs on interval meshes");
  require(cfg.cells_list.size() >= 3, "reliability study needs >= 3 levels in [mesh] cells");
  const bool relative = cfg.tol_mode == "relative";
  require(relative || cfg.tol_mode == "absolute", "tolerance mode must be relative or absolute");

  const int nlev = int(cfg.cells_list.size());
  std::vector<LevelSpectrum> levels(nlev);
  std::vector<double> secs(nlev, 0.0);
  run_levels(nlev, threads, [&](int li) {
    StageTimer timer;
    try {
      const Mesh mesh = interval_mesh(0.0, 1.0, cfg.cells_list[li]);
      const DofMap dm = build_dofmap(mesh, fam, 1);
      require(dm.n_free <= cfg.max_free_dofs, "level exceeds the free-DOF resource cap");
      const SymmetricPair pair = assemble(mesh, fam, 1, dm);
      const int window = cfg.window > 0
                             ? std::min(cfg.window, dm.n_free)
                             : std::min(dm.n_free, std::max(40, int(0.16 * dm.n_free) + 8));
      const std::vector<EigenPair> disc = solve_gevp(pair, window, solve_options(cfg));
      LevelSpectrum& lvl = levels[li];
      lvl.n_free = dm.n_free;
      lvl.h = mesh.h();
      for (const auto& ep : disc) lvl.lambdas.push_back(ep.lambda);
    } catch (const std::exception& err) {
      fail("study " + cfg.name + " level " + std::to_string(li) + ": " + err.what());
    }
    secs[li] = timer.elapsed();
  });

  int max_window = 0;
  for (const auto& lvl : levels) max_window = std::max(max_window, int(lvl.lambdas.size()));
  const std::vector<double> exact = flatten_spectrum(laplace_interval(max_window), max_window);

  rep.rel = reliability(levels, exact, cfg.tol_value, relative);
  rep.has_reliability = true;
  for (int li = 0; li < nlev; ++li) {
    ErrorRecord rec;
    rec.h = levels[li].h;
    rec.h1 = levels[li].h;
    rec.n_free = levels[li].n_free;
    rec.mode = 1;
    rec.values["jstar"] = rep.rel.jstar[li];
    rec.values["jstar_over_n"] = double(rep.rel.jstar[li]) / levels[li].n_free;
    rec.values["window"] = double(levels[li].lambdas.size());
    rep.records.push_back(rec);
    rep.timings.push_back({"level" + std::to_string(li), secs[li]});
  }

  for (const auto& [name, params] : cfg.gates) {
    if (name == "jstar_over_n") {
      require(params.size() == 2, "gate jstar_over_n: expects expected tol");
      for (std::size_t li = 0; li < levels.size(); ++li) {
        const double v = double(rep.rel.jstar[li]) / levels[li].n_free;
        eval_band_gate(rep, name + "_l" + std::to_string(li), v, params[0] - params[1],
                       params[0] + params[1]);
      }
    } else if (name == "exponent") {
      require(params.size() == 2, "gate exponent: expects expected tol");
      eval_band_gate(rep, name, rep.rel.exponent, params[0] - params[1], params[0] + params[1]);
    } else {
      require(false, "unknown gate for reliability study: " + name);
    }
  }
}

// ---------------------------------------------------------------------------
// Spectrum study (closed-form tables and asymptotic estimates)

void run_spectrum_study(const StudyConfig& cfg, StudyReport& rep) {
  const std::string domain = cfg.domain.empty() ? "square" : cfg.domain;
  std::vector<double> flat;
  const int n = (domain == "square") ? 2 : 1;
  if (domain == "square") {
    flat = flatten_spectrum(laplace_square(cfg.count), cfg.count);
  } else if (domain == "interval") {
    flat = flatten_spectrum(laplace_interval(cfg.count), cfg.count);
  } else if (domain == "beam") {
    flat = flatten_spectrum(beam_clamped(cfg.count), cfg.count);
  } else {
    require(false, "spectrum study: unknown domain " + domain);
  }

  for (int j = 1; j <= cfg.count; ++j) {
    ErrorRecord rec;
    rec.mode = j;
    rec.lambda = flat[j - 1];
    const double est =
        (domain == "beam") ? pleijel_estimate(j, n, 1.0) : weyl_estimate(j, n, 1.0);
    rec.values["estimate"] = est;
    rec.values["ratio"] = flat[j - 1] / est;
    rep.records.push_back(rec);
  }

  for (const auto& [name, params] : cfg.gates) {
    if (name == "weyl_band" || name == "pleijel_band") {
      require(params.size() == 4, "gate " + name + ": expects lo hi jlo jhi");
      const int jlo = int(params[2]), jhi = int(params[3]);
      require(jhi <= cfg.count, "gate " + name + ": window beyond the table");
      double worst = 1.0;
      for (int j = jlo; j <= jhi; ++j) {
        const double ratio = rep.records[j - 1].values.at("ratio");
        if (std::abs(ratio - 1.0) > std::abs(worst - 1.0)) worst = ratio;
      }
      eval_band_gate(rep, name, worst, params[0], params[1]);
    } else if (name == "exact_match_tol") {
      require(params.size() == 1, "gate exact_match_tol: expects one parameter");
      double worst = 0.0;
      for (const auto& rec : rep.records)
        worst = std::max(worst, std::abs(rec.values.at("ratio") - 1.0));
      eval_band_gate(rep, name, worst, 0.0, params[0]);
    } else if (name == "pleijel_ratio_at") {
      // params: j tol; the table ratio at index j must equal ((j+1/2)/j)^4.
      require(params.size() == 2, "gate pleijel_ratio_at: expects j tol");
      const int j = int(params[0]);
      require(j <= cfg.count, "gate pleijel_ratio_at: index beyond the table");
      const double expected = std::pow((j + 0.5) / j, 4);
      const double ratio = rep.records[j - 1].values.at("ratio");
      eval_band_gate(rep, name, std::abs(ratio - expected), 0.0, params[1]);
    } else {
      require(false, "unknown gate for spectrum study: " + name);
    }
  }
}

// ---------------------------------------------------------------------------
// Serialization

json fit_to_json(const RateFit& fit) {
  json j;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["residual"] = fit.residual;
  j["points"] = fit.points;
  j["pairwise"] = fit.pairwise;
  return j;
}

RateFit fit_from_json(const json& j) {
  RateFit fit;
  fit.slope = j.at("slope").get<double>();
  fit.intercept = j.at("intercept").get<double>();
  fit.residual = j.at("residual").get<double>();
  fit.points = j.at("points").get<int>();
  fit.pairwise = j.at("pairwise").get<std::vector<double>>();
  return fit;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    ensure(os.good(), "emit: cannot open " + tmp.string());
    os << content;
    ensure(os.good(), "emit: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

void StudyConfig::validate() const {
  static const std::set<std::string> kinds{"laplace-1d", "laplace-2d", "beam",
                                           "approx",     "reliability", "spectrum"};
  require(kinds.count(kind), "config: unknown study kind '" + kind + "'");
  require(cells0 >= 1 && levels >= 1 && refine >= 2, "config: bad mesh sequence");
  require(grading > 0.0 && grading_y > 0.0, "config: bad grading");
  require(max_free_dofs >= 1, "config: bad resource cap");
  if (kind != "spectrum" && kind != "approx" && kind != "reliability") {
    require(!modes.empty(), "config: empty mode list");
    for (int m : modes) require(m >= 1, "config: modes are 1-based");
    const ElementFamily& fam = ElementFamily::get(family);
    require(fam.assemblable(), "config: family " + family + " cannot be assembled");
    if (kind == "beam") require(fam.m_max() >= 2, "config: beam study needs a C1 family");
  }
  if (kind == "approx")
    require(ElementFamily::get(family).supports(CellKind::Rectangle),
            "config: approx study needs a rectangle family");
  if (kind == "reliability") require(!cells_list.empty(), "config: reliability needs [mesh] cells");
  for (const auto& [j, p] : norm_pairs) {
    require(j >= 0, "config: negative derivative order");
    require(p >= 1.0, "config: p must be >= 1");
  }
}

StudyConfig parse_config_text(const std::string& text) {
  StudyConfig cfg;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      require(line.back() == ']', "config line " + std::to_string(lineno) + ": bad section");
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find('=');
    require(eq != std::string::npos, "config line " + std::to_string(lineno) + ": expected key = value");
    require(!section.empty(), "config line " + std::to_string(lineno) + ": key outside a section");
    apply_key(cfg, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  if (cfg.name.empty()) cfg.name = cfg.kind + "-" + cfg.family;
  cfg.validate();
  return cfg;
}

StudyConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  require(is.good(), "cannot open config file: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

int threads_from_env() {
  const char* env = std::getenv("EIGENRATE_THREADS");
  if (!env) return 0;
  const int v = std::atoi(env);
  return v > 0 ? v : 0;
}

StudyReport run_study(const StudyConfig& cfg, int threads) {
  cfg.validate();
  if (threads <= 0) threads = threads_from_env();
  StudyReport rep;
  StageTimer total;
  echo_config(cfg, rep);
  if (cfg.kind == "approx") {
    run_approx_study(cfg, rep, threads);
  } else if (cfg.kind == "reliability") {
    run_reliability_study(cfg, rep, threads);
  } else if (cfg.kind == "spectrum") {
    run_spectrum_study(cfg, rep);
  } else {
    run_eigen_study(cfg, rep, threads);
  }
  rep.timings.push_back({"total", total.elapsed()});
  return rep;
}

std::string report_to_json(const StudyReport& rep) {
  json j;
  j["schema"] = rep.schema;
  j["config"] = rep.config_echo;
  json recs = json::array();
  for (const auto& r : rep.records) {
    json jr;
    jr["h"] = r.h;
    jr["h1"] = r.h1;
    jr["h2"] = r.h2;
    jr["n_free"] = r.n_free;
    jr["mode"] = r.mode;
    jr["lambda"] = r.lambda;
    jr["lambda_h"] = r.lambda_h;
    jr["values"] = r.values;
    recs.push_back(jr);
  }
  j["records"] = recs;
  json fits;
  for (const auto& [name, fit] : rep.fits) fits[name] = fit_to_json(fit);
  j["fits"] = fits;
  if (rep.has_reliability) {
    json rel;
    rel["tolerance"] = rep.rel.tolerance;
    rel["relative"] = rep.rel.relative;
    rel["n_values"] = rep.rel.n_values;
    rel["jstar"] = rep.rel.jstar;
    rel["exponent"] = rep.rel.exponent;
    rel["theta_equiv"] = rep.rel.theta_equiv;
    rel["fit_points"] = rep.rel.fit_points;
    j["reliability"] = rel;
  }
  json gates = json::array();
  for (const auto& g : rep.gates) {
    json jg;
    jg["name"] = g.name;
    jg["measured"] = g.measured;
    jg["lo"] = g.lo;
    jg["hi"] = g.hi;
    jg["pass"] = g.pass;
    gates.push_back(jg);
  }
  j["gates"] = gates;
  j["pass"] = rep.pass;
  return j.dump(2) + "\n";
}

StudyReport report_from_json(const std::string& text) {
  const json j = json::parse(text);
  StudyReport rep;
  rep.schema = j.at("schema").get<std::string>();
  rep.config_echo = j.at("config").get<std::map<std::string, std::string>>();
  for (const auto& jr : j.at("records")) {
    ErrorRecord r;
    r.h = jr.at("h").get<double>();
    r.h1 = jr.at("h1").get<double>();
    r.h2 = jr.at("h2").get<double>();
    r.n_free = jr.at("n_free").get<int>();
    r.mode = jr.at("mode").get<int>();
    r.lambda = jr.at("lambda").get<double>();
    r.lambda_h = jr.at("lambda_h").get<double>();
    r.values = jr.at("values").get<std::map<std::string, double>>();
    rep.records.push_back(std::move(r));
  }
  for (const auto& [name, jf] : j.at("fits").items()) rep.fits[name] = fit_from_json(jf);
  if (j.count("reliability")) {
    rep.has_reliability = true;
    const json& rel = j.at("reliability");
    rep.rel.tolerance = rel.at("tolerance").get<double>();
    rep.rel.relative = rel.at("relative").get<bool>();
    rep.rel.n_values = rel.at("n_values").get<std::vector<int>>();
    rep.rel.jstar = rel.at("jstar").get<std::vector<int>>();
    rep.rel.exponent = rel.at("exponent").get<double>();
    rep.rel.theta_equiv = rel.at("theta_equiv").get<double>();
    rep.rel.fit_points = rel.at("fit_points").get<int>();
  }
  for (const auto& jg : j.at("gates")) {
    GateResult g;
    g.name = jg.at("name").get<std::string>();
    g.measured = jg.at("measured").get<double>();
    g.lo = jg.at("lo").get<double>();
    g.hi = jg.at("hi").get<double>();
    g.pass = jg.at("pass").get<bool>();
    rep.gates.push_back(std::move(g));
  }
  rep.pass = j.at("pass").get<bool>();
  return rep;
}

void emit_report(const StudyReport& rep, const StudyConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string base = (fs::path(out_dir) / cfg.name).string();

  atomic_write(base + ".json", report_to_json(rep));

  // Column union over all records, sorted for a stable layout.
  std::set<std::string> value_keys;
  for (const auto& r : rep.records)
    for (const auto& [k, v] : r.values) value_keys.insert(k);

  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };

  std::string csv = "h,h1,h2,n_free,mode,lambda,lambda_h";
  for (const auto& k : value_keys) csv += "," + k;
  csv += "\n";
  std::string dat = "# h h1 h2 n_free mode lambda lambda_h";
  for (const auto& k : value_keys) dat += " " + k;
  dat += "\n";
  for (const auto& r : rep.records) {
    std::string row = num(r.h) + "," + num(r.h1) + "," + num(r.h2) + "," +
                      std::to_string(r.n_free) + "," + std::to_string(r.mode) + "," +
                      num(r.lambda) + "," + num(r.lambda_h);
    std::string drow = num(r.h) + " " + num(r.h1) + " " + num(r.h2) + " " +
                       std::to_string(r.n_free) + " " + std::to_string(r.mode) + " " +
                       num(r.lambda) + " " + num(r.lambda_h);
    for (const auto& k : value_keys) {
      const auto it = r.values.find(k);
      const std::string cell = (it == r.values.end()) ? "nan" : num(it->second);
      row += "," + cell;
      drow += " " + cell;
    }
    csv += row + "\n";
    dat += drow + "\n";
  }
  atomic_write(base + ".csv", csv);
  atomic_write(base + ".dat", dat);

  std::string gp = "set logscale xy\nset xlabel 'h'\nset ylabel 'error'\nset key left top\n";
  gp += "plot";
  int col = 8;
  bool first = true;
  for (const auto& k : value_keys) {
    gp += std::string(first ? " " : ", ") + "'" + cfg.name + ".dat' using 1:" +
          std::to_string(col) + " with linespoints title '" + k + "'";
    first = false;
    ++col;
  }
  gp += "\n";
  atomic_write(base + ".gp", gp);

  std::string tim;
  for (const auto& [stage, sec] : rep.timings) tim += stage + " " + num(sec) + "\n";
  atomic_write(base + "_timings.txt", tim);
}

}  // namespace eigenrate
