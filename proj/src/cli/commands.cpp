#include "cli/commands.hpp"

#include "hobipb/analytic_oracle.hpp"
#include "hobipb/bem_solver.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace hobipb::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct LoadedProblem {
  FlatMesh mesh;
  ChargeSystem charges;
  std::string source;
  std::optional<double> sphere_radius;
};

ChargeSystem parse_charge_flags(const std::vector<std::string>& entries) {
  ChargeSystem cs;
  for (const auto& e : entries) {
    std::vector<double> v;
    std::stringstream ss(e);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw UsageError("--charge expects x,y,z,q; got '" + e + "'");
      }
    }
    if (v.size() != 4) throw UsageError("--charge expects x,y,z,q; got '" + e + "'");
    cs.positions.emplace_back(v[0], v[1], v[2]);
    cs.charges.push_back(v[3]);
  }
  return cs;
}

std::pair<int, double> sphere_spec(const std::vector<double>& s) {
  if (s.size() != 2 || s[0] != std::floor(s[0]) || s[0] < 0 || s[0] > 7 || !(s[1] > 0))
    throw UsageError("--sphere expects level,radius with integer level in [0, 7] and radius > 0");
  return {static_cast<int>(s[0]), s[1]};
}

std::string sphere_source(int level, double radius) {
  return "icosphere:level=" + std::to_string(level) + ",radius=" + format_double(radius);
}

ChargeSystem load_charges(const ProblemOptions& p) {
  ChargeSystem cs;
  if (!p.charges_file.empty()) cs = parse_charges(read_text_file(p.charges_file));
  const ChargeSystem extra = parse_charge_flags(p.charges);
  cs.positions.insert(cs.positions.end(), extra.positions.begin(), extra.positions.end());
  cs.charges.insert(cs.charges.end(), extra.charges.begin(), extra.charges.end());
  return cs;
}

LoadedProblem load(const ProblemOptions& p) {
  LoadedProblem lp;
  const bool has_msms = !p.vert.empty() || !p.face.empty();
  if (has_msms == !p.sphere.empty()) throw UsageError("give exactly one mesh source: --vert/--face or --sphere");
  if (has_msms) {
    if (p.vert.empty() || p.face.empty()) throw UsageError("--vert and --face must be given together");
    lp.mesh = parse_msms(read_text_file(p.vert), read_text_file(p.face));
    lp.source = "msms:" + p.vert;
  } else {
    const auto [level, radius] = sphere_spec(p.sphere);
    lp.mesh = icosahedral_sphere(level, radius);
    lp.source = sphere_source(level, radius);
    lp.sphere_radius = radius;
  }
  lp.charges = load_charges(p);
  return lp;
}

SolverConfig solver_config(const ProblemOptions& p, Scheme scheme, int workers) {
  SolverConfig c;
  c.tol = p.tol;
  c.restart = p.restart;
  c.scheme = scheme;
  c.singular_points = p.singular_points;
  c.workers = workers;
  return c;
}

PhysicalParams physical(const ProblemOptions& p) {
  PhysicalParams pp{p.eps1, p.eps2, p.kappa};
  pp.validate();
  return pp;
}

// Surface-potential error and exact energy against the Kirkwood series, when
// the mesh is an origin-centered sphere enclosing every charge.
void apply_oracle(const LoadedProblem& lp, const DiscretizedProblem& problem, const SurfaceSolution& sol,
                  RunReport& r) {
  if (!lp.sphere_radius || lp.charges.empty()) return;
  const SphereProblem sp{*lp.sphere_radius, problem.params(), lp.charges};
  try {
    sp.validate();
  } catch (const DomainError&) {
    return;
  }
  const KirkwoodSeries series(sp, KirkwoodSeries::terms_for(sp, 1e-12, 4000));
  std::vector<double> exact(problem.num_targets());
  for (std::size_t i = 0; i < exact.size(); ++i) exact[i] = series.potential(problem.target_positions()[i]);
  r.exact_energy = series.energy();
  r.phi_error = surface_potential_error(sol.phi, exact);
}

RunReport run_one(const LoadedProblem& lp, const ProblemOptions& p, Scheme scheme, int workers,
                  SurfaceSolution* keep = nullptr) {
  RunReport r;
  r.mesh_source = lp.source;
  r.num_vertices = lp.mesh.num_vertices();
  r.num_faces = lp.mesh.num_faces();
  r.area = lp.mesh.total_area();
  r.eps1 = p.eps1;
  r.eps2 = p.eps2;
  r.kappa = p.kappa;
  r.num_charges = lp.charges.size();
  r.scheme = std::string(scheme_name(scheme));
  r.workers = resolve_workers(workers);

  auto t0 = Clock::now();
  const DiscretizedProblem problem = discretize(lp.mesh, physical(p), lp.charges, solver_config(p, scheme, r.workers));
  r.time_discretize = seconds_since(t0);
  r.regular_rule = problem.regular_rule().name;
  r.regular_rule_degree = problem.regular_rule().exactness_degree;
  r.singular_points = p.singular_points;

  t0 = Clock::now();
  SurfaceSolution sol = solve(problem);
  r.time_solve = seconds_since(t0);
  r.iterations = sol.iterations;
  r.residual = sol.residual;

  t0 = Clock::now();
  r.energy = solvation_energy(problem, sol);
  r.time_energy = seconds_since(t0);

  const std::size_t n = problem.num_unknowns();
  r.memory_lower_bound_bytes =
      problem.cache_bytes() + (static_cast<std::size_t>(p.restart) + 4) * n * sizeof(double);
  if (p.deterministic) r.time_discretize = r.time_solve = r.time_energy = 0.0;
  apply_oracle(lp, problem, sol, r);
  if (keep) *keep = std::move(sol);
  return r;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  f << text;
  if (!f) throw Error("failed writing '" + path + "'");
}

std::string summary(const RunReport& r) {
  std::ostringstream s;
  s << r.scheme << ": N_v=" << r.num_vertices << " N_f=" << r.num_faces << " E_sol=" << format_double(r.energy)
    << " kcal/mol iterations=" << r.iterations << " residual=" << format_double(r.residual);
  if (r.phi_error) s << " e_phi=" << format_double(*r.phi_error);
  if (r.order) s << " order=" << format_double(*r.order);
  return s.str();
}

}  // namespace

RunReport cmd_solve(const SolveOptions& opts) {
  const LoadedProblem lp = load(opts.problem);
  return run_one(lp, opts.problem, parse_scheme(opts.scheme), opts.problem.workers);
}

ConvergenceResult cmd_convergence(const ConvergenceOptions& opts) {
  if (opts.levels.empty()) throw UsageError("--levels must name at least one level");
  std::vector<int> levels = opts.levels;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<Scheme> schemes;
  for (const auto& s : opts.schemes) schemes.push_back(parse_scheme(s));

  LoadedProblem lp;
  lp.charges = load_charges(opts.problem);
  lp.sphere_radius = opts.radius;
  ConvergenceResult res;
  for (Scheme scheme : schemes) {
    const RunReport* prev = nullptr;
    for (int level : levels) {
      sphere_spec({static_cast<double>(level), opts.radius});
      lp.mesh = icosahedral_sphere(level, opts.radius);
      lp.source = sphere_source(level, opts.radius);
      RunReport r = run_one(lp, opts.problem, scheme, opts.problem.workers);
      // Observed order against the next coarser level, density = faces / area.
      if (prev && prev->phi_error && r.phi_error && *prev->phi_error > 0 && *r.phi_error > 0)
        r.order = convergence_order(prev->num_faces / prev->area, r.num_faces / r.area, *prev->phi_error,
                                    *r.phi_error);
      res.runs.push_back(std::move(r));
      prev = &res.runs.back();
    }
  }
  const auto coarsest = [&](const char* name) -> const RunReport* {
    for (const auto& r : res.runs)
      if (r.scheme == name && r.mesh_source == sphere_source(levels.front(), opts.radius)) return &r;
    return nullptr;
  };
  const RunReport* h = coarsest("hobi");
  const RunReport* l = coarsest("lobi");
  if (h && l && h->phi_error && l->phi_error) res.lobi_better_at_coarsest = *l->phi_error < *h->phi_error;
  return res;
}

std::vector<ScalingRow> cmd_scaling(const ScalingOptions& opts) {
  if (opts.workers.empty()) throw UsageError("--workers-list must name at least one worker count");
  for (int w : opts.workers)
    if (w < 1) throw UsageError("worker counts must be at least 1");
  const LoadedProblem lp = load(opts.problem);
  const Scheme scheme = parse_scheme(opts.scheme);
  std::vector<ScalingRow> rows;
  std::vector<double> first;
  for (int w : opts.workers) {
    SurfaceSolution sol;
    const RunReport r = run_one(lp, opts.problem, scheme, w, &sol);
    ScalingRow row;
    row.workers = w;
    row.wall_time = r.time_solve;
    row.iterations = r.iterations;
    const auto u = sol.packed();
    if (first.empty()) first = u;
    for (std::size_t i = 0; i < u.size(); ++i) row.max_abs_diff = std::max(row.max_abs_diff, std::abs(u[i] - first[i]));
    rows.push_back(row);
  }
  // Efficiency relative to the first entry: T_ref p_ref / (p T_p).
  const double ref = rows.front().wall_time * rows.front().workers;
  for (auto& row : rows) {
    if (row.wall_time > 0.0) {
      row.speedup = rows.front().wall_time / row.wall_time;
      row.efficiency = ref / (row.workers * row.wall_time);
    } else {
      row.speedup = row.efficiency = row.workers == rows.front().workers ? 1.0 : 0.0;
    }
  }
  return rows;
}

std::string render_convergence(const ConvergenceResult& result, Format format) {
  if (format == Format::csv) return render(result.runs, format);
  nlohmann::ordered_json j;
  j["runs"] = nlohmann::ordered_json::array();
  for (const auto& r : result.runs) j["runs"].push_back(r.to_json());
  j["lobi_better_at_coarsest"] =
      result.lobi_better_at_coarsest ? nlohmann::ordered_json(*result.lobi_better_at_coarsest) : nlohmann::ordered_json();
  return j.dump(2) + "\n";
}

std::string render_scaling(const std::vector<ScalingRow>& rows, Format format) {
  if (format == Format::json) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows)
      arr.push_back({{"workers", r.workers},
                     {"wall_time_s", r.wall_time},
                     {"speedup", r.speedup},
                     {"efficiency", r.efficiency},
                     {"max_abs_diff", r.max_abs_diff},
                     {"iterations", r.iterations}});
    return arr.dump(2) + "\n";
  }
  std::string s = "workers,wall_time_s,speedup,efficiency,max_abs_diff,iterations\n";
  for (const auto& r : rows)
    s += std::to_string(r.workers) + "," + format_double(r.wall_time) + "," + format_double(r.speedup) + "," +
         format_double(r.efficiency) + "," + format_double(r.max_abs_diff) + "," + std::to_string(r.iterations) + "\n";
  return s;
}

namespace {

void add_physics(CLI::App* c, ProblemOptions& p) {
  c->add_option("--charges", p.charges_file, "charge file: x y z q [radius] per line")->check(CLI::ExistingFile);
  c->add_option("--charge", p.charges, "extra charge x,y,z,q (repeatable)");
  c->add_option("--eps1", p.eps1, "solute dielectric constant")->capture_default_str();
  c->add_option("--eps2", p.eps2, "solvent dielectric constant")->capture_default_str();
  c->add_option("--kappa", p.kappa, "Debye-Hueckel parameter, 1/Angstrom")->capture_default_str();
  c->add_option("--tol", p.tol, "GMRES relative residual tolerance")->capture_default_str();
  c->add_option("--restart", p.restart, "GMRES restart length")->capture_default_str();
  c->add_option("--singular-points", p.singular_points, "Duffy rule points per direction")->capture_default_str();
  c->add_flag("--deterministic", p.deterministic, "zero all timings for byte-stable reports");
}

void add_mesh(CLI::App* c, ProblemOptions& p) {
  auto* vert = c->add_option("--vert", p.vert, "MSMS .vert file")->check(CLI::ExistingFile);
  auto* face = c->add_option("--face", p.face, "MSMS .face file")->check(CLI::ExistingFile);
  vert->needs(face);
  face->needs(vert);
  auto* sphere = c->add_option("--sphere", p.sphere, "icosphere level,radius")->delimiter(',')->expected(2);
  sphere->excludes(vert);
  sphere->excludes(face);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Boundary-element solver for the linearized Poisson-Boltzmann equation"};
  app.require_subcommand(1);

  SolveOptions so;
  auto* solve_cmd = app.add_subcommand("solve", "solve one problem and write a report");
  add_mesh(solve_cmd, so.problem);
  add_physics(solve_cmd, so.problem);
  solve_cmd->add_option("--scheme", so.scheme, "hobi or lobi")->check(CLI::IsMember({"hobi", "lobi"}))->capture_default_str();
  solve_cmd->add_option("--workers", so.problem.workers, "worker threads (0: all cores)")->capture_default_str();
  solve_cmd->add_option("--out", so.out, "report path (default: standard output)");
  solve_cmd->add_option("--format", so.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  ConvergenceOptions co;
  auto* conv_cmd = app.add_subcommand("convergence", "sphere refinement sweep against the Kirkwood series");
  add_physics(conv_cmd, co.problem);
  conv_cmd->add_option("--levels", co.levels, "icosphere levels")->delimiter(',')->capture_default_str();
  conv_cmd->add_option("--radius", co.radius, "sphere radius")->check(CLI::PositiveNumber)->capture_default_str();
  conv_cmd->add_option("--schemes", co.schemes, "hobi, lobi or both")
      ->delimiter(',')
      ->check(CLI::IsMember({"hobi", "lobi"}))
      ->capture_default_str();
  conv_cmd->add_option("--workers", co.problem.workers, "worker threads (0: all cores)")->capture_default_str();
  conv_cmd->add_option("--out", co.out, "table path (default: standard output)");
  conv_cmd->add_option("--format", co.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  ScalingOptions sc;
  auto* scale_cmd = app.add_subcommand("scaling", "wall time and determinism across worker counts");
  add_mesh(scale_cmd, sc.problem);
  add_physics(scale_cmd, sc.problem);
  scale_cmd->add_option("--scheme", sc.scheme, "hobi or lobi")->check(CLI::IsMember({"hobi", "lobi"}))->capture_default_str();
  scale_cmd->add_option("--workers-list", sc.workers, "worker counts")->delimiter(',')->capture_default_str();
  scale_cmd->add_option("--out", sc.out, "table path (default: standard output)");
  scale_cmd->add_option("--format", sc.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*solve_cmd) {
      const RunReport r = cmd_solve(so);
      emit(render({r}, parse_format(so.format)), so.out, out);
      if (!so.out.empty()) out << summary(r) << "\n";
    } else if (*conv_cmd) {
      const ConvergenceResult res = cmd_convergence(co);
      emit(render_convergence(res, parse_format(co.format)), co.out, out);
      if (!co.out.empty()) {
        for (const auto& r : res.runs) out << r.mesh_source << " " << summary(r) << "\n";
        if (res.lobi_better_at_coarsest)
          out << "coarsest level: lobi " << (*res.lobi_better_at_coarsest ? "beats" : "does not beat") << " hobi\n";
      }
    } else if (*scale_cmd) {
      const auto rows = cmd_scaling(sc);
      emit(render_scaling(rows, parse_format(sc.format)), sc.out, out);
      if (!sc.out.empty())
        for (const auto& r : rows)
          out << "workers=" << r.workers << " time=" << format_double(r.wall_time)
              << "s efficiency=" << format_double(r.efficiency) << " max_abs_diff=" << format_double(r.max_abs_diff)
              << "\n";
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: " << msg << "\n";
    return 1;
  }
  return 0;
}

}  // namespace hobipb::cli
