#include "xfield/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "xfield/gl.hpp"
#include "xfield/layout.hpp"
#include "xfield/shapes.hpp"
#include "xfield/trace.hpp"

namespace xf {

namespace {

using Json = nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "xfield-0.1.0";

struct PipelineConfig {
  std::string input;
  std::string format = "auto";  // off | obj | auto
  double tau_scale = 1.0;
  double delta = 1e-4;
  int max_iter = 2000;
  double eps = 0.0;  // 0 -> 2 x mean edge length
  double snap_tol = 1.5;
  double step_fraction = 0.25;
  unsigned seed = 1;
  bool random_init = false;
  std::string corners_path;
  std::string out_dir = "out";
  std::string field_path;    // partition/render: reuse an existing field
  std::string layout_path;   // render
  std::string config_path;   // prescribe
  double angle_tol = 0.349;  // corner detection
  int grid_target = 0;       // partition: cells per mean arc, 0 = no grids
  bool svg = true;
  bool svg_mesh = false;
  bool svg_streamlines = false;
};

struct LoadedDomain {
  TriMesh mesh;
  std::vector<Corner> corners;
  BoundaryCondition bc;
  P1System sys;
};

LoadedDomain load_domain(const PipelineConfig& cfg) {
  LoadedDomain d{[&] {
                   if (cfg.format == "off") return load_mesh(cfg.input, MeshFormat::OFF);
                   if (cfg.format == "obj") return load_mesh(cfg.input, MeshFormat::OBJ);
                   return load_mesh(cfg.input);
                 }(),
                 {},
                 {},
                 {}};
  d.corners = detect_corners(d.mesh, cfg.angle_tol);
  if (!cfg.corners_path.empty())
    apply_corner_overrides(d.mesh, d.corners, load_corner_overrides(cfg.corners_path));
  d.bc = assign_boundary_condition(d.mesh, d.corners);
  d.sys = assemble_p1(d.mesh);
  return d;
}

void write_json(const Json& j, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(1) << "\n";
}

Json field_to_json(const ComplexField& u) {
  Json values = Json::array();
  for (Eigen::Index i = 0; i < u.size(); ++i)
    values.push_back({u[i].real(), u[i].imag()});
  return Json{{"values", values}};
}

ComplexField field_from_json(const std::string& path, int expected_size) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open field file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(std::string("field file parse failure: ") + e.what());
  }
  const auto& values = j.at("values");
  if (static_cast<int>(values.size()) != expected_size)
    throw Error("field file does not match mesh size");
  ComplexField u(expected_size);
  for (int i = 0; i < expected_size; ++i)
    u[i] = Complex(values[i].at(0).get<double>(), values[i].at(1).get<double>());
  return u;
}

Json singularities_to_json(const std::vector<Singularity>& sings) {
  Json arr = Json::array();
  for (const auto& s : sings) {
    Json e{{"face", s.face_id},
           {"x", s.location.x},
           {"y", s.location.y},
           {"rep_degree", s.rep_degree},
           {"cross_index_quarters", s.rep_degree},
           {"theta0", s.theta0},
           {"exit_directions", s.exit_directions}};
    arr.push_back(e);
  }
  return arr;
}

Json config_echo(const PipelineConfig& cfg, const std::string& command) {
  return Json{{"command", command},
              {"input", cfg.input},
              {"format", cfg.format},
              {"tau_scale", cfg.tau_scale},
              {"delta", cfg.delta},
              {"max_iter", cfg.max_iter},
              {"eps", cfg.eps},
              {"snap_tol", cfg.snap_tol},
              {"step_fraction", cfg.step_fraction},
              {"seed", cfg.seed},
              {"random_init", cfg.random_init},
              {"corners", cfg.corners_path},
              {"config", cfg.config_path},
              {"version", kVersion}};
}

MboResult run_mbo(const LoadedDomain& d, const PipelineConfig& cfg) {
  MboParams params;
  params.tau_scale = cfg.tau_scale;
  params.delta = cfg.delta;
  params.max_iter = cfg.max_iter;
  ComplexField init = cfg.random_init ? random_unit_init(d.mesh, d.bc, cfg.seed)
                                      : harmonic_init(d.mesh, d.sys, d.bc);
  normalize_field(init);
  for (const auto& [v, g] : d.bc.values) init[v] = g;
  return mbo_minimize(d.mesh, d.sys, d.bc, params, init);
}

void write_field_outputs(const LoadedDomain& d, const MboResult& mbo,
                         const std::vector<Singularity>& sings, const PipelineConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  write_json(field_to_json(mbo.u), fs::path(cfg.out_dir) / "field.json");
  write_json(singularities_to_json(sings), fs::path(cfg.out_dir) / "singularities.json");
  Json trace;
  trace["iterations"] = mbo.iterations;
  trace["converged"] = mbo.converged;
  trace["step_norms"] = mbo.step_norms;
  trace["dirichlet_energy"] = mbo.dirichlet_trace;
  write_json(trace, fs::path(cfg.out_dir) / "convergence.json");
}

TraceParams trace_params(const TriMesh& mesh, const PipelineConfig& cfg) {
  TraceParams p = TraceParams::defaults(mesh);
  p.step = cfg.step_fraction * mesh.mean_edge_length;
  p.snap_factor = cfg.snap_tol;
  return p;
}

int partition_pipeline(const LoadedDomain& d, const ComplexField& u, const PipelineConfig& cfg,
                       const std::string& command) {
  auto sings = detect_singularities(d.mesh, u);
  PointLocator locator(d.mesh);
  TraceParams params = trace_params(d.mesh, cfg);

  SeparatrixSets sets = trace_separatrices(locator, u, sings, d.corners, params);
  PartitionResult part = partition(sets, params);
  QuadLayout layout = build_layout(d.mesh, part, d.corners, sings);
  ValidationReport report = validate_regions(layout, locator, u);

  fs::create_directories(cfg.out_dir);
  export_layout(layout, (fs::path(cfg.out_dir) / "layout.json").string());
  if (cfg.svg) {
    SvgOptions opts;
    opts.draw_mesh = cfg.svg_mesh;
    opts.draw_streamlines = cfg.svg_streamlines;
    export_svg(d.mesh, &u, &layout, sings, (fs::path(cfg.out_dir) / "layout.svg").string(),
               opts);
  }

  Json rep;
  rep["faces"] = Json::array();
  for (const auto& r : report.regions) {
    std::string kind = r.kind == FaceKind::Quad        ? "quad"
                       : r.kind == FaceKind::Annulus   ? "annulus"
                       : r.kind == FaceKind::TJunctionRegion ? "t_junction_region"
                                                             : "invalid";
    rep["faces"].push_back({{"face", r.face_id},
                            {"kind", kind},
                            {"corners", r.corner_count},
                            {"violations", r.violations}});
  }
  rep["violation_count"] = report.violation_count;
  rep["t_junctions"] = static_cast<int>(layout.t_junctions.size());
  rep["separatrices"] = part.n_s + static_cast<int>(part.t_junctions.size());
  rep["limit_cycles"] = part.n_l;
  write_json(rep, fs::path(cfg.out_dir) / "validation.json");

  if (cfg.grid_target > 0) {
    Json grids = Json::array();
    for (const auto& r : report.regions) {
      if (r.kind != FaceKind::Quad) continue;
      // opposite-side equality: resolution from mean side lengths
      const auto& face = layout.faces[r.face_id];
      double per = 0.0;
      for (int sid : face.arcs) {
        const auto& arc = layout.arcs[std::abs(sid) - 1];
        for (size_t i = 0; i + 1 < arc.polyline.size(); ++i)
          per += dist(arc.polyline[i], arc.polyline[i + 1]);
      }
      int m = std::max(1, static_cast<int>(std::lround(per / 4.0 * cfg.grid_target /
                                                       d.mesh.diameter())));
      RegionGrid grid = map_grid_into_region(layout, r.face_id, m, m);
      Json pts = Json::array();
      for (const auto& p : grid.points) pts.push_back({p.x, p.y});
      grids.push_back({{"face", r.face_id}, {"m", grid.m}, {"n", grid.n}, {"points", pts}});
    }
    write_json(grids, fs::path(cfg.out_dir) / "grids.json");
  }

  write_json(config_echo(cfg, command), fs::path(cfg.out_dir) / "manifest.json");

  std::cout << "regions: " << report.regions.size() << ", violations: " << report.violation_count
            << ", t-junctions: " << layout.t_junctions.size() << "\n";
  return report.violation_count == 0 ? 0 : 3;
}

int cmd_field(const PipelineConfig& cfg) {
  LoadedDomain d = load_domain(cfg);
  MboResult mbo = run_mbo(d, cfg);
  auto sings = detect_singularities(d.mesh, mbo.u);
  write_field_outputs(d, mbo, sings, cfg);
  write_json(config_echo(cfg, "field"), fs::path(cfg.out_dir) / "manifest.json");
  std::cout << "iterations: " << mbo.iterations << (mbo.converged ? "" : " (not converged)")
            << ", singularities: " << sings.size() << "\n";
  return mbo.converged ? 0 : 2;
}

int cmd_partition(const PipelineConfig& cfg) {
  LoadedDomain d = load_domain(cfg);
  ComplexField u;
  if (!cfg.field_path.empty()) {
    u = field_from_json(cfg.field_path, d.mesh.vertex_count());
    normalize_field(u);
  } else {
    MboResult mbo = run_mbo(d, cfg);
    if (!mbo.converged) return 2;
    u = mbo.u;
  }
  return partition_pipeline(d, u, cfg, "partition");
}

SingularityConfig read_singularity_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open singularity config: " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(std::string("singularity config parse failure: ") + e.what());
  }
  SingularityConfig config;
  for (const auto& e : j)
    config.push_back({{e.at("x").get<double>(), e.at("y").get<double>()},
                      e.at("degree").get<int>()});
  return config;
}

int cmd_prescribe(const PipelineConfig& cfg) {
  LoadedDomain d = load_domain(cfg);
  SingularityConfig config;
  if (!cfg.config_path.empty()) config = read_singularity_config(cfg.config_path);
  ComplexField u = canonical_harmonic_map(d.mesh, d.sys, d.bc, config);
  fs::create_directories(cfg.out_dir);
  write_json(field_to_json(u), fs::path(cfg.out_dir) / "field.json");
  write_json(singularities_to_json(detect_singularities(d.mesh, u)),
             fs::path(cfg.out_dir) / "singularities.json");
  return partition_pipeline(d, u, cfg, "prescribe");
}

int cmd_compare(const PipelineConfig& cfg) {
  LoadedDomain d = load_domain(cfg);
  double eps = cfg.eps > 0 ? cfg.eps : 2.0 * d.mesh.mean_edge_length;

  ComplexField init = cfg.random_init ? random_unit_init(d.mesh, d.bc, cfg.seed)
                                      : harmonic_init(d.mesh, d.sys, d.bc);
  normalize_field(init);
  for (const auto& [v, g] : d.bc.values) init[v] = g;

  auto t0 = std::chrono::steady_clock::now();
  MboParams mp;
  mp.tau_scale = cfg.tau_scale;
  mp.delta = cfg.delta;
  mp.max_iter = cfg.max_iter;
  MboResult mbo = mbo_minimize(d.mesh, d.sys, d.bc, mp, init);
  auto t1 = std::chrono::steady_clock::now();

  DescentParams dp;
  dp.delta = cfg.delta;
  DescentResult direct = direct_minimize_gl(d.mesh, d.sys, d.bc, eps, init, dp);
  auto t2 = std::chrono::steady_clock::now();

  ComplexField direct_u = direct.u;
  normalize_field(direct_u);
  auto mbo_sings = detect_singularities(d.mesh, mbo.u);
  auto direct_sings = detect_singularities(d.mesh, direct_u);

  // multiset match by degree, then greedy nearest pairing
  auto degrees = [](const std::vector<Singularity>& s) {
    std::vector<int> d;
    for (const auto& x : s) d.push_back(x.rep_degree);
    std::sort(d.begin(), d.end());
    return d;
  };
  bool multiset_match = degrees(mbo_sings) == degrees(direct_sings);
  double max_pair_dist = 0.0;
  Json pairs = Json::array();
  if (multiset_match) {
    std::vector<bool> taken(direct_sings.size(), false);
    for (const auto& a : mbo_sings) {
      double best = std::numeric_limits<double>::max();
      int bid = -1;
      for (size_t i = 0; i < direct_sings.size(); ++i) {
        if (taken[i] || direct_sings[i].rep_degree != a.rep_degree) continue;
        double dd = dist(a.location, direct_sings[i].location);
        if (dd < best) {
          best = dd;
          bid = static_cast<int>(i);
        }
      }
      if (bid >= 0) {
        taken[bid] = true;
        max_pair_dist = std::max(max_pair_dist, best);
        pairs.push_back({{"degree", a.rep_degree}, {"distance", best}});
      }
    }
  }
  bool paired_ok = multiset_match && max_pair_dist <= 5.0 * d.mesh.mean_edge_length;

  double mbo_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  double direct_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();

  fs::create_directories(cfg.out_dir);
  Json rep;
  rep["mbo"] = {{"iterations", mbo.iterations},
                {"converged", mbo.converged},
                {"dirichlet", dirichlet_energy(d.sys, mbo.u)},
                {"singularities", singularities_to_json(mbo_sings)}};
  rep["direct"] = {{"iterations", direct.iterations},
                   {"converged", direct.converged},
                   {"dirichlet", dirichlet_energy(d.sys, direct_u)},
                   {"singularities", singularities_to_json(direct_sings)}};
  rep["pairs"] = pairs;
  rep["multiset_match"] = multiset_match;
  rep["max_pair_distance"] = max_pair_dist;
  rep["mean_edge_length"] = d.mesh.mean_edge_length;
  write_json(rep, fs::path(cfg.out_dir) / "compare.json");
  write_json(config_echo(cfg, "compare"), fs::path(cfg.out_dir) / "manifest.json");

  // wall-clock table goes to text output only (times are not reproducible)
  std::ofstream table(fs::path(cfg.out_dir) / "compare_table.txt");
  auto row = [&](const char* name, int iters, double ms, double energy, size_t nsing) {
    table << name << "\t" << iters << "\t" << ms << " ms\t" << energy << "\t" << nsing << "\n";
    std::cout << name << "\t" << iters << "\t" << ms << " ms\t" << energy << "\t" << nsing
              << "\n";
  };
  table << "method\titers\ttime\tdirichlet\tsingularities\n";
  std::cout << "method\titers\ttime\tdirichlet\tsingularities\n";
  row("mbo", mbo.iterations, mbo_ms, dirichlet_energy(d.sys, mbo.u), mbo_sings.size());
  row("direct", direct.iterations, direct_ms, dirichlet_energy(d.sys, direct_u),
      direct_sings.size());

  if (!mbo.converged || !direct.converged) return 2;
  return paired_ok ? 0 : 2;
}

int cmd_render(const PipelineConfig& cfg) {
  LoadedDomain d = load_domain(cfg);
  ComplexField u;
  bool have_field = false;
  if (!cfg.field_path.empty()) {
    u = field_from_json(cfg.field_path, d.mesh.vertex_count());
    normalize_field(u);
    have_field = true;
  }
  QuadLayout layout;
  bool have_layout = false;
  if (!cfg.layout_path.empty()) {
    layout = import_layout(cfg.layout_path);
    have_layout = true;
  }
  std::vector<Singularity> sings;
  if (have_field) sings = detect_singularities(d.mesh, u);
  fs::create_directories(cfg.out_dir);
  SvgOptions opts;
  opts.draw_mesh = cfg.svg_mesh;
  opts.draw_streamlines = have_field;
  export_svg(d.mesh, have_field ? &u : nullptr, have_layout ? &layout : nullptr, sings,
             (fs::path(cfg.out_dir) / "render.svg").string(), opts);
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Boundary-aligned cross fields and quad layouts on planar triangle meshes"};
  app.require_subcommand(1);

  PipelineConfig cfg;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("input", cfg.input, "mesh file (OFF or OBJ)")->required();
    sub->add_option("--format", cfg.format, "off|obj|auto")->default_val("auto");
    sub->add_option("--tau-scale", cfg.tau_scale, "tau = tau_scale / lambda1");
    sub->add_option("--delta", cfg.delta, "convergence tolerance");
    sub->add_option("--max-iter", cfg.max_iter, "iteration cap");
    sub->add_option("--eps", cfg.eps, "GL penalty epsilon (0: 2 x mean edge)");
    sub->add_option("--snap-tol", cfg.snap_tol, "separatrix snap radius, local edge lengths");
    sub->add_option("--step", cfg.step_fraction, "RK4 step, fraction of mean edge length");
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_flag("--random-init", cfg.random_init, "random unit initialization");
    sub->add_option("--corners", cfg.corners_path, "corner override file (vertex_id k)");
    sub->add_option("--angle-tol", cfg.angle_tol, "corner detection tolerance (radians)");
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_flag("--svg,!--no-svg", cfg.svg, "write SVG output");
    sub->add_flag("--svg-mesh", cfg.svg_mesh, "draw the triangulation in SVG");
    sub->add_flag("--svg-streamlines", cfg.svg_streamlines, "draw background streamlines");
  };

  auto* field = app.add_subcommand("field", "compute a representation field (MBO)");
  add_common(field);
  auto* part = app.add_subcommand("partition", "field + separatrix partition + layout");
  add_common(part);
  part->add_option("--field", cfg.field_path, "reuse a previously computed field.json");
  part->add_option("--grid-target", cfg.grid_target, "also write per-face grids (cells/diam)");
  auto* presc = app.add_subcommand("prescribe", "canonical harmonic map + partition");
  add_common(presc);
  presc->add_option("--config", cfg.config_path, "singularity config JSON [{x,y,degree}]");
  auto* comp = app.add_subcommand("compare", "MBO vs direct gradient descent");
  add_common(comp);
  auto* render = app.add_subcommand("render", "SVG of a mesh with optional field/layout");
  add_common(render);
  render->add_option("--field", cfg.field_path, "field.json to draw");
  render->add_option("--layout", cfg.layout_path, "layout.json to draw");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (field->parsed()) return cmd_field(cfg);
    if (part->parsed()) return cmd_partition(cfg);
    if (presc->parsed()) return cmd_prescribe(cfg);
    if (comp->parsed()) return cmd_compare(cfg);
    if (render->parsed()) return cmd_render(cfg);
  } catch (const TracingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace xf
