// fibers: command-line front end.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fibers/config.hpp"
#include "fibers/io.hpp"
#include "fibers/lamination.hpp"
#include "fibers/puzzle.hpp"
#include "fibers/render.hpp"
#include "fibers/symbolic.hpp"

using namespace fibers;
using io::Json;

namespace {

struct Common {
  std::optional<int> d;
  std::optional<std::string> c;
  std::optional<std::string> config_path;
  std::optional<std::string> out;
  std::optional<double> tol;
  std::optional<int> depth;
  std::optional<unsigned> workers;
  bool json = false;
  Config config;

  int degree() const { return config.resolve(d, "d", 2); }
  Complex param() const { return io::parse_complex(config.resolve(c, "c", std::string("0"))); }
  Map map() const { return Map(degree(), param()); }
  unsigned worker_count() const { return config.resolve(workers, "workers", 0u); }

  TraceOptions trace() const {
    TraceOptions t;
    t.g0 = config.get<double>("g0").value_or(0.0);
    t.depth = config.get<int>("trace_depth").value_or(t.depth);
    t.landing_tol = config.get<double>("landing_tol").value_or(t.landing_tol);
    return t;
  }
};

void emit(const Common& opt, const std::string& text) {
  if (opt.out) {
    std::ofstream f(*opt.out, std::ios::binary);
    if (!f) throw Error(ErrorKind::io_error, "cannot write " + *opt.out);
    f << text;
    if (!f) throw Error(ErrorKind::io_error, "write failed for " + *opt.out);
  } else {
    std::cout << text;
  }
}

Json with_map(const char* kind, const Map& m) {
  Json j = io::envelope(kind);
  j["map"] = io::map_json(m);
  return j;
}

std::vector<Angle> angle_args(const std::optional<std::string>& one, const std::optional<std::string>& many) {
  std::vector<Angle> out;
  if (one) out.push_back(parse_angle(*one));
  if (many) {
    auto more = io::parse_angles(*many);
    out.insert(out.end(), more.begin(), more.end());
  }
  if (out.empty()) throw Error(ErrorKind::invalid_argument, "no angle given (use --angle or --angles)");
  return out;
}

std::string angle_list(const std::vector<Angle>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? " " : "") + v[k].str();
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact angle combinatorics, external rays and puzzles for z^d + c"};
  app.require_subcommand(1);
  Common opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--d", opt.d, "Degree (default 2)");
    sub->add_option("--c", opt.c, "Parameter as a+bi (default 0)");
    sub->add_option("--config", opt.config_path, "key = value configuration file");
    sub->add_option("--out", opt.out, "Write output to this file");
    sub->add_option("--workers", opt.workers, "Worker threads (0 = all cores)");
    sub->add_flag("--json", opt.json, "Emit JSON");
  };

  std::optional<std::string> angle, angles, theta_v, triangle, target, csv, center, leaves_arg;
  std::optional<int> steps, max_den, resolution, max_iter, n_angles, puzzle_depth;
  std::optional<double> g0, eps, delta, width;

  auto* orbit_cmd = app.add_subcommand("orbit", "Preperiod, period and orbit of an angle under multiplication by d");
  add_common(orbit_cmd);
  orbit_cmd->add_option("--angle", angle, "Angle p/q")->required();

  auto* trace_cmd = app.add_subcommand("trace", "Trace external rays and report their landing points");
  add_common(trace_cmd);
  trace_cmd->add_option("--angle", angle, "Angle p/q");
  trace_cmd->add_option("--angles", angles, "Comma-separated angles");
  trace_cmd->add_option("--depth", opt.depth, "Maximum number of potential levels");

  auto* pairs_cmd = app.add_subcommand("pairs", "Group rays by common landing point");
  add_common(pairs_cmd);
  pairs_cmd->add_option("--angles", angles, "Comma-separated angles");
  pairs_cmd->add_option("--max-den", max_den, "Use all angles with denominator up to this bound");
  pairs_cmd->add_option("--tol", opt.tol, "Clustering tolerance");

  auto* itin_cmd = app.add_subcommand("itinerary", "Itineraries relative to a characteristic angle");
  add_common(itin_cmd);
  itin_cmd->add_option("--theta-v", theta_v, "Characteristic angle")->required();
  itin_cmd->add_option("--angle", angle, "Angle p/q");
  itin_cmd->add_option("--angles", angles, "Comma-separated angles");

  auto* wander_cmd = app.add_subcommand("wandering", "Orbit class and side-length growth of a triangle");
  add_common(wander_cmd);
  wander_cmd->add_option("--triangle", triangle, "Three comma-separated vertices")->required();
  wander_cmd->add_option("--steps", steps, "Number of wandering-report steps (default 20)");

  auto* puzzle_cmd = app.add_subcommand("puzzle", "Puzzle pieces from the alpha rays; fiber diagnostic with --target");
  add_common(puzzle_cmd);
  puzzle_cmd->add_option("--depth", opt.depth, "Puzzle depth (default 1)");
  puzzle_cmd->add_option("--g0", g0, "Outer equipotential");
  puzzle_cmd->add_option("--target", target, "Point a+bi for the fiber diameter diagnostic");
  puzzle_cmd->add_option("--csv", csv, "Write the diagnostic as depth,diameter CSV to this file");

  auto* imp_cmd = app.add_subcommand("impression", "Sampled point cloud of a ray impression");
  add_common(imp_cmd);
  imp_cmd->add_option("--angle", angle, "Angle p/q")->required();
  imp_cmd->add_option("--eps", eps, "Angle window radius (default 1e-3)");
  imp_cmd->add_option("--delta", delta, "Potential cutoff (default eps)");
  imp_cmd->add_option("--n-angles", n_angles, "Rays in the window (default 33)");

  auto* census_cmd = app.add_subcommand("census", "Branch points: classes of at least three rays");
  add_common(census_cmd);
  census_cmd->add_option("--max-den", max_den, "Denominator bound (default 31)");
  census_cmd->add_option("--theta-v", theta_v, "Characteristic angle for the combinatorial cross-check");
  census_cmd->add_option("--tol", opt.tol, "Clustering tolerance");

  auto* render_cmd = app.add_subcommand("render", "SVG picture of the Julia set with overlays");
  add_common(render_cmd);
  render_cmd->add_option("--center", center, "View centre a+bi (default 0)");
  render_cmd->add_option("--width", width, "View width (default 4)");
  render_cmd->add_option("--resolution", resolution, "Pixels per side (default 256)");
  render_cmd->add_option("--max-iter", max_iter, "Escape-time budget (default 256)");
  render_cmd->add_option("--angles", angles, "Rays to draw");
  render_cmd->add_option("--leaves", leaves_arg, "Leaves a-b, comma-separated");
  render_cmd->add_option("--depth", puzzle_depth, "Draw the puzzle rays of this depth");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (opt.config_path) opt.config = Config::load(*opt.config_path);

    if (orbit_cmd->parsed()) {
      const int d = opt.degree();
      const auto info = orbit(parse_angle(*angle), d);
      if (opt.json) {
        Json j = io::envelope("orbit");
        j["result"] = io::to_json(info, d);
        emit(opt, io::dump(j));
      } else {
        emit(opt, "angle " + info.orbit.front().str() + " d " + std::to_string(d) + " preperiod " +
                      std::to_string(info.preperiod) + " period " + std::to_string(info.period) + " orbit " +
                      angle_list(info.orbit) + "\n");
      }
    } else if (trace_cmd->parsed()) {
      const Map m = opt.map();
      TraceOptions t = opt.trace();
      t.depth = opt.config.resolve(opt.depth, "trace_depth", t.depth);
      const auto list = angle_args(angle, angles);
      const auto rays = trace_rays(m, list, t);
      if (opt.json) {
        Json j = with_map("trace", m);
        Json arr = Json::array();
        for (const auto& r : rays) arr.push_back(io::to_json(r));
        j["rays"] = std::move(arr);
        emit(opt, io::dump(j));
      } else {
        std::string text;
        for (const auto& r : rays) {
          text += r.angle.str() + " ";
          if (r.landed)
            text += "landed " + io::format_complex(*r.landing);
          else
            text += std::string("not landed") + (r.fail_reason ? std::string(" (") + std::string(to_string(*r.fail_reason)) + ")" : "");
          text += "\n";
        }
        emit(opt, text);
      }
      for (const auto& r : rays)
        if (r.fail_reason) return 2;
    } else if (pairs_cmd->parsed()) {
      const Map m = opt.map();
      std::vector<Angle> list;
      if (angles) list = io::parse_angles(*angles);
      if (max_den) {
        auto more = angles_up_to(*max_den);
        list.insert(list.end(), more.begin(), more.end());
      }
      if (list.empty()) throw Error(ErrorKind::invalid_argument, "give --angles or --max-den");
      const auto table = ray_pairs(m, list, opt.config.resolve(opt.tol, "tol", 1e-6), opt.trace());
      if (opt.json) {
        Json j = io::envelope("pairs");
        j["result"] = io::to_json(table);
        emit(opt, io::dump(j));
      } else {
        std::string text;
        for (std::size_t k = 0; k < table.classes.size(); ++k)
          text += "{" + angle_list(table.classes[k]) + "} -> " + io::format_complex(table.points[k]) + "\n";
        emit(opt, text);
      }
    } else if (itin_cmd->parsed()) {
      const CharacteristicAngle ca{parse_angle(*theta_v), opt.degree()};
      const auto list = angle_args(angle, angles);
      const ArcLabeling labels(ca);
      if (opt.json) {
        Json j = io::envelope("itinerary");
        j["theta_v"] = ca.theta_v.str();
        j["d"] = ca.d;
        Json arr = Json::array();
        for (const auto& a : list) {
          Json row = io::to_json(itinerary(a, labels));
          row["angle"] = a.str();
          arr.push_back(std::move(row));
        }
        j["itineraries"] = std::move(arr);
        emit(opt, io::dump(j));
      } else {
        std::string text;
        for (const auto& a : list) text += a.str() + " " + itinerary(a, labels).str() + "\n";
        emit(opt, text);
      }
    } else if (wander_cmd->parsed()) {
      const int d = opt.degree();
      const Polygon tri(io::parse_angles(*triangle));
      if (tri.size() != 3) throw Error(ErrorKind::invalid_argument, "--triangle needs three distinct vertices");
      const int n = opt.config.resolve(steps, "steps", 20);
      const auto fate = triangle_orbit(tri, d, static_cast<int>(std::min<long>(triangle_step_bound(tri, d) + 1, 1L << 20)));
      const auto rep = wandering_report(tri, d, n);
      if (opt.json) {
        Json j = io::envelope("wandering");
        j["triangle"] = tri.str();
        j["d"] = d;
        j["orbit"] = io::to_json(fate);
        j["report"] = io::to_json(rep);
        emit(opt, io::dump(j));
      } else {
        std::string text = "triangle " + tri.str() + " " + std::string(to_string(fate.classification)) +
                           " preperiod " + std::to_string(fate.preperiod) + " period " +
                           std::to_string(fate.period) + "\n";
        for (const auto& s : rep.steps) {
          text += std::to_string(s.step);
          for (std::size_t i = 0; i < 3; ++i)
            text += " " + io::length_str(s.lengths[i]) + (s.grew[i] ? "+" : "-");
          text += "\n";
        }
        if (rep.collapsed) text += "collapsed at step " + std::to_string(rep.collapse_step) + "\n";
        text += std::string("growth rule ") + (rep.growth_rule_holds ? "holds" : "fails") + "\n";
        emit(opt, text);
      }
    } else if (puzzle_cmd->parsed()) {
      const Map m = opt.map();
      PuzzleOptions p;
      p.g0 = opt.config.resolve(g0, "g0", 0.0);
      p.separation.trace = opt.trace();
      p.separation.cluster_tol = opt.config.get<double>("tol").value_or(p.separation.cluster_tol);
      p.separation.guard = opt.config.get<double>("guard").value_or(p.separation.guard);
      if (auto f = opt.config.get<double>("escape_radius_factor")) p.separation.closure_radius = *f * m.escape_radius();
      p.workers = opt.worker_count();
      const int depth = opt.config.resolve(opt.depth, "depth", 1);
      if (depth < 0) throw Error(ErrorKind::invalid_argument, "depth must be non-negative");
      Puzzle puzzle(m, p);
      Json j = with_map("puzzle", m);
      j["g0"] = io::round6(puzzle.g0());
      j["alpha"] = io::to_json(puzzle.alpha());
      std::string text = "alpha " + io::format_complex(puzzle.alpha().z) + " rays " +
                         angle_list(puzzle.alpha().angles) + "\n";
      if (target) {
        const auto diag = fiber_diameter_bound(puzzle, io::parse_complex(*target), depth);
        j["diagnostic"] = io::to_json(diag);
        if (csv) {
          std::ofstream f(*csv, std::ios::binary);
          if (!f) throw Error(ErrorKind::io_error, "cannot write " + *csv);
          f << io::to_csv(diag);
        }
        text += io::to_csv(diag) + "verdict " + std::string(to_string(diag.verdict)) + "\n";
      } else {
        j["depth"] = depth;
        Json arr = Json::array();
        const auto pieces = puzzle.pieces(depth);
        for (const auto& piece : pieces) arr.push_back(io::to_json(piece));
        j["pieces"] = std::move(arr);
        text += "depth " + std::to_string(depth) + " pieces " + std::to_string(pieces.size()) + "\n";
        for (const auto& piece : pieces) {
          text += "  diameter " + io::fixed6(piece.sample_diameter) + " leaves";
          for (const auto& l : piece.boundary_leaves) text += " " + l.str();
          text += "\n";
        }
      }
      emit(opt, opt.json ? io::dump(j) : text);
    } else if (imp_cmd->parsed()) {
      const Map m = opt.map();
      const double e = opt.config.resolve(eps, "eps", 1e-3);
      const double dl = opt.config.resolve(delta, "delta", e);
      ImpressionOptions io_opt;
      io_opt.n_angles = opt.config.resolve(n_angles, "n_angles", io_opt.n_angles);
      io_opt.workers = opt.worker_count();
      const Angle theta = parse_angle(*angle);
      const auto s = impression_sample(m, theta, e, dl, io_opt, opt.trace());
      if (opt.json) {
        Json j = with_map("impression", m);
        j["angle"] = theta.str();
        j["eps"] = e;
        j["delta"] = dl;
        j["result"] = io::to_json(s);
        emit(opt, io::dump(j));
      } else {
        emit(opt, "angle " + theta.str() + " points " + std::to_string(s.cloud.size()) + " diameter " +
                      io::fixed6(s.diameter) + (s.partial ? " (partial)" : "") + "\n");
      }
    } else if (census_cmd->parsed()) {
      const Map m = opt.map();
      std::optional<CharacteristicAngle> ca;
      if (theta_v) ca = CharacteristicAngle{parse_angle(*theta_v), m.d};
      const auto rep = branch_census(m, opt.config.resolve(max_den, "max_den", 31), ca,
                                     opt.config.resolve(opt.tol, "tol", 1e-6), opt.trace());
      if (opt.json) {
        Json j = with_map("census", m);
        j["result"] = io::to_json(rep);
        emit(opt, io::dump(j));
      } else {
        std::string text;
        for (const auto& e : rep.entries)
          text += "{" + angle_list(e.angles) + "} -> " + io::format_complex(e.point) + " rays " +
                  std::to_string(e.ray_count) + (e.eventually_periodic ? "" : " NOT eventually periodic") + "\n";
        if (rep.combinatorial_agrees)
          text += std::string("combinatorial cross-check ") + (*rep.combinatorial_agrees ? "agrees" : "differs") + "\n";
        emit(opt, text);
      }
    } else if (render_cmd->parsed()) {
      RenderSpec s;
      s.map = opt.map();
      s.center = io::parse_complex(opt.config.resolve(center, "center", std::string("0")));
      s.width = opt.config.resolve(width, "width", 4.0);
      s.resolution = opt.config.resolve(resolution, "resolution", 256);
      s.max_iter = opt.config.resolve(max_iter, "max_iter", 256);
      if (angles) s.rays = io::parse_angles(*angles);
      if (leaves_arg) {
        std::string_view rest = *leaves_arg;
        while (!rest.empty()) {
          const auto comma = rest.find(',');
          const auto item = rest.substr(0, comma);
          const auto dash = item.find('-');
          if (dash == std::string_view::npos) throw Error(ErrorKind::parse_error, "leaf must be written a-b");
          s.leaves.emplace_back(parse_angle(item.substr(0, dash)), parse_angle(item.substr(dash + 1)));
          if (comma == std::string_view::npos) break;
          rest.remove_prefix(comma + 1);
        }
      }
      s.puzzle_depth = puzzle_depth.value_or(-1);
      s.trace = opt.trace();
      s.workers = opt.worker_count();
      emit(opt, render_svg(s));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
