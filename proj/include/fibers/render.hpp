#pragma once

// Static SVG pictures: escape-time shading, ray polylines, the outer
// equipotential and puzzle rays. The viewBox is in plane coordinates with
// the imaginary axis flipped so that up is +i.

#include <sstream>
#include <string>
#include <vector>

#include "fibers/dynamics.hpp"
#include "fibers/io.hpp"
#include "fibers/parallel.hpp"
#include "fibers/puzzle.hpp"

namespace fibers {

struct RenderSpec {
  Map map;
  Complex center{0.0, 0.0};
  double width = 4.0;
  int resolution = 256;
  int max_iter = 256;
  std::vector<Angle> rays;
  std::vector<Leaf> leaves;
  /// < 0: no puzzle overlay.
  int puzzle_depth = -1;
  bool equipotential = true;
  int equipotential_samples = 512;
  TraceOptions trace;
  PuzzleOptions puzzle;
  unsigned workers = 0;
};

inline void validate(const RenderSpec& s) {
  if (s.resolution < 16) throw Error(ErrorKind::invalid_argument, "resolution must be at least 16");
  if (!(s.width > 0) || !std::isfinite(s.width)) throw Error(ErrorKind::invalid_argument, "width must be positive");
  if (s.max_iter < 1) throw Error(ErrorKind::invalid_argument, "max_iter must be positive");
}

namespace detail {

inline std::string svg_point(Complex z) { return io::fixed6(z.real()) + "," + io::fixed6(-z.imag()); }

inline std::string shade(int n, int max_iter) {
  if (n >= max_iter) return "#000000";
  // Ten grey bands cycling with escape time.
  const int level = 255 - 18 * (n % 10);
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", level, level, 255);
  return buf;
}

inline void polyline(std::ostringstream& out, const TracedRay& r, const char* color, double stroke) {
  out << "<polyline data-angle=\"" << r.angle.str() << "\" fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"" << io::fixed6(stroke) << "\"";
  if (r.fail_reason || !r.landed) out << " stroke-dasharray=\"" << io::fixed6(4 * stroke) << "\"";
  out << " points=\"";
  for (std::size_t k = 0; k < r.points.size(); ++k) out << (k ? " " : "") << svg_point(r.points[k].z);
  out << "\"/>\n";
  if (r.fail_reason || !r.landed) {
    out << "<!-- warning: ray " << r.angle.str() << " "
        << (r.fail_reason ? std::string(to_string(*r.fail_reason)) : std::string("did not land")) << " -->\n";
  }
}

}  // namespace detail

inline std::string render_svg(const RenderSpec& s) {
  validate(s);
  const double half = s.width / 2;
  const double x0 = s.center.real() - half;
  const double top = s.center.imag() + half;
  const double px = s.width / s.resolution;
  const double stroke = s.width / 400;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"512\" height=\"512\" viewBox=\"" << io::fixed6(x0) << " "
      << io::fixed6(-top) << " " << io::fixed6(s.width) << " " << io::fixed6(s.width) << "\">\n";
  out << "<!-- z^" << s.map.d << " + (" << io::format_complex(s.map.c) << ") -->\n";

  // Escape-time grid, one row per task; runs of equal colour merge into one rect.
  std::vector<std::string> rows(static_cast<std::size_t>(s.resolution));
  parallel_for(
      rows.size(),
      [&](std::size_t i) {
        std::ostringstream row;
        const double y = top - (static_cast<double>(i) + 0.5) * px;
        int run_start = 0;
        std::string run_color;
        auto flush = [&](int end) {
          if (end > run_start)
            row << "<rect x=\"" << io::fixed6(x0 + run_start * px) << "\" y=\"" << io::fixed6(-(top - i * px))
                << "\" width=\"" << io::fixed6((end - run_start) * px) << "\" height=\"" << io::fixed6(px)
                << "\" fill=\"" << run_color << "\"/>\n";
        };
        for (int j = 0; j < s.resolution; ++j) {
          const Complex z(x0 + (j + 0.5) * px, y);
          const std::string color = detail::shade(escape_time(s.map, z, s.max_iter), s.max_iter);
          if (j == 0) run_color = color;
          if (color != run_color) {
            flush(j);
            run_start = j;
            run_color = color;
          }
        }
        flush(s.resolution);
        rows[i] = row.str();
      },
      s.workers);
  out << "<g shape-rendering=\"crispEdges\">\n";
  for (const auto& r : rows) out << r;
  out << "</g>\n";

  TraceOptions topt = s.trace;
  if (!(topt.g0 > 0)) topt.g0 = s.map.default_g0();

  if (s.equipotential) {
    std::vector<Complex> pts(static_cast<std::size_t>(s.equipotential_samples));
    TraceOptions eopt = topt;
    eopt.stop_when_landed = false;
    parallel_for(
        pts.size(),
        [&](std::size_t k) {
          const auto r = trace_ray_newton(s.map, Angle(static_cast<std::int64_t>(k), s.equipotential_samples), 0, eopt);
          pts[k] = r.points.empty() ? Complex(0, 0) : r.points.front().z;
        },
        s.workers);
    out << "<polygon class=\"equipotential\" fill=\"none\" stroke=\"#2a7f2a\" stroke-width=\"" << io::fixed6(stroke)
        << "\" points=\"";
    for (std::size_t k = 0; k < pts.size(); ++k) out << (k ? " " : "") << detail::svg_point(pts[k]);
    out << "\"/>\n";
  }

  if (s.puzzle_depth >= 0) {
    PuzzleOptions popt = s.puzzle;
    popt.separation.trace = topt;
    Puzzle puzzle(s.map, popt);
    const auto& lv = puzzle.level(s.puzzle_depth);
    out << "<g class=\"puzzle\" data-depth=\"" << s.puzzle_depth << "\">\n";
    for (const auto& leaf : lv.leaves) {
      detail::polyline(out, lv.rays.at(leaf.a()), "#c0392b", stroke);
      detail::polyline(out, lv.rays.at(leaf.b()), "#c0392b", stroke);
    }
    out << "</g>\n";
  }

  std::vector<Angle> wanted = s.rays;
  for (const auto& l : s.leaves) {
    wanted.push_back(l.a());
    wanted.push_back(l.b());
  }
  if (!wanted.empty()) {
    const auto traced = trace_rays(s.map, wanted, topt);
    out << "<g class=\"rays\">\n";
    for (std::size_t k = 0; k < s.rays.size(); ++k) detail::polyline(out, traced[k], "#1f4e9e", stroke);
    out << "</g>\n";
    if (!s.leaves.empty()) {
      out << "<g class=\"leaves\">\n";
      for (std::size_t k = s.rays.size(); k < traced.size(); ++k) detail::polyline(out, traced[k], "#8e44ad", stroke);
      out << "</g>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace fibers
