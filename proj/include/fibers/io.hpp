#pragma once

// Text parsing and JSON/CSV emitters. Numbers are rounded to 6 decimals so
// that output is byte-stable across runs and worker counts.

#include <charconv>
#include <cmath>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fibers/dynamics.hpp"
#include "fibers/lamination.hpp"
#include "fibers/puzzle.hpp"
#include "fibers/symbolic.hpp"

namespace fibers::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace detail

/// Parses "a+bi", "a-bi", "a", "bi", "i", "-i" (exponents allowed).
inline Complex parse_complex(std::string_view text) {
  const std::string_view s = detail::trim(text);
  auto fail = [&]() -> Complex {
    throw Error(ErrorKind::parse_error, "bad complex literal '" + std::string(text) + "' (expected a+bi)");
  };
  if (s.empty()) return fail();
  double re = 0.0, im = 0.0;
  if (s.back() != 'i') {
    if (!detail::parse_double(s, re)) return fail();
    return {re, 0.0};
  }
  const std::string_view body = s.substr(0, s.size() - 1);
  // Split at the last sign that is neither leading nor part of an exponent.
  std::size_t split = std::string_view::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  std::string_view real_part, imag_part = body;
  if (split != std::string_view::npos) {
    real_part = body.substr(0, split);
    imag_part = body.substr(split);
    if (!detail::parse_double(real_part, re)) return fail();
  }
  if (imag_part.empty() || imag_part == "+")
    im = 1.0;
  else if (imag_part == "-")
    im = -1.0;
  else if (!detail::parse_double(imag_part, im))
    return fail();
  return {re, im};
}

/// Comma-separated angle list.
inline std::vector<Angle> parse_angles(std::string_view text) {
  std::vector<Angle> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = detail::trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
    out.push_back(parse_angle(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

/// Rounds to 6 decimals; negative zero becomes zero.
inline double round6(double x) {
  if (!std::isfinite(x)) return x;
  const double r = std::round(x * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;
}

inline std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", round6(x));
  return buf;
}

inline std::string format_complex(Complex z) {
  const double im = round6(z.imag());
  return fixed6(z.real()) + (im < 0 ? "-" : "+") + fixed6(std::abs(im)) + "i";
}

inline Json complex_json(Complex z) { return Json::array({round6(z.real()), round6(z.imag())}); }

template <class Int>
std::string length_str(const Length<Int>& l) {
  if (l.numerator() == 0) return "0";
  return fibers::detail::int_to_string(l.numerator()) + "/" + fibers::detail::int_to_string(l.denominator());
}

inline Json map_json(const Map& m) { return Json{{"d", m.d}, {"c", complex_json(m.c)}}; }

inline Json envelope(std::string_view kind) { return Json{{"schema", std::string(kind)}, {"version", kSchemaVersion}}; }

inline Json angles_json(const std::vector<Angle>& v) {
  Json out = Json::array();
  for (const auto& a : v) out.push_back(a.str());
  return out;
}

inline Json to_json(const OrbitInfo& info, int d) {
  return Json{{"angle", info.orbit.front().str()},
              {"d", d},
              {"preperiod", info.preperiod},
              {"period", info.period},
              {"orbit", angles_json(info.orbit)}};
}

inline Json to_json(const TracedRay& r) {
  Json pts = Json::array();
  for (const auto& p : r.points) pts.push_back(Json::array({round6(p.z.real()), round6(p.z.imag()), round6(p.g)}));
  Json out{{"angle", r.angle.str()}, {"points", std::move(pts)}, {"landed", r.landed}};
  out["landing"] = r.landing ? complex_json(*r.landing) : Json(nullptr);
  out["fail_reason"] = r.fail_reason ? Json(std::string(to_string(*r.fail_reason))) : Json(nullptr);
  return out;
}

inline Json to_json(const Itinerary& it) {
  auto syms = [](const std::vector<int>& v) {
    Json a = Json::array();
    for (int s : v) a.push_back(s == kStar ? Json("*") : Json(s));
    return a;
  };
  return Json{{"preperiod", syms(it.preperiod)}, {"period", syms(it.period)}, {"text", it.str()}};
}

inline Json to_json(const LandingTable& t) {
  Json classes = Json::array();
  for (std::size_t k = 0; k < t.classes.size(); ++k)
    classes.push_back(Json{{"angles", angles_json(t.classes[k])}, {"landing", complex_json(t.points[k])}});
  return Json{{"map", map_json(t.map)},
              {"tol", t.tol},
              {"provenance", t.provenance == Provenance::numerical ? "numerical" : "combinatorial"},
              {"classes", std::move(classes)}};
}

inline Json to_json(const TriangleOrbitReport& r) {
  Json out{{"classification", std::string(to_string(r.classification))},
           {"preperiod", r.preperiod},
           {"period", r.period}};
  out["collapse_step"] = r.collapse_step >= 0 ? Json(r.collapse_step) : Json(nullptr);
  return out;
}

inline Json to_json(const WanderingReport& r) {
  Json steps = Json::array();
  for (const auto& s : r.steps) {
    Json lengths = Json::array(), grew = Json::array(), ok = Json::array();
    for (std::size_t i = 0; i < 3; ++i) {
      lengths.push_back(length_str(s.lengths[i]));
      grew.push_back(s.grew[i]);
      ok.push_back(s.rule_ok[i]);
    }
    steps.push_back(Json{{"step", s.step}, {"lengths", std::move(lengths)}, {"grew", std::move(grew)},
                         {"rule_ok", std::move(ok)}});
  }
  Json out{{"steps", std::move(steps)}, {"collapsed", r.collapsed}, {"growth_rule_holds", r.growth_rule_holds}};
  out["collapse_step"] = r.collapse_step >= 0 ? Json(r.collapse_step) : Json(nullptr);
  return out;
}

inline Json leaf_json(const Leaf& l) { return Json::array({l.a().str(), l.b().str()}); }

inline Json to_json(const PuzzlePiece& p) {
  Json leaves = Json::array(), verts = Json::array(), arcs = Json::array();
  for (const auto& l : p.boundary_leaves) leaves.push_back(leaf_json(l));
  for (const auto& z : p.vertex_points) verts.push_back(complex_json(z));
  for (const auto& [x, y] : p.arcs) arcs.push_back(Json::array({x.str(), y.str()}));
  return Json{{"depth", p.depth},
              {"boundary_leaves", std::move(leaves)},
              {"equipotential_G", round6(p.equipotential_g)},
              {"vertex_points", std::move(verts)},
              {"sample_diameter", round6(p.sample_diameter)},
              {"arcs", std::move(arcs)}};
}

inline Json to_json(const AlphaFixedPoint& a) {
  return Json{{"z", complex_json(a.z)}, {"beta", complex_json(a.beta)}, {"angles", angles_json(a.angles)}};
}

inline Json to_json(const FiberDiagnostic& f) {
  Json rows = Json::array();
  for (std::size_t k = 0; k < f.bounds.size(); ++k)
    rows.push_back(Json{{"depth", f.bounds[k].first},
                        {"bound", round6(f.bounds[k].second)},
                        {"raw", round6(f.raw[k])}});
  return Json{{"target", complex_json(f.target)},
              {"bounds", std::move(rows)},
              {"verdict", std::string(to_string(f.verdict))}};
}

/// "depth,diameter" rows.
inline std::string to_csv(const FiberDiagnostic& f) {
  std::ostringstream out;
  out << "depth,diameter\n";
  for (const auto& [depth, bound] : f.bounds) out << depth << "," << fixed6(bound) << "\n";
  return out.str();
}

inline Json to_json(const CensusReport& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries)
    entries.push_back(Json{{"angles", angles_json(e.angles)},
                           {"landing", complex_json(e.point)},
                           {"ray_count", e.ray_count},
                           {"eventually_periodic", e.eventually_periodic}});
  Json out{{"classes", std::move(entries)}};
  out["combinatorial_agrees"] = r.combinatorial_agrees ? Json(*r.combinatorial_agrees) : Json(nullptr);
  return out;
}

inline Json to_json(const ImpressionSample& s) {
  Json cloud = Json::array();
  for (const auto& z : s.cloud) cloud.push_back(complex_json(z));
  return Json{{"angles", s.angles.size()},
              {"cloud", std::move(cloud)},
              {"diameter", round6(s.diameter)},
              {"failed", s.failed},
              {"partial", s.partial}};
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace fibers::io
