#pragma once

// Leaves and inscribed polygons of the unit circle, and the forward
// dynamics of angle multiplication on them.

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "fibers/angle.hpp"

namespace fibers {

template <class Int>
using Length = boost::rational<Int>;

namespace detail {

/// Exact ordering of two lengths by cross multiplication.
template <class Int>
std::strong_ordering length_cmp(const Length<Int>& x, const Length<Int>& y) {
  return cross_compare<Int>(x.numerator(), y.denominator(), y.numerator(), x.denominator());
}

template <class Int>
bool longer(const Length<Int>& x, const Length<Int>& y) {
  return length_cmp(x, y) == std::strong_ordering::greater;
}

}  // namespace detail

/// Chord between two distinct angles, stored with a < b.
template <class Int>
class BasicLeaf {
 public:
  BasicLeaf(BasicAngle<Int> a, BasicAngle<Int> b) {
    if (a == b) throw Error(ErrorKind::invalid_argument, "leaf endpoints must differ");
    if (b < a) std::swap(a, b);
    a_ = std::move(a);
    b_ = std::move(b);
  }

  const BasicAngle<Int>& a() const { return a_; }
  const BasicAngle<Int>& b() const { return b_; }
  Length<Int> length() const { return circ_dist(a_, b_); }

  /// The open arc (a, b) is the short side, ties resolved toward (a, b).
  bool short_side_is_ab() const { return b_.value() - a_.value() <= Length<Int>(1, 2); }

  /// True iff x lies strictly inside the short-side arc.
  bool in_short_side(const BasicAngle<Int>& x) const {
    const bool inside_ab = a_ < x && x < b_;
    if (short_side_is_ab()) return inside_ab;
    return !inside_ab && x != a_ && x != b_;
  }

  std::string str() const { return a_.str() + "-" + b_.str(); }

  friend bool operator==(const BasicLeaf&, const BasicLeaf&) = default;
  friend auto operator<=>(const BasicLeaf& l, const BasicLeaf& r) {
    if (auto c = l.a_ <=> r.a_; c != 0) return c;
    return l.b_ <=> r.b_;
  }

 private:
  BasicAngle<Int> a_;
  BasicAngle<Int> b_;
};

using Leaf = BasicLeaf<std::int64_t>;

/// Inscribed polygon on n >= 3 distinct sorted vertices.
template <class Int>
class BasicPolygon {
 public:
  explicit BasicPolygon(std::vector<BasicAngle<Int>> vertices) : vertices_(std::move(vertices)) {
    std::sort(vertices_.begin(), vertices_.end());
    if (vertices_.size() < 3) throw Error(ErrorKind::invalid_argument, "polygon needs at least 3 vertices");
    if (std::adjacent_find(vertices_.begin(), vertices_.end()) != vertices_.end())
      throw Error(ErrorKind::invalid_argument, "polygon vertices must be distinct");
  }

  const std::vector<BasicAngle<Int>>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }

  std::vector<BasicLeaf<Int>> sides() const {
    std::vector<BasicLeaf<Int>> out;
    for (std::size_t i = 0; i < vertices_.size(); ++i)
      out.emplace_back(vertices_[i], vertices_[(i + 1) % vertices_.size()]);
    return out;
  }

  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      if (i) s += ",";
      s += vertices_[i].str();
    }
    return s;
  }

  friend bool operator==(const BasicPolygon&, const BasicPolygon&) = default;

 private:
  std::vector<BasicAngle<Int>> vertices_;
};

using Polygon = BasicPolygon<std::int64_t>;

/// Image of a leaf under angle multiplication; nullopt when both endpoints
/// land on the same angle (a critical leaf).
template <class Int>
std::optional<BasicLeaf<Int>> leaf_image(const BasicLeaf<Int>& leaf, int d) {
  auto a = times_d(leaf.a(), d);
  auto b = times_d(leaf.b(), d);
  if (a == b) return std::nullopt;
  return BasicLeaf<Int>(std::move(a), std::move(b));
}

/// Linked endpoints only; leaves sharing an endpoint never cross.
template <class Int>
bool leaves_cross(const BasicLeaf<Int>& l1, const BasicLeaf<Int>& l2) {
  auto strictly_inside = [&](const BasicAngle<Int>& x) { return l1.a() < x && x < l1.b(); };
  const auto& c = l2.a();
  const auto& e = l2.b();
  if (c == l1.a() || c == l1.b() || e == l1.a() || e == l1.b()) return false;
  return strictly_inside(c) != strictly_inside(e);
}

template <class Int>
bool polygons_cross(const BasicPolygon<Int>& p, const BasicPolygon<Int>& q) {
  for (const auto& s : p.sides())
    for (const auto& t : q.sides())
      if (leaves_cross(s, t)) return true;
  return false;
}

enum class TriangleFate { periodic, preperiodic, critical_collapse, exhausted };

inline std::string_view to_string(TriangleFate f) {
  switch (f) {
    case TriangleFate::periodic: return "periodic";
    case TriangleFate::preperiodic: return "preperiodic";
    case TriangleFate::critical_collapse: return "critical-collapse";
    case TriangleFate::exhausted: return "exhausted";
  }
  return "?";
}

template <class Int>
using LengthTriple = std::array<Length<Int>, 3>;

template <class Int>
struct BasicTriangleOrbitReport {
  TriangleFate classification = TriangleFate::exhausted;
  int preperiod = 0;
  int period = 0;
  /// Step at which two vertices collided (critical-collapse only).
  int collapse_step = -1;
  /// Sorted side lengths l >= l' >= l'' of every non-degenerate step.
  std::vector<LengthTriple<Int>> side_lengths;
};

using TriangleOrbitReport = BasicTriangleOrbitReport<std::int64_t>;

template <class Int>
LengthTriple<Int> sorted_side_lengths(const BasicPolygon<Int>& tri) {
  const auto& v = tri.vertices();
  LengthTriple<Int> out{circ_dist(v[0], v[1]), circ_dist(v[1], v[2]), circ_dist(v[2], v[0])};
  std::sort(out.begin(), out.end(), detail::longer<Int>);
  return out;
}

/// Upper bound on the steps needed to classify a rational triangle: the
/// vertex-set sequence is periodic after max(preperiod_i) with period
/// dividing lcm(period_i).
template <class Int>
long triangle_step_bound(const BasicPolygon<Int>& tri, int d) {
  long pre = 0;
  long per = 1;
  for (const auto& v : tri.vertices()) {
    const auto info = orbit(v, d);
    pre = std::max<long>(pre, info.preperiod);
    per = std::lcm(per, static_cast<long>(info.period));
  }
  return pre + per;
}

/// Iterates the vertex set of a triangle under multiplication by d.
/// Periodicity is judged on vertex sets, not ordered tuples.
template <class Int>
BasicTriangleOrbitReport<Int> triangle_orbit(const BasicPolygon<Int>& tri, int d, int max_steps) {
  if (tri.size() != 3) throw Error(ErrorKind::invalid_argument, "triangle_orbit needs exactly 3 vertices");
  if (max_steps < 1) throw Error(ErrorKind::invalid_argument, "max_steps must be at least 1");
  using Set = std::array<BasicAngle<Int>, 3>;
  BasicTriangleOrbitReport<Int> rep;
  std::vector<Set> seen;
  const auto hint = static_cast<std::size_t>(std::min(max_steps, 64)) + 1;
  seen.reserve(hint);
  rep.side_lengths.reserve(hint);
  const auto& v = tri.vertices();
  Set cur{v[0], v[1], v[2]};  // sorted, distinct
  for (int step = 0; step <= max_steps; ++step) {
    for (std::size_t k = 0; k < seen.size(); ++k) {
      if (seen[k] == cur) {
        rep.preperiod = static_cast<int>(k);
        rep.period = step - static_cast<int>(k);
        rep.classification = rep.preperiod == 0 ? TriangleFate::periodic : TriangleFate::preperiodic;
        return rep;
      }
    }
    LengthTriple<Int> sides{circ_dist(cur[0], cur[1]), circ_dist(cur[1], cur[2]), circ_dist(cur[2], cur[0])};
    std::sort(sides.begin(), sides.end(), detail::longer<Int>);
    rep.side_lengths.push_back(std::move(sides));
    seen.push_back(cur);
    if (step == max_steps) break;
    for (auto& x : cur) x = times_d(x, d);
    std::sort(cur.begin(), cur.end());
    if (cur[0] == cur[1] || cur[1] == cur[2]) {
      rep.classification = TriangleFate::critical_collapse;
      rep.collapse_step = step + 1;
      return rep;
    }
  }
  rep.classification = TriangleFate::exhausted;
  return rep;
}

template <class Int>
struct BasicWanderingStep {
  int step = 0;
  /// l >= l' >= l''.
  LengthTriple<Int> lengths;
  /// grew[i]: the image of side i (in sorted order) is longer than side i.
  std::array<bool, 3> grew{};
  /// Growth rule verdict per side; sides with s >= 1/d are outside the
  /// rule's hypothesis and always pass.
  std::array<bool, 3> rule_ok{};
};

template <class Int>
struct BasicWanderingReport {
  std::vector<BasicWanderingStep<Int>> steps;
  bool collapsed = false;
  int collapse_step = -1;
  bool growth_rule_holds = true;
};

using WanderingStep = BasicWanderingStep<std::int64_t>;
using WanderingReport = BasicWanderingReport<std::int64_t>;

/// True iff the side-length law holds for one side: below 1/(d+1) it grows,
/// above it shrinks, at it stays put. Only meaningful for s < 1/d.
template <class Int>
bool growth_rule(const Length<Int>& s, const Length<Int>& image, int d) {
  const Int one(1);
  if (detail::cross_compare<Int>(s.numerator(), Int(d), one, s.denominator()) != std::strong_ordering::less) return true;
  const auto vs_pivot = detail::cross_compare<Int>(s.numerator(), Int(d + 1), one, s.denominator());
  const auto change = detail::length_cmp(image, s);
  if (vs_pivot == std::strong_ordering::less) return change == std::strong_ordering::greater;
  if (vs_pivot == std::strong_ordering::greater) return change == std::strong_ordering::less;
  return change == std::strong_ordering::equal;
}

/// Per-step sorted side lengths with growth flags, for `steps` steps.
template <class Int>
BasicWanderingReport<Int> wandering_report(const BasicPolygon<Int>& tri, int d, int steps) {
  if (tri.size() != 3) throw Error(ErrorKind::invalid_argument, "wandering_report needs exactly 3 vertices");
  BasicWanderingReport<Int> rep;
  rep.steps.reserve(static_cast<std::size_t>(std::max(steps, 0)));
  const auto& v = tri.vertices();
  std::array<BasicAngle<Int>, 3> cur{v[0], v[1], v[2]};
  // Side i joins cur[i] and cur[i + 1]; its image joins the images of both
  // ends, so this step's image lengths are the next step's side lengths.
  LengthTriple<Int> len{circ_dist(cur[0], cur[1]), circ_dist(cur[1], cur[2]), circ_dist(cur[2], cur[0])};
  for (int step = 0; step < steps; ++step) {
    std::array<BasicAngle<Int>, 3> img{times_d(cur[0], d), times_d(cur[1], d), times_d(cur[2], d)};
    if (img[0] == img[1] || img[1] == img[2] || img[2] == img[0]) {
      rep.collapsed = true;
      rep.collapse_step = step + 1;
      return rep;
    }
    const LengthTriple<Int> next{circ_dist(img[0], img[1]), circ_dist(img[1], img[2]), circ_dist(img[2], img[0])};
    std::array<std::pair<Length<Int>, Length<Int>>, 3> sides{
        {{len[0], next[0]}, {len[1], next[1]}, {len[2], next[2]}}};
    std::sort(sides.begin(), sides.end(), [](const auto& x, const auto& y) { return detail::longer(x.first, y.first); });
    BasicWanderingStep<Int> row;
    row.step = step;
    for (std::size_t i = 0; i < 3; ++i) {
      row.lengths[i] = sides[i].first;
      row.grew[i] = detail::longer(sides[i].second, sides[i].first);
      row.rule_ok[i] = growth_rule(sides[i].first, sides[i].second, d);
      rep.growth_rule_holds = rep.growth_rule_holds && row.rule_ok[i];
    }
    rep.steps.push_back(row);
    cur = img;
    len = next;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Area bound for fat inscribed triangles.

/// Area of the triangle inscribed in the unit circle whose vertices cut it
/// into arcs of a, b and 1 - a - b turns.
inline double inscribed_triangle_area(double a, double b) {
  const double c = 1.0 - a - b;
  return 2.0 * std::sin(std::numbers::pi * a) * std::sin(std::numbers::pi * b) * std::sin(std::numbers::pi * c);
}

/// Minimum area of an inscribed triangle with all pairwise circular vertex
/// distances >= eps. One arc is pinned to eps; the free arc is scanned on a
/// 1e-4 grid and refined by golden-section search to 1e-8 in area.
inline double min_triangle_area(double eps) {
  if (!(eps > 0.0) || eps > 1.0 / 3.0 + 1e-15)
    throw Error(ErrorKind::invalid_argument, "eps must lie in (0, 1/3]");
  eps = std::min(eps, 1.0 / 3.0);
  const double lo = eps;
  const double hi = 1.0 - 2.0 * eps;
  auto area = [&](double b) { return inscribed_triangle_area(eps, b); };
  if (hi - lo < 1e-12) return area(lo);

  constexpr double grid = 1e-4;
  const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / grid)));
  int best = 0;
  double best_val = area(lo);
  for (int i = 1; i <= n; ++i) {
    const double b = std::min(hi, lo + i * grid);
    const double v = area(b);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  double x0 = std::max(lo, lo + (best - 1) * grid);
  double x1 = std::min(hi, lo + (best + 1) * grid);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = x1 - inv_phi * (x1 - x0);
  double e = x0 + inv_phi * (x1 - x0);
  double fc = area(c), fe = area(e);
  for (int it = 0; it < 200 && std::abs(fc - fe) > 1e-12 && x1 - x0 > 1e-14; ++it) {
    if (fc < fe) {
      x1 = e;
      e = c;
      fe = fc;
      c = x1 - inv_phi * (x1 - x0);
      fc = area(c);
    } else {
      x0 = c;
      c = e;
      fc = fe;
      e = x0 + inv_phi * (x1 - x0);
      fe = area(e);
    }
  }
  return std::min({best_val, fc, fe, area(lo), area(hi)});
}

/// Upper bound on the number of interior-disjoint inscribed triangles whose
/// vertices are pairwise at least eps apart.
inline long packing_bound(double eps) {
  return static_cast<long>(std::floor(std::numbers::pi / min_triangle_area(eps)));
}

}  // namespace fibers
