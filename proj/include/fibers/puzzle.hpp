#pragma once

// Separation lines built from ray pairs, Yoccoz-style puzzles generated by
// the rays landing at the alpha fixed point, and fiber diagnostics derived
// from the shrinking of puzzle pieces.
//
// Only ray pairs are used as separation lines. Curves through the interior
// of the filled Julia set are not constructed, so a point inside a bounded
// Fatou component always sits in pieces at least as large as that
// component and its diagnostic stalls.

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "fibers/dynamics.hpp"
#include "fibers/geometry.hpp"
#include "fibers/lamination.hpp"
#include "fibers/symbolic.hpp"

namespace fibers {

struct SeparationOptions {
  TraceOptions trace;
  /// Landing points of a pair must agree within this distance.
  double cluster_tol = 1e-6;
  /// <= 0 selects the escape radius of the map.
  double closure_radius = 0.0;
  /// Ray points this close to the landing point are dropped from the curve
  /// so the two rays meet only at the landing point.
  double trim = 1e-5;
  int arc_segments_per_turn = 256;
  bool verify_simple = true;
  double guard = 1e-7;
};

/// Closed curve: ray(a) from its outer end to the landing point, ray(b)
/// back out, and a circular arc at closure_radius through the short side
/// of the leaf. Its bounded component ("side A") contains the rays whose
/// angles lie on the short side.
struct SeparationCurve {
  Leaf leaf;
  TracedRay ray_a;
  TracedRay ray_b;
  Complex landing;
  double closure_radius = 0.0;
  std::vector<Complex> ring;

  bool side_a(Complex z) const { return geometry::inside_ring(z, ring); }
  double distance(Complex z) const { return geometry::distance_to_ring(z, ring); }
};

namespace detail {

inline void check_ray(const TracedRay& r) {
  if (r.fail_reason)
    throw Error(ErrorKind::trace_failure, "ray " + r.angle.str() + ": " + std::string(to_string(*r.fail_reason)));
  if (!r.landed) throw Error(ErrorKind::trace_failure, "ray " + r.angle.str() + " did not land");
}

}  // namespace detail

/// Builds the separation curve from already traced rays.
inline SeparationCurve assemble_curve(const Map& m, const Leaf& leaf, TracedRay ray_a, TracedRay ray_b,
                                      const SeparationOptions& opt = {}) {
  detail::check_ray(ray_a);
  detail::check_ray(ray_b);
  const double gap = std::abs(*ray_a.landing - *ray_b.landing);
  if (gap > opt.cluster_tol)
    throw Error(ErrorKind::not_a_pair, "rays " + leaf.a().str() + " and " + leaf.b().str() + " land " +
                                           std::to_string(gap) + " apart");
  SeparationCurve sc{leaf, std::move(ray_a), std::move(ray_b), {}, 0.0, {}};
  sc.landing = 0.5 * (*sc.ray_a.landing + *sc.ray_b.landing);

  const Complex outer_a = sc.ray_a.points.front().z;
  const Complex outer_b = sc.ray_b.points.front().z;
  sc.closure_radius = opt.closure_radius > 0 ? opt.closure_radius : m.escape_radius();
  sc.closure_radius = std::max({sc.closure_radius, std::abs(outer_a), std::abs(outer_b)});

  auto& ring = sc.ring;
  for (const auto& p : sc.ray_a.points)
    if (std::abs(p.z - sc.landing) > opt.trim) ring.push_back(p.z);
  ring.push_back(sc.landing);
  for (auto it = sc.ray_b.points.rbegin(); it != sc.ray_b.points.rend(); ++it)
    if (std::abs(it->z - sc.landing) > opt.trim) ring.push_back(it->z);

  // Arc from ray b's outer end back to ray a's, sweeping through the short side.
  const double len_ab = (leaf.b().value() - leaf.a().value()).numerator() /
                        static_cast<double>((leaf.b().value() - leaf.a().value()).denominator());
  const double wanted = leaf.short_side_is_ab() ? -kTwoPi * len_ab : kTwoPi * (1.0 - len_ab);
  const double start = std::arg(outer_b);
  double sweep = std::arg(outer_a) - start;
  sweep += kTwoPi * std::round((wanted - sweep) / kTwoPi);
  const int segments = std::max(8, static_cast<int>(std::ceil(std::abs(sweep) / kTwoPi * opt.arc_segments_per_turn)));
  const double snap = 1e-9 * sc.closure_radius;
  if (std::abs(outer_b) < sc.closure_radius - snap) ring.push_back(std::polar(sc.closure_radius, start));
  for (int k = 1; k < segments; ++k) ring.push_back(std::polar(sc.closure_radius, start + sweep * k / segments));
  const Complex arc_end = std::polar(sc.closure_radius, start + sweep);
  if (std::abs(arc_end - outer_a) > snap) ring.push_back(arc_end);

  if (opt.verify_simple && !geometry::ring_is_simple(ring))
    throw Error(ErrorKind::not_simple, "separation curve for " + leaf.str() + " self-intersects");
  return sc;
}

inline SeparationCurve separation_curve(const Map& m, const Leaf& leaf, const SeparationOptions& opt = {}) {
  const Angle pair[] = {leaf.a(), leaf.b()};
  auto rays = trace_rays(m, pair, opt.trace);
  return assemble_curve(m, leaf, std::move(rays[0]), std::move(rays[1]), opt);
}

/// True iff z1 and z2 lie in different components of the plane minus the
/// curve.
inline bool separates(const SeparationCurve& sc, Complex z1, Complex z2, double guard = 1e-7) {
  for (Complex z : {z1, z2})
    if (sc.distance(z) < guard)
      throw Error(ErrorKind::point_on_curve, "point lies within the guard distance of the separation curve");
  if (z1 == z2) return false;
  return sc.side_a(z1) != sc.side_a(z2);
}

// ---------------------------------------------------------------------------
// Puzzles

struct PuzzleOptions {
  /// Outer equipotential of the depth-0 puzzle; <= 0 selects log(escape radius).
  double g0 = 0.0;
  SeparationOptions separation;
  /// Periods q of the angle cycles k/(d^q - 1) scanned for the alpha rays.
  int alpha_max_period = 10;
  int equipotential_samples = 128;
  unsigned workers = 0;
};

struct AlphaFixedPoint {
  Complex z;
  Complex beta;
  /// Angles of the rays landing at alpha, sorted.
  std::vector<Angle> angles;
};

struct PuzzlePiece {
  int depth = 0;
  std::vector<Leaf> boundary_leaves;
  double equipotential_g = 0.0;
  std::vector<Complex> vertex_points;
  double sample_diameter = 0.0;
  /// Circle arcs of the piece, each running counterclockwise from first to second.
  std::vector<std::pair<Angle, Angle>> arcs;
};

enum class FiberVerdict { shrinking, stalled };

inline std::string_view to_string(FiberVerdict v) { return v == FiberVerdict::shrinking ? "shrinking" : "stalled"; }

struct FiberDiagnostic {
  Complex target;
  /// (depth, bound) with bounds non-increasing in depth.
  std::vector<std::pair<int, double>> bounds;
  /// Sampled diameter of the containing piece at each depth, before the
  /// running minimum is taken.
  std::vector<double> raw;
  FiberVerdict verdict = FiberVerdict::stalled;
};

namespace detail {

inline Angle arc_point(const Angle& from, const Angle& to, std::int64_t j, std::int64_t parts) {
  auto len = to.value() - from.value();
  if (len <= 0) len += 1;
  const std::int64_t q1 = from.den();
  const std::int64_t num = checked_add(checked_mul(checked_mul(from.num(), len.denominator()), parts),
                                       checked_mul(checked_mul(j, len.numerator()), q1));
  const std::int64_t den = checked_mul(checked_mul(q1, len.denominator()), parts);
  return Angle(num, den);
}

}  // namespace detail

/// Puzzle generated by the rays landing at the alpha fixed point. Levels are
/// computed on demand and cached.
class Puzzle {
 public:
  struct Region {
    std::vector<std::pair<Angle, Angle>> arcs;
    std::vector<std::size_t> leaves;  // indices into Level::leaves
    std::vector<std::size_t> groups;  // landing groups touching the region
  };

  struct Level {
    int depth = 0;
    double g = 0.0;
    std::vector<Angle> angles;
    std::map<Angle, TracedRay> rays;
    std::vector<std::vector<Angle>> groups;
    std::vector<Complex> group_points;
    std::vector<Leaf> leaves;
    std::vector<Region> regions;
  };

  Puzzle(const Map& m, PuzzleOptions opt = {}) : map_(m), opt_(std::move(opt)) {
    g0_ = opt_.g0 > 0 ? opt_.g0 : m.default_g0();
    opt_.separation.trace.g0 = g0_;
    alpha_ = find_alpha();
  }

  const Map& map() const { return map_; }
  double g0() const { return g0_; }
  const AlphaFixedPoint& alpha() const { return alpha_; }

  const Level& level(int depth) {
    if (depth < 0) throw Error(ErrorKind::invalid_argument, "depth must be non-negative");
    auto it = levels_.find(depth);
    if (it == levels_.end()) it = levels_.emplace(depth, build_level(depth)).first;
    return it->second;
  }

  const SeparationCurve& curve(int depth, std::size_t leaf_index) {
    const auto key = std::make_pair(depth, leaf_index);
    auto it = curves_.find(key);
    if (it == curves_.end()) {
      const Level& lv = level(depth);
      const Leaf& leaf = lv.leaves[leaf_index];
      it = curves_.emplace(key, assemble_curve(map_, leaf, lv.rays.at(leaf.a()), lv.rays.at(leaf.b()), opt_.separation))
               .first;
    }
    return it->second;
  }

  PuzzlePiece piece(int depth, std::size_t region_index) {
    const Level& lv = level(depth);
    const Region& reg = lv.regions.at(region_index);
    PuzzlePiece p;
    p.depth = depth;
    p.equipotential_g = lv.g;
    p.arcs = reg.arcs;
    for (auto li : reg.leaves) p.boundary_leaves.push_back(lv.leaves[li]);
    for (auto gi : reg.groups) p.vertex_points.push_back(lv.group_points[gi]);
    p.sample_diameter = sample_diameter(lv, reg);
    return p;
  }

  std::vector<PuzzlePiece> pieces(int depth) {
    const Level& lv = level(depth);
    std::vector<PuzzlePiece> out;
    for (std::size_t r = 0; r < lv.regions.size(); ++r) out.push_back(piece(depth, r));
    return out;
  }

  /// Index of the region containing z, decided by parity tests against the
  /// separation curves of the region's boundary leaves.
  std::size_t locate(int depth, Complex z) {
    const Level& lv = level(depth);
    std::map<std::size_t, bool> side;
    auto z_side = [&](std::size_t li) {
      auto it = side.find(li);
      if (it != side.end()) return it->second;
      const auto& sc = curve(depth, li);
      if (sc.distance(z) < opt_.separation.guard)
        throw Error(ErrorKind::on_boundary, "point lies on a depth-" + std::to_string(depth) + " puzzle ray");
      return side.emplace(li, sc.side_a(z)).first->second;
    };
    for (std::size_t r = 0; r < lv.regions.size(); ++r) {
      const auto& reg = lv.regions[r];
      const Angle probe = detail::arc_point(reg.arcs.front().first, reg.arcs.front().second, 1, 2);
      bool ok = true;
      for (auto li : reg.leaves) {
        if (lv.leaves[li].in_short_side(probe) != z_side(li)) {
          ok = false;
          break;
        }
      }
      if (ok) return r;
    }
    throw Error(ErrorKind::on_boundary, "point is not inside any puzzle piece");
  }

 private:
  AlphaFixedPoint find_alpha() {
    const auto fixed = periodic_points(map_, 1);
    const Angle zero[] = {Angle()};
    const auto beta_ray = trace_rays(map_, zero, opt_.separation.trace).front();
    if (!beta_ray.landed) throw Error(ErrorKind::no_alpha_pair, "the ray at angle 0 does not land");
    const Complex beta = *beta_ray.landing;
    std::vector<Complex> candidates;
    for (const auto& p : fixed.points)
      if (p.kind == PointKind::repelling && std::abs(p.z - beta) > 1e-6) candidates.push_back(p.z);
    if (candidates.empty())
      throw Error(ErrorKind::no_alpha_pair, "no repelling fixed point other than beta");

    const int d = map_.d;
    std::int64_t dq = 1;
    for (int q = 1; q <= opt_.alpha_max_period; ++q) {
      dq *= d;
      std::vector<Angle> cycle_angles;
      for (std::int64_t k = 0; k < dq - 1; ++k) {
        Angle a(k, dq - 1);
        if (orbit(a, d).period == q) cycle_angles.push_back(a);
      }
      const auto rays = trace_rays(map_, cycle_angles, opt_.separation.trace);
      for (const auto& alpha : candidates) {
        std::vector<Angle> hits;
        for (const auto& r : rays)
          if (r.landed && std::abs(*r.landing - alpha) < opt_.separation.cluster_tol) hits.push_back(r.angle);
        if (hits.size() >= 2) {
          std::sort(hits.begin(), hits.end());
          return {alpha, beta, hits};
        }
      }
    }
    throw Error(ErrorKind::no_alpha_pair, "no repelling fixed point carries two periodic rays of period <= " +
                                              std::to_string(opt_.alpha_max_period));
  }

  Level build_level(int depth) {
    Level lv;
    lv.depth = depth;
    lv.g = g0_ * std::pow(double(map_.d), -depth);
    std::set<Angle> angles(alpha_.angles.begin(), alpha_.angles.end());
    for (int k = 0; k < depth; ++k) {
      std::set<Angle> next;
      for (const auto& a : angles)
        for (auto& p : preimages(a, map_.d)) next.insert(p);
      angles = std::move(next);
    }
    lv.angles.assign(angles.begin(), angles.end());

    const auto rays = trace_rays(map_, lv.angles, opt_.separation.trace);
    std::vector<Complex> pts;
    for (const auto& r : rays) {
      detail::check_ray(r);
      pts.push_back(*r.landing);
      lv.rays.emplace(r.angle, r);
    }
    const auto cl = detail::single_linkage(pts, opt_.separation.cluster_tol);
    std::map<std::size_t, std::size_t> group_of;
    std::vector<Complex> sums;
    for (std::size_t i = 0; i < lv.angles.size(); ++i) {
      auto [it, fresh] = group_of.emplace(cl.label[i], lv.groups.size());
      if (fresh) {
        lv.groups.emplace_back();
        sums.emplace_back(0.0, 0.0);
      }
      lv.groups[it->second].push_back(lv.angles[i]);
      sums[it->second] += pts[i];
    }
    for (std::size_t g = 0; g < lv.groups.size(); ++g) lv.group_points.push_back(sums[g] / double(lv.groups[g].size()));

    // Cutting angles: members of groups with at least two rays.
    std::vector<Angle> cuts;
    std::map<Angle, std::pair<std::size_t, std::size_t>> where;  // angle -> (group, position)
    for (std::size_t g = 0; g < lv.groups.size(); ++g) {
      if (lv.groups[g].size() < 2) continue;
      for (std::size_t k = 0; k < lv.groups[g].size(); ++k) {
        cuts.push_back(lv.groups[g][k]);
        where[lv.groups[g][k]] = {g, k};
      }
    }
    std::sort(cuts.begin(), cuts.end());
    if (cuts.empty()) throw Error(ErrorKind::no_alpha_pair, "puzzle rays do not form any ray pair");

    std::map<Leaf, std::size_t> leaf_index;
    auto leaf_id = [&](const Angle& x, const Angle& y) {
      Leaf l(x, y);
      auto [it, fresh] = leaf_index.emplace(l, lv.leaves.size());
      if (fresh) lv.leaves.push_back(l);
      return it->second;
    };
    std::map<Angle, std::size_t> pos;
    for (std::size_t i = 0; i < cuts.size(); ++i) pos[cuts[i]] = i;

    // Walk arcs: after the arc ending at y, follow the chord to y's cyclic
    // predecessor in its group and continue with the arc leaving it.
    std::vector<char> seen(cuts.size(), 0);
    for (std::size_t start = 0; start < cuts.size(); ++start) {
      if (seen[start]) continue;
      Region reg;
      std::set<std::size_t> groups_touched;
      std::size_t i = start;
      while (!seen[i]) {
        seen[i] = 1;
        const Angle& x = cuts[i];
        const Angle& y = cuts[(i + 1) % cuts.size()];
        reg.arcs.emplace_back(x, y);
        const auto [g, k] = where.at(y);
        const auto& grp = lv.groups[g];
        const Angle& pred = grp[(k + grp.size() - 1) % grp.size()];
        reg.leaves.push_back(leaf_id(pred, y));
        groups_touched.insert(g);
        i = pos.at(pred);
      }
      std::sort(reg.leaves.begin(), reg.leaves.end());
      reg.leaves.erase(std::unique(reg.leaves.begin(), reg.leaves.end()), reg.leaves.end());
      reg.groups.assign(groups_touched.begin(), groups_touched.end());
      lv.regions.push_back(std::move(reg));
    }
    return lv;
  }

  double sample_diameter(const Level& lv, const Region& reg) {
    std::vector<Complex> pts;
    for (auto gi : reg.groups) pts.push_back(lv.group_points[gi]);
    for (auto li : reg.leaves) {
      for (const Angle* a : {&lv.leaves[li].a(), &lv.leaves[li].b()}) {
        const auto& ray = lv.rays.at(*a);
        for (const auto& p : ray.points)
          if (p.g <= lv.g * (1 + 1e-12)) pts.push_back(p.z);
      }
    }
    // Equipotential samples, spread over the arcs in proportion to length.
    std::vector<double> lens;
    double total = 0;
    for (const auto& [x, y] : reg.arcs) {
      auto len = y.value() - x.value();
      if (len <= 0) len += 1;
      lens.push_back(boost::rational_cast<double>(len));
      total += lens.back();
    }
    std::vector<Angle> sample_angles;
    for (std::size_t k = 0; k < reg.arcs.size(); ++k) {
      const auto parts = std::max<std::int64_t>(2, std::llround(opt_.equipotential_samples * lens[k] / total));
      for (std::int64_t j = 1; j < parts; ++j)
        sample_angles.push_back(detail::arc_point(reg.arcs[k].first, reg.arcs[k].second, j, parts));
    }
    std::vector<std::optional<Complex>> samples(sample_angles.size());
    TraceOptions topt = opt_.separation.trace;
    topt.stop_when_landed = false;
    parallel_for(
        sample_angles.size(),
        [&](std::size_t i) {
          const auto r = trace_ray_newton(map_, sample_angles[i], lv.depth, topt);
          if (!r.fail_reason && !r.points.empty()) samples[i] = r.points.back().z;
        },
        opt_.workers);
    for (const auto& s : samples)
      if (s) pts.push_back(*s);
    return diameter(pts);
  }

  Map map_;
  PuzzleOptions opt_;
  double g0_ = 0.0;
  AlphaFixedPoint alpha_;
  std::map<int, Level> levels_;
  std::map<std::pair<int, std::size_t>, SeparationCurve> curves_;
};

inline std::vector<PuzzlePiece> puzzle_build(const Map& m, int depth, const PuzzleOptions& opt = {}) {
  Puzzle p(m, opt);
  return p.pieces(depth);
}

inline std::vector<PuzzlePiece> puzzle_build(const Map& m, int depth, double g0) {
  PuzzleOptions opt;
  opt.g0 = g0;
  return puzzle_build(m, depth, opt);
}

/// Per-depth diameter bound of the puzzle piece containing z.
inline FiberDiagnostic fiber_diameter_bound(Puzzle& puzzle, Complex z, int max_depth, double shrink_ratio = 0.2) {
  if (max_depth < 0) throw Error(ErrorKind::invalid_argument, "max_depth must be non-negative");
  if (potential(puzzle.map(), z) >= puzzle.g0())
    throw Error(ErrorKind::invalid_argument, "target lies outside the puzzle equipotential");
  FiberDiagnostic diag;
  diag.target = z;
  double bound = INFINITY;
  for (int depth = 0; depth <= max_depth; ++depth) {
    const auto r = puzzle.locate(depth, z);
    const double raw = puzzle.piece(depth, r).sample_diameter;
    diag.raw.push_back(raw);
    bound = std::min(bound, raw);
    diag.bounds.emplace_back(depth, bound);
  }
  diag.verdict = diag.bounds.back().second < shrink_ratio * diag.bounds.front().second ? FiberVerdict::shrinking
                                                                                        : FiberVerdict::stalled;
  return diag;
}

inline FiberDiagnostic fiber_diameter_bound(const Map& m, Complex z, int max_depth, const PuzzleOptions& opt = {}) {
  Puzzle p(m, opt);
  return fiber_diameter_bound(p, z, max_depth);
}

// ---------------------------------------------------------------------------
// Branch census

struct CensusEntry {
  std::vector<Angle> angles;
  Complex point;
  std::size_t ray_count = 0;
  /// Every angle of the class is periodic or preperiodic.
  bool eventually_periodic = true;
};

struct CensusReport {
  std::vector<CensusEntry> entries;
  /// Set when a characteristic angle was supplied: the numerical partition
  /// equals the itinerary partition.
  std::optional<bool> combinatorial_agrees;
};

inline CensusReport branch_census(const Map& m, int max_den, std::optional<CharacteristicAngle> ca = std::nullopt,
                                  double tol = 1e-6, const TraceOptions& opt = {}) {
  if (max_den < 1) throw Error(ErrorKind::invalid_argument, "max_den must be positive");
  const auto angles = angles_up_to(max_den);
  const auto table = ray_pairs(m, angles, tol, opt);
  CensusReport rep;
  for (std::size_t k = 0; k < table.classes.size(); ++k) {
    const auto& cls = table.classes[k];
    if (cls.size() < 3) continue;
    CensusEntry e{cls, table.points[k], cls.size(), true};
    for (const auto& a : cls) {
      const auto info = orbit(a, m.d);
      // orbit() terminating with a repeat is the certificate.
      e.eventually_periodic = e.eventually_periodic && info.period >= 1 &&
                              times_d(info.orbit.back(), m.d) == info.periodic_entry();
    }
    rep.entries.push_back(std::move(e));
  }
  if (ca) {
    if (ca->d != m.d) throw Error(ErrorKind::invalid_argument, "characteristic angle degree differs from the map");
    rep.combinatorial_agrees = landing_classes(angles, *ca) == table.classes;
  }
  return rep;
}

}  // namespace fibers
