#pragma once

// Numerical dynamics of f_c(z) = z^d + c: Green's potential, external rays,
// landing, ray-pair clustering, impressions and periodic points.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fibers/angle.hpp"
#include "fibers/parallel.hpp"

namespace fibers {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline Complex unit(double turns) { return std::polar(1.0, kTwoPi * turns); }

/// Unicritical polynomial z^d + c.
struct Map {
  int d = 2;
  Complex c{0.0, 0.0};

  Map() = default;
  Map(int degree, Complex param) : d(degree), c(param) {
    if (d < 2) throw Error(ErrorKind::invalid_argument, "degree must be at least 2");
  }

  Complex operator()(Complex z) const { return power(z) + c; }
  Complex derivative(Complex z) const { return double(d) * power_minus_one(z); }

  Complex power(Complex z) const {
    Complex out = z;
    for (int k = 1; k < d; ++k) out *= z;
    return out;
  }
  Complex power_minus_one(Complex z) const {
    Complex out(1.0, 0.0);
    for (int k = 1; k < d; ++k) out *= z;
    return out;
  }

  /// max(2, |c|^(1/(d-1)) + 1); every orbit leaving this disk escapes.
  double escape_radius() const {
    return std::max(2.0, std::pow(std::abs(c), 1.0 / (d - 1)) + 1.0);
  }
  double default_g0() const { return std::log(escape_radius()); }

  /// The d roots of f(z) = w, as rotations of one root.
  std::vector<Complex> preimages(Complex w) const {
    const Complex r = std::pow(w - c, 1.0 / d);
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) out.push_back(r * unit(double(k) / d));
    return out;
  }
};

/// Green's potential G(z) = lim d^-n log|f^n(z)|; 0 when z does not escape
/// within `max_iter` iterations.
inline double potential(const Map& m, Complex z, int max_iter = 4096) {
  const double bailout = std::min(1e30, std::pow(10.0, 250.0 / m.d));
  const double log_d = std::log(double(m.d));
  for (int n = 0; n <= max_iter; ++n) {
    const double r = std::abs(z);
    if (r > bailout) return std::exp(std::log(std::log(r)) - n * log_d);
    if (n == max_iter) break;
    z = m(z);
  }
  return 0.0;
}

/// Number of iterations before |f^n(z)| exceeds the escape radius, or
/// max_iter when it never does.
inline int escape_time(const Map& m, Complex z, int max_iter) {
  const double r2 = m.escape_radius() * m.escape_radius();
  for (int n = 0; n < max_iter; ++n) {
    if (std::norm(z) > r2) return n;
    z = m(z);
  }
  return max_iter;
}

// ---------------------------------------------------------------------------
// External rays

struct TraceOptions {
  /// Start potential; <= 0 selects log(escape radius).
  double g0 = 0.0;
  /// Recorded levels G0 / d^k, k = 0..depth.
  int depth = 400;
  /// Intermediate potentials per level used for branch tracking.
  int substeps = 8;
  double landing_tol = 1e-9;
  int landing_run = 3;
  double newton_tol = 1e-12;
  int newton_cap = 64;
  double continuity_factor = 10.0;
  /// Continuity floor while the potential is above G0 / d.
  double continuity_floor = 1e-3;
  /// Candidate separations below this are treated as the same root.
  double noise_floor = 1e-7;
  /// The runner-up root is ambiguous when within this factor of the best.
  double ambiguity_ratio = 4.0;
  /// The Boettcher inverse solves f^N(z) = exp(d^N (G + 2 pi i theta)) with
  /// d^N G at least this large.
  double far_potential = 24.0;
  /// Potential above which points are seeded directly by Boettcher inversion.
  double seed_potential = 2.0;
  /// Stop tracing each ray once it has landed.
  bool stop_when_landed = true;
};

enum class TraceFailure { branch_ambiguity, step_discontinuity, no_convergence };

inline std::string_view to_string(TraceFailure f) {
  switch (f) {
    case TraceFailure::branch_ambiguity: return "branch-ambiguity";
    case TraceFailure::step_discontinuity: return "step-discontinuity";
    case TraceFailure::no_convergence: return "no-convergence";
  }
  return "?";
}

struct RayPoint {
  Complex z;
  double g = 0.0;
};

struct TracedRay {
  Angle angle;
  /// Points at potentials G0 / d^k with strictly decreasing potential.
  std::vector<RayPoint> points;
  bool landed = false;
  std::optional<Complex> landing;
  std::optional<TraceFailure> fail_reason;
};

namespace detail {

struct Candidate {
  Complex z;
  std::optional<TraceFailure> failure;
};

// Picks among the rotations of `root` the continuation of `prev`.
inline Candidate choose_branch(const Map& m, Complex root, Complex prev, double prev_step, bool high,
                               const TraceOptions& opt) {
  double d1 = INFINITY, d2 = INFINITY;
  Complex best = root;
  for (int k = 0; k < m.d; ++k) {
    const Complex cand = root * unit(double(k) / m.d);
    const double dist = std::abs(cand - prev);
    if (dist < d1) {
      d2 = d1;
      d1 = dist;
      best = cand;
    } else if (dist < d2) {
      d2 = dist;
    }
  }
  double thr = std::max(opt.continuity_factor * prev_step, opt.noise_floor);
  if (high) thr = std::max(thr, opt.continuity_floor);
  if (d1 > thr) return {best, TraceFailure::step_discontinuity};
  if (d2 <= thr && d2 > opt.noise_floor && d2 < opt.ambiguity_ratio * d1)
    return {best, TraceFailure::branch_ambiguity};
  return {best, std::nullopt};
}

// Newton solve of f^n(z) = target seeded at `seed`.
inline std::optional<Complex> newton_iterate(const Map& m, int n, Complex target, Complex seed,
                                             const TraceOptions& opt) {
  Complex z = seed;
  for (int it = 0; it < opt.newton_cap; ++it) {
    Complex w = z;
    Complex dw(1.0, 0.0);
    for (int k = 0; k < n; ++k) {
      dw = m.derivative(w) * dw;
      w = m(w);
    }
    if (!std::isfinite(std::abs(w)) || std::abs(dw) == 0.0) return std::nullopt;
    const Complex step = (w - target) / dw;
    z -= step;
    if (!std::isfinite(std::abs(z))) return std::nullopt;
    if (std::abs(step) <= opt.newton_tol * std::max(1.0, std::abs(z))) return z;
  }
  return std::nullopt;
}

// Iterates of an angle under multiplication by d, grown on demand.
class AngleOrbitCache {
 public:
  AngleOrbitCache(Angle start, int d) : d_(d) { seq_.push_back(start); }
  const Angle& at(int n) {
    while (static_cast<int>(seq_.size()) <= n) seq_.push_back(times_d(seq_.back(), d_));
    return seq_[static_cast<std::size_t>(n)];
  }

 private:
  int d_;
  std::vector<Angle> seq_;
};

// Point with Boettcher coordinate exp(g + 2 pi i theta): solves
// f^N(z) = exp(d^N g + 2 pi i d^N theta), seeded by the two-term asymptotic
// z ~ w - c / (d w^(d-1)) or by `seed` when provided.
inline std::optional<Complex> boettcher_point(const Map& m, AngleOrbitCache& orbit, double g,
                                              std::optional<Complex> seed, const TraceOptions& opt) {
  int n = 0;
  double scaled = g;
  while (scaled < opt.far_potential) {
    scaled *= m.d;
    ++n;
  }
  const Complex target = std::exp(scaled) * unit(orbit.at(n).to_double());
  Complex z0;
  if (seed) {
    z0 = *seed;
  } else {
    const Complex w = std::exp(g) * unit(orbit.at(0).to_double());
    z0 = w - m.c / (double(m.d) * m.power_minus_one(w));
  }
  if (n == 0) return target;
  return newton_iterate(m, n, target, z0, opt);
}

inline double level_potential(double g0, int d, long t, int substeps) {
  return g0 * std::pow(double(d), -double(t) / substeps);
}

// Cauchy landing bookkeeping for one ray.
struct LandingState {
  int run = 0;
  void record(TracedRay& ray, Complex z, double g, const TraceOptions& opt) {
    if (!ray.points.empty()) {
      const double step = std::abs(z - ray.points.back().z);
      run = step < opt.landing_tol ? run + 1 : 0;
    }
    ray.points.push_back({z, g});
    if (run >= opt.landing_run) {
      ray.landed = true;
      ray.landing = z;
    }
  }
};

}  // namespace detail

/// Traces a ray by Newton continuation along potentials G0 d^(-t/S). Works
/// for any rational angle whatever the length of its orbit; the cost grows
/// quadratically in `levels`.
inline TracedRay trace_ray_newton(const Map& m, const Angle& theta, int levels, const TraceOptions& opt) {
  const double g0 = opt.g0 > 0 ? opt.g0 : m.default_g0();
  const int s = std::max(1, opt.substeps);
  TracedRay ray;
  ray.angle = theta;
  detail::AngleOrbitCache orbit(theta, m.d);
  detail::LandingState landing;

  std::optional<Complex> prev;
  double prev_step = INFINITY;
  const long t_end = static_cast<long>(levels) * s;
  // Start a few substeps above G0 so the first recorded point has a history.
  for (long t = -s; t <= t_end; ++t) {
    const double g = detail::level_potential(g0, m.d, t, s);
    auto z = detail::boettcher_point(m, orbit, g, prev, opt);
    if (!z) {
      ray.fail_reason = TraceFailure::no_convergence;
      return ray;
    }
    if (prev) {
      const auto pick = detail::choose_branch(m, *z, *prev, prev_step, t < s, opt);
      if (pick.failure) {
        ray.fail_reason = pick.failure;
        return ray;
      }
      prev_step = std::abs(pick.z - *prev);
      z = pick.z;
    }
    prev = z;
    if (t >= 0 && t % s == 0) {
      landing.record(ray, *z, g, opt);
      if (ray.landed && opt.stop_when_landed) return ray;
    }
  }
  return ray;
}

/// Traces every ray of `angles` together with the forward orbits of their
/// angles. Points on the ray at theta are pulled back from the ray at
/// d*theta one level higher, choosing the preimage branch that continues
/// the previous substep; the first band of substeps is seeded by Boettcher
/// inversion. Landing is declared by the Cauchy criterion on recorded
/// levels. Results are returned in the order of `angles`.
inline std::vector<TracedRay> trace_rays(const Map& m, std::span<const Angle> angles, const TraceOptions& opt = {}) {
  const double g0 = opt.g0 > 0 ? opt.g0 : m.default_g0();
  if (!(g0 > 0)) throw Error(ErrorKind::invalid_argument, "start potential must be positive");
  if (opt.depth < 1) throw Error(ErrorKind::invalid_argument, "depth must be at least 1");
  const int s = std::max(1, opt.substeps);
  const int d = m.d;

  // Forward closure of the requested angles.
  std::vector<Angle> nodes;
  std::unordered_map<Angle, std::size_t, AngleHash<std::int64_t>> index;
  std::vector<std::size_t> requested;
  auto intern = [&](const Angle& a) {
    auto [it, fresh] = index.emplace(a, nodes.size());
    if (fresh) nodes.push_back(a);
    return it->second;
  };
  for (const auto& a : angles) {
    requested.push_back(intern(a));
  }
  std::vector<std::size_t> image;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto j = intern(times_d(nodes[i], d));
    image.push_back(j);
  }
  const std::size_t n = nodes.size();

  // Seeding band: potentials >= seed_potential (or the first level when G0
  // already exceeds it).
  long t0 = 0;
  while (detail::level_potential(g0, d, t0, s) < opt.seed_potential) t0 -= s;

  std::vector<TracedRay> rays(n);
  std::vector<detail::LandingState> states(n);
  std::vector<char> needed(n, 0), done(n, 0);
  for (std::size_t i = 0; i < n; ++i) rays[i].angle = nodes[i];
  for (auto r : requested) needed[r] = 1;

  // ring[t mod s] holds the points at substep t for every node.
  std::vector<std::vector<Complex>> ring(static_cast<std::size_t>(s), std::vector<Complex>(n));
  std::vector<double> last_step(n, INFINITY);
  std::vector<char> broken(n, 0);
  auto slot = [&](long t) -> std::vector<Complex>& { return ring[static_cast<std::size_t>(((t % s) + s) % s)]; };

  const long t_end = static_cast<long>(opt.depth) * s;
  std::vector<Complex> next(n);
  for (long t = t0; t <= t_end; ++t) {
    const double g = detail::level_potential(g0, d, t, s);
    if (t < t0 + s) {
      for (std::size_t i = 0; i < n; ++i) {
        detail::AngleOrbitCache orbit(nodes[i], d);
        std::optional<Complex> seed;
        if (t > t0) seed = slot(t - 1)[i];
        auto z = detail::boettcher_point(m, orbit, g, seed, opt);
        if (!z) {
          broken[i] = 1;
          rays[i].fail_reason = TraceFailure::no_convergence;
          next[i] = Complex(NAN, NAN);
          continue;
        }
        next[i] = *z;
        if (t > t0) last_step[i] = std::abs(*z - slot(t - 1)[i]);
      }
    } else {
      const auto& above = slot(t - s);
      const auto& prev = slot(t - 1);
      for (std::size_t i = 0; i < n; ++i) {
        if (broken[i] || broken[image[i]]) {
          if (!broken[i]) {
            broken[i] = 1;
            rays[i].fail_reason = rays[image[i]].fail_reason;
          }
          next[i] = Complex(NAN, NAN);
          continue;
        }
        const Complex root = std::pow(above[image[i]] - m.c, 1.0 / d);
        const auto pick = detail::choose_branch(m, root, prev[i], last_step[i], t < s, opt);
        if (pick.failure) {
          broken[i] = 1;
          rays[i].fail_reason = pick.failure;
          next[i] = Complex(NAN, NAN);
          continue;
        }
        last_step[i] = std::abs(pick.z - prev[i]);
        next[i] = pick.z;
      }
    }
    slot(t) = next;

    if (t >= 0 && t % s == 0) {
      bool all_done = true;
      for (std::size_t i = 0; i < n; ++i) {
        if (!done[i] && !broken[i]) {
          states[i].record(rays[i], next[i], g, opt);
          if (rays[i].landed) done[i] = 1;
        }
        if (needed[i] && !done[i] && !broken[i]) all_done = false;
      }
      if (all_done && opt.stop_when_landed) break;
    }
  }

  std::vector<TracedRay> out;
  out.reserve(requested.size());
  for (auto r : requested) out.push_back(rays[r]);
  return out;
}

inline TracedRay trace_ray(const Map& m, const Angle& theta, const TraceOptions& opt = {}) {
  const Angle one[] = {theta};
  return trace_rays(m, one, opt).front();
}

// ---------------------------------------------------------------------------
// Ray pairs

enum class Provenance { numerical, combinatorial };

struct LandingTable {
  Map map;
  std::vector<Angle> angles;
  /// Classes sorted internally and ordered by smallest angle.
  std::vector<std::vector<Angle>> classes;
  /// Mean landing point of each class (numerical provenance only).
  std::vector<Complex> points;
  double tol = 1e-6;
  Provenance provenance = Provenance::numerical;
};

namespace detail {

struct Clustering {
  std::vector<std::size_t> label;
  double min_gap = INFINITY;
};

// Single-linkage clustering at threshold tol; min_gap is the smallest
// distance between points in different clusters.
inline Clustering single_linkage(const std::vector<Complex>& pts, double tol) {
  const std::size_t n = pts.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    return pts[a].real() < pts[b].real() || (pts[a].real() == pts[b].real() && a < b);
  });
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  // Candidate pairs within 2 tol, by a sweep over the real axis.
  std::vector<std::pair<std::size_t, std::size_t>> close;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const auto i = order[a], j = order[b];
      if (pts[j].real() - pts[i].real() >= 2 * tol) break;
      const double dist = std::abs(pts[i] - pts[j]);
      if (dist < tol) parent[find(i)] = find(j);
      if (dist < 2 * tol) close.emplace_back(i, j);
    }
  }
  Clustering out;
  out.label.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.label[i] = find(i);
  for (auto [i, j] : close)
    if (out.label[i] != out.label[j]) out.min_gap = std::min(out.min_gap, std::abs(pts[i] - pts[j]));
  return out;
}

}  // namespace detail

/// Groups angles whose rays land together, by single-linkage clustering of
/// landing points at threshold tol.
inline LandingTable ray_pairs(const Map& m, std::vector<Angle> angles, double tol = 1e-6,
                              const TraceOptions& opt = {}) {
  std::sort(angles.begin(), angles.end());
  angles.erase(std::unique(angles.begin(), angles.end()), angles.end());
  const auto rays = trace_rays(m, angles, opt);
  std::vector<Complex> pts;
  std::string unlanded;
  for (const auto& r : rays) {
    if (!r.landed) {
      unlanded += (unlanded.empty() ? "" : ",") + r.angle.str();
      continue;
    }
    pts.push_back(*r.landing);
  }
  if (!unlanded.empty()) throw Error(ErrorKind::unlanded_ray, "rays did not land: " + unlanded);

  const auto cl = detail::single_linkage(pts, tol);
  if (cl.min_gap < 2 * tol)
    throw Error(ErrorKind::ambiguous_clustering,
                "two landing clusters are " + std::to_string(cl.min_gap) + " apart (tol " + std::to_string(tol) + ")");

  std::map<std::size_t, std::size_t> class_of;
  LandingTable table;
  table.map = m;
  table.angles = angles;
  table.tol = tol;
  std::vector<Complex> sums;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    auto [it, fresh] = class_of.emplace(cl.label[i], table.classes.size());
    if (fresh) {
      table.classes.emplace_back();
      sums.emplace_back(0.0, 0.0);
    }
    table.classes[it->second].push_back(angles[i]);
    sums[it->second] += pts[i];
  }
  for (std::size_t k = 0; k < sums.size(); ++k)
    table.points.push_back(sums[k] / double(table.classes[k].size()));
  return table;
}

// ---------------------------------------------------------------------------
// Impressions

struct ImpressionOptions {
  int n_angles = 33;
  /// Levels traced past the first level below delta.
  int extra_levels = 40;
  /// Levels below this potential are not traced: double precision cannot
  /// resolve ray points much deeper.
  double min_potential = 1e-10;
  unsigned workers = 0;
};

struct ImpressionSample {
  std::vector<Angle> angles;
  std::vector<Complex> cloud;
  double diameter = 0.0;
  int failed = 0;
  bool partial = false;
};

inline double diameter(std::span<const Complex> pts) {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, std::abs(pts[i] - pts[j]));
  return best;
}

/// Angles theta + k/D spread evenly over the open window of radius eps.
inline std::vector<Angle> window_angles(const Angle& theta, double eps, int count) {
  constexpr std::int64_t D = std::int64_t(1) << 36;
  std::vector<Angle> out;
  if (count <= 1) return {theta};
  for (int j = 0; j < count; ++j) {
    const double u = 2.0 * j / (count - 1) - 1.0;
    const auto k = static_cast<std::int64_t>(std::trunc(u * eps * double(D) * (1.0 - 1e-9)));
    out.emplace_back(detail::checked_add(detail::checked_mul(theta.num(), D), detail::checked_mul(k, theta.den())),
                     detail::checked_mul(theta.den(), D));
  }
  return out;
}

/// Samples rays whose angles are within eps of theta and collects their
/// points of potential below delta, with the cloud diameter.
inline ImpressionSample impression_sample(const Map& m, const Angle& theta, double eps, double delta,
                                          const ImpressionOptions& iopt = {}, const TraceOptions& opt = {}) {
  if (!(eps > 0) || !(delta > 0)) throw Error(ErrorKind::invalid_argument, "eps and delta must be positive");
  if (eps >= 0.5) throw Error(ErrorKind::invalid_argument, "eps must be below 1/2");
  ImpressionSample out;
  out.angles = window_angles(theta, eps, iopt.n_angles);
  const double g0 = opt.g0 > 0 ? opt.g0 : m.default_g0();
  int below = 0;
  while (g0 * std::pow(double(m.d), -below) >= delta) ++below;
  int levels = below + iopt.extra_levels;
  while (levels > below && g0 * std::pow(double(m.d), -levels) < iopt.min_potential) --levels;

  TraceOptions topt = opt;
  topt.stop_when_landed = false;
  std::vector<TracedRay> rays(out.angles.size());
  parallel_for(out.angles.size(), [&](std::size_t i) { rays[i] = trace_ray_newton(m, out.angles[i], levels, topt); },
               iopt.workers);
  for (const auto& r : rays) {
    if (r.fail_reason) {
      ++out.failed;
      out.partial = true;
    }
    for (const auto& p : r.points)
      if (p.g < delta) out.cloud.push_back(p.z);
  }
  out.diameter = diameter(out.cloud);
  return out;
}

// ---------------------------------------------------------------------------
// Periodic points

enum class PointKind { repelling, attracting, indifferent, superattracting };

inline std::string_view to_string(PointKind k) {
  switch (k) {
    case PointKind::repelling: return "repelling";
    case PointKind::attracting: return "attracting";
    case PointKind::indifferent: return "indifferent";
    case PointKind::superattracting: return "superattracting";
  }
  return "?";
}

struct PeriodicPointRec {
  Complex z;
  int period = 1;
  Complex multiplier;
  PointKind kind = PointKind::repelling;
  /// Points of one cycle share this index.
  int cycle = 0;
};

struct PeriodicPointOptions {
  int max_iter = 2000;
  double tol = 1e-13;
  double root_tol = 1e-8;
  double classify_tol = 1e-6;
  double superattracting_tol = 1e-9;
  /// Largest admissible degree d^n.
  long max_degree = 4096;
};

struct PeriodicPoints {
  std::vector<PeriodicPointRec> points;
  bool converged = true;
  int iterations = 0;
};

namespace detail {

// m * 2^e with |m| in [0.5, 1) or m = 0; lets f^n(z) - z be evaluated far
// outside the Julia set without overflow.
struct Scaled {
  Complex m;
  long e = 0;

  static Scaled of(Complex z) {
    Scaled s{z, 0};
    s.normalize();
    return s;
  }
  void normalize() {
    const double a = std::max(std::abs(m.real()), std::abs(m.imag()));
    if (a == 0.0 || !std::isfinite(a)) return;
    int ex = 0;
    std::frexp(a, &ex);
    m = Complex(std::ldexp(m.real(), -ex), std::ldexp(m.imag(), -ex));
    e += ex;
  }
  Scaled& operator*=(const Scaled& o) {
    m *= o.m;
    e += o.e;
    normalize();
    return *this;
  }
  Scaled add(Complex w) const {
    if (e > 1000) return *this;
    if (e < -1000) return of(w);
    return of(Complex(std::ldexp(m.real(), int(e)), std::ldexp(m.imag(), int(e))) + w);
  }
  Complex ratio(const Scaled& o) const {
    const long ex = std::clamp<long>(e - o.e, -1000, 1000);
    const Complex q = m / o.m;
    return Complex(std::ldexp(q.real(), int(ex)), std::ldexp(q.imag(), int(ex)));
  }
};

inline Scaled fn_minus_z(const Map& m, int n, Complex z) {
  Scaled w = Scaled::of(z);
  for (int k = 0; k < n; ++k) {
    Scaled p = w;
    for (int j = 1; j < m.d; ++j) p *= w;
    w = p.add(m.c);
  }
  return w.add(-z);
}

}  // namespace detail

/// All solutions of f^n(z) = z by Durand-Kerner simultaneous iteration on
/// the degree-d^n polynomial f^n(z) - z (evaluated through the iteration,
/// not through expanded coefficients), Newton-polished and grouped into
/// cycles with exact period and multiplier.
inline PeriodicPoints periodic_points(const Map& m, int n, const PeriodicPointOptions& opt = {}) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "period must be at least 1");
  const double deg_d = std::pow(double(m.d), n);
  if (deg_d > double(opt.max_degree))
    throw Error(ErrorKind::invalid_argument, "d^n exceeds the root-finding cap");
  const auto N = static_cast<std::size_t>(std::llround(deg_d));

  PeriodicPoints out;
  std::vector<Complex> z(N);
  const double r = 1.1 * m.escape_radius();
  for (std::size_t k = 0; k < N; ++k) z[k] = r * unit((double(k) + 0.25) / double(N));

  int it = 0;
  for (; it < opt.max_iter; ++it) {
    double worst = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      const auto num = detail::fn_minus_z(m, n, z[k]);
      detail::Scaled den = detail::Scaled::of(Complex(1.0, 0.0));
      for (std::size_t j = 0; j < N; ++j)
        if (j != k) den *= detail::Scaled::of(z[k] - z[j]);
      if (den.m == Complex(0.0, 0.0)) {
        z[k] += Complex(1e-10, 1e-10);
        worst = INFINITY;
        continue;
      }
      const Complex delta = num.ratio(den);
      z[k] -= delta;
      worst = std::max(worst, std::abs(delta) / std::max(1.0, std::abs(z[k])));
    }
    if (worst < opt.tol) break;
  }
  out.iterations = it;
  out.converged = it < opt.max_iter;

  // Newton polish on f^n(z) - z.
  for (auto& zk : z) {
    for (int k = 0; k < 8; ++k) {
      Complex w = zk, dw(1.0, 0.0);
      for (int j = 0; j < n; ++j) {
        dw = m.derivative(w) * dw;
        w = m(w);
      }
      const Complex g = dw - 1.0;
      if (std::abs(g) == 0.0) break;
      const Complex step = (w - zk) / g;
      if (!std::isfinite(std::abs(step))) break;
      zk -= step;
      if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(zk))) break;
    }
  }

  std::vector<char> used(N, 0);
  int cycle_id = 0;
  for (std::size_t k = 0; k < N; ++k) {
    if (used[k]) continue;
    int period = n;
    for (int p = 1; p <= n; ++p) {
      if (n % p) continue;
      Complex w = z[k];
      for (int j = 0; j < p; ++j) w = m(w);
      if (std::abs(w - z[k]) < opt.root_tol * std::max(1.0, std::abs(z[k]))) {
        period = p;
        break;
      }
    }
    Complex mult(1.0, 0.0);
    std::vector<Complex> cyc;
    Complex w = z[k];
    for (int j = 0; j < period; ++j) {
      cyc.push_back(w);
      mult *= m.derivative(w);
      w = m(w);
    }
    PointKind kind;
    const double a = std::abs(mult);
    if (a < opt.superattracting_tol) kind = PointKind::superattracting;
    else if (a < 1.0 - opt.classify_tol) kind = PointKind::attracting;
    else if (a > 1.0 + opt.classify_tol) kind = PointKind::repelling;
    else kind = PointKind::indifferent;
    for (const auto& pt : cyc) {
      // Claim the nearest unused root for each orbit point.
      std::size_t best = N;
      double best_d = INFINITY;
      for (std::size_t j = 0; j < N; ++j) {
        if (used[j]) continue;
        const double dist = std::abs(z[j] - pt);
        if (dist < best_d) {
          best_d = dist;
          best = j;
        }
      }
      if (best == N) break;
      used[best] = 1;
      out.points.push_back({z[best], period, mult, kind, cycle_id});
    }
    ++cycle_id;
  }
  return out;
}

}  // namespace fibers
