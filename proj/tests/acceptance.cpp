// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures.

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "fibers/puzzle.hpp"
#include "oracles.hpp"

using namespace fibers;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << o.detail << std::endl;
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

Outcome exact_orbits() {
  const auto t0 = Clock::now();
  const auto angles = angles_up_to(512);
  long bad = 0, checked = 0;
  for (int d : {2, 3})
    for (const auto& a : angles) {
      const auto info = orbit(a, d);
      const auto ref = oracle::brute_orbit(a.num(), a.den(), d);
      ++checked;
      if (info.preperiod != ref.preperiod || info.period != ref.period ||
          info.orbit.size() != static_cast<std::size_t>(ref.preperiod + ref.period))
        ++bad;
    }
  const double t = seconds_since(t0);
  return {bad == 0 && t < 5.0, std::to_string(checked) + " orbits, " + std::to_string(bad) + " mismatches, " + fmt(t) + " s"};
}

Outcome leaf_length_law() {
  std::mt19937_64 rng(20240611);
  long bad = 0, checked = 0;
  while (checked < 10000) {
    const int d = std::uniform_int_distribution<int>(2, 5)(rng);
    const std::int64_t q = std::uniform_int_distribution<std::int64_t>(2, 1000000)(rng);
    std::uniform_int_distribution<std::int64_t> pick(0, q - 1);
    const std::int64_t p1 = pick(rng), p2 = pick(rng);
    if (p1 == p2) continue;
    const Leaf leaf(Angle(p1, q), Angle(p2, q));
    const Length<std::int64_t> s = leaf.length();
    if (!(s < Length<std::int64_t>(1, d))) continue;
    ++checked;
    // Independent expectation from the numerators.
    const std::int64_t gap = std::min(std::abs(p1 - p2), q - std::abs(p1 - p2));
    const Length<std::int64_t> ds(d * gap, q);
    const auto expected = std::min(ds, Length<std::int64_t>(1) - ds);
    const auto image = leaf_image(leaf, d);
    if (!image || image->length() != expected) ++bad;
  }
  return {bad == 0, std::to_string(checked) + " leaves, " + std::to_string(bad) + " failures"};
}

Outcome no_wandering() {
  const auto t0 = Clock::now();
  long total = 0, wandering = 0, rule_failures = 0;
  long fates[4] = {0, 0, 0, 0};
  for (std::int64_t q = 3; q <= 63; ++q)
    for (std::int64_t j1 = 0; j1 < q; ++j1)
      for (std::int64_t j2 = j1 + 1; j2 < q; ++j2)
        for (std::int64_t j3 = j2 + 1; j3 < q; ++j3) {
          if (std::gcd(std::gcd(std::gcd(j1, j2), j3), q) != 1) continue;
          const Polygon tri({Angle(j1, q), Angle(j2, q), Angle(j3, q)});
          const long bound = triangle_step_bound(tri, 2);
          const auto rep = triangle_orbit(tri, 2, static_cast<int>(bound + 1));
          ++total;
          ++fates[static_cast<int>(rep.classification)];
          if (rep.classification == TriangleFate::exhausted) ++wandering;
          if (!wandering_report(tri, 2, static_cast<int>(bound + 1)).growth_rule_holds) ++rule_failures;
        }
  const double t = seconds_since(t0);
  std::string detail = std::to_string(total) + " triangles (periodic " + std::to_string(fates[0]) + ", preperiodic " +
                       std::to_string(fates[1]) + ", collapse " + std::to_string(fates[2]) + ", unclassified " +
                       std::to_string(wandering) + "), growth-rule failures " + std::to_string(rule_failures) + ", " +
                       fmt(t) + " s";
  return {wandering == 0 && rule_failures == 0 && t < 10.0, detail};
}

// Greedy packing over all grid triangles with vertices j/n, in lexicographic order.
long greedy_packing(double eps, std::int64_t n) {
  std::vector<Polygon> accepted;
  const Length<std::int64_t> min_gap(static_cast<std::int64_t>(std::llround(eps * 1000000)), 1000000);
  for (std::int64_t a = 0; a < n; ++a)
    for (std::int64_t b = a + 1; b < n; ++b)
      for (std::int64_t c = b + 1; c < n; ++c) {
        const Polygon tri({Angle(a, n), Angle(b, n), Angle(c, n)});
        const auto& v = tri.vertices();
        if (circ_dist(v[0], v[1]) < min_gap || circ_dist(v[1], v[2]) < min_gap || circ_dist(v[0], v[2]) < min_gap)
          continue;
        bool ok = true;
        for (const auto& other : accepted)
          if (other == tri || polygons_cross(other, tri)) {
            ok = false;
            break;
          }
        if (ok) accepted.push_back(tri);
      }
  return static_cast<long>(accepted.size());
}

Outcome packing() {
  bool pass = true;
  std::string detail;
  const std::pair<double, std::vector<std::int64_t>> cases[] = {
      {1.0 / 3, {3, 6, 12, 30}}, {1.0 / 6, {6, 12, 24, 60}}, {1.0 / 12, {12, 24, 48, 96}}};
  for (const auto& [eps, grids] : cases) {
    const long bound = packing_bound(eps);
    long best = 0;
    for (auto n : grids) best = std::max(best, greedy_packing(eps, n));
    pass = pass && best <= bound;
    detail += "eps=" + fmt(eps) + " greedy " + std::to_string(best) + " <= bound " + std::to_string(bound) + "; ";
  }
  const double err = std::abs(min_triangle_area(1.0 / 3) - 3.0 * std::sqrt(3.0) / 4.0);
  pass = pass && err < 1e-6;
  detail += "area(1/3) error " + fmt(err);
  return {pass, detail};
}

Outcome ray_oracles() {
  double worst_ms = 0, e0 = 0, e2 = 0, e1 = 0;
  int unlanded = 0;
  auto timed = [&](const Map& m, const Angle& a) {
    const auto t0 = Clock::now();
    auto r = trace_ray(m, a);
    worst_ms = std::max(worst_ms, 1000.0 * seconds_since(t0));
    if (!r.landed) ++unlanded;
    return r;
  };
  const Map zero(2, 0.0), cheb(2, -2.0), basilica(2, -1.0);
  for (int k = 0; k < 64; ++k) {
    const auto r = timed(zero, Angle(k, 64));
    e0 = std::max(e0, r.landing ? std::abs(*r.landing - std::polar(1.0, 2 * std::numbers::pi * k / 64)) : INFINITY);
  }
  int cheb_count = 0;
  for (const auto& a : angles_up_to(32)) {
    const auto r = timed(cheb, a);
    ++cheb_count;
    e2 = std::max(e2, r.landing ? std::abs(*r.landing - 2.0 * std::cos(2 * std::numbers::pi * a.to_double())) : INFINITY);
  }
  for (const Angle& a : {Angle(1, 3), Angle(2, 3)}) {
    const auto r = timed(basilica, a);
    e1 = std::max(e1, r.landing ? std::abs(*r.landing - oracle::basilica_alpha()) : INFINITY);
  }
  const bool pass = unlanded == 0 && e0 < 1e-6 && e2 < 1e-4 && e1 < 1e-6 && worst_ms < 100.0;
  return {pass, "c=0 max err " + fmt(e0) + "; c=-2 max err " + fmt(e2) + " over " + std::to_string(cheb_count) +
                    " angles; c=-1 max err " + fmt(e1) + "; unlanded " + std::to_string(unlanded) + "; slowest trace " +
                    fmt(worst_ms) + " ms"};
}

Outcome equivariance() {
  const auto angles = angles_up_to(63);
  bool pass = true;
  std::string detail;
  const std::pair<const char*, Complex> params[] = {{"-1", -1.0}, {"i", {0.0, 1.0}}, {"rabbit", oracle::c_rabbit()}};
  for (const auto& [name, c] : params) {
    const Map m(2, c);
    const auto rays = trace_rays(m, angles);
    std::map<Angle, Complex> land;
    for (const auto& r : rays)
      if (r.landed) land[r.angle] = *r.landing;
    double worst = 0;
    int pairs = 0;
    for (const auto& [a, z] : land) {
      auto it = land.find(times_d(a, 2));
      if (it == land.end()) continue;
      ++pairs;
      worst = std::max(worst, std::abs(m(z) - it->second));
    }
    pass = pass && worst < 1e-6;
    detail += std::string("c=") + name + " landed " + std::to_string(land.size()) + "/" + std::to_string(angles.size()) +
              " max " + fmt(worst) + "; ";
  }
  return {pass, detail};
}

Outcome cross_validation() {
  const auto angles = angles_up_to(63);
  const auto numeric = ray_pairs(Map(2, {0.0, 1.0}), angles);
  const auto combinatorial = landing_classes(angles, {Angle(1, 6), 2});
  const bool pass = numeric.classes == combinatorial;
  return {pass, std::to_string(numeric.classes.size()) + " numerical classes, " +
                    std::to_string(combinatorial.size()) + " combinatorial classes"};
}

Outcome census() {
  const auto rep = branch_census(Map(2, oracle::c_rabbit()), 127);
  bool found = false, periodic = true;
  for (const auto& e : rep.entries) {
    found = found || e.angles == std::vector<Angle>{Angle(1, 7), Angle(2, 7), Angle(4, 7)};
    periodic = periodic && e.eventually_periodic;
  }
  return {found && periodic && !rep.entries.empty(),
          std::to_string(rep.entries.size()) + " classes of size >= 3; {1/7,2/7,4/7} " + (found ? "found" : "missing") +
              "; all eventually periodic: " + (periodic ? "yes" : "no")};
}

Outcome fiber_shrinking() {
  const auto t0 = Clock::now();
  Puzzle p(Map(2, -1.0));
  const auto beta = fiber_diameter_bound(p, oracle::golden(), 10);
  const auto fatou = fiber_diameter_bound(p, 0.1, 10);
  const double t = seconds_since(t0);
  const double ratio = beta.bounds.back().second / beta.bounds.front().second;
  const bool pass = beta.verdict == FiberVerdict::shrinking && ratio < 0.2 && fatou.verdict == FiberVerdict::stalled &&
                    t < 30.0;
  return {pass, "beta ratio " + fmt(ratio) + " (" + std::string(to_string(beta.verdict)) + "), z=0.1 " +
                    std::string(to_string(fatou.verdict)) + " at " + fmt(fatou.bounds.back().second) + ", " + fmt(t) +
                    " s"};
}

Outcome impression_trend() {
  const Map m(2, -1.0);
  std::vector<double> diam;
  int failed = 0;
  for (double e : {1e-2, 1e-3, 1e-4}) {
    const auto s = impression_sample(m, Angle(1, 3), e, e);
    diam.push_back(s.diameter);
    failed += static_cast<int>(s.failed);
  }
  bool pass = true;
  for (std::size_t k = 1; k < diam.size(); ++k) pass = pass && diam[k] <= 1.1 * diam[k - 1];
  return {pass, "diameters " + fmt(diam[0]) + ", " + fmt(diam[1]) + ", " + fmt(diam[2]) + "; failed rays " +
                    std::to_string(failed)};
}

std::pair<int, std::string> run(const std::string& args) {
  const std::string cmd = std::string(FIBERS_CLI_PATH) + " " + args + " 2>&1";
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, out};
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

Outcome determinism() {
  const std::vector<std::string> commands = {
      "orbit --angle 5/24 --json",
      "trace --c=-1 --angles 1/3,2/3,1/6 --json",
      "pairs --c=-0.122561+0.744862i --max-den 15 --json",
      "itinerary --theta-v 1/6 --angles 1/7,3/7,1/12 --json",
      "wandering --triangle 1/7,2/7,4/7 --json",
      "puzzle --c=-1 --depth 3 --json",
      "puzzle --c=-1 --depth 4 --target 1.618034 --json",
      "impression --c=-1 --angle 1/3 --eps 1e-3 --json",
      "census --c=-0.122561+0.744862i --max-den 31 --theta-v 1/7 --json",
      "render --c=-1 --resolution 64 --angles 1/3,2/3 --leaves 1/6-5/6 --depth 1",
  };
  int differing = 0, errors = 0;
  std::string which;
  for (const auto& c : commands) {
    const auto a = run(c), b = run(c), w = run(c + " --workers 1");
    if (a.first != 0) ++errors;
    if (a != b || a != w) {
      ++differing;
      which += " [" + c + "]";
    }
  }
  return {differing == 0 && errors == 0, std::to_string(commands.size()) + " commands, " + std::to_string(differing) +
                                             " nondeterministic, " + std::to_string(errors) + " errors" + which};
}

}  // namespace

int main() {
  report(1, "exact orbits", exact_orbits);
  report(2, "leaf length law", leaf_length_law);
  report(3, "no wandering triangles", no_wandering);
  report(4, "packing bound", packing);
  report(5, "ray tracer oracles", ray_oracles);
  report(6, "equivariance", equivariance);
  report(7, "combinatorial vs numerical classes", cross_validation);
  report(8, "branch census", census);
  report(9, "fiber shrinking", fiber_shrinking);
  report(10, "impression trend", impression_trend);
  report(11, "CLI determinism", determinism);
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
