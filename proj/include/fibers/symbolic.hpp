#pragma once

// Itineraries of external angles relative to the partition cut by the d
// rays landing at the critical point (the preimages of a ray landing at the
// critical value). For a locally connected Julia set without interior this
// decides which rational rays land together; for other parameters the
// equivalence is purely formal and callers must supply that hypothesis.

#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "fibers/angle.hpp"

namespace fibers {

struct CharacteristicAngle {
  Angle theta_v;
  int d = 2;
};

/// Symbol value used for a boundary hit.
inline constexpr int kStar = -1;

/// Eventually periodic symbol sequence in reduced normal form.
struct Itinerary {
  std::vector<int> preperiod;
  std::vector<int> period;

  int at(std::size_t n) const {
    if (n < preperiod.size()) return preperiod[n];
    return period[(n - preperiod.size()) % period.size()];
  }

  bool has_star() const {
    auto star = [](int s) { return s == kStar; };
    return std::any_of(preperiod.begin(), preperiod.end(), star) ||
           std::any_of(period.begin(), period.end(), star);
  }

  /// "s0 s1 (p0 p1)∞", stars rendered as "*".
  std::string str() const {
    auto sym = [](int s) { return s == kStar ? std::string("*") : std::to_string(s); };
    std::string out;
    for (int s : preperiod) out += sym(s) + " ";
    out += "(";
    for (std::size_t i = 0; i < period.size(); ++i) {
      if (i) out += " ";
      out += sym(period[i]);
    }
    out += ")∞";
    return out;
  }

  friend bool operator==(const Itinerary&, const Itinerary&) = default;
  friend auto operator<=>(const Itinerary&, const Itinerary&) = default;
};

/// The d preimages of theta_v, sorted.
inline std::vector<Angle> partition_boundaries(const CharacteristicAngle& ca) {
  return preimages(ca.theta_v, ca.d);
}

namespace detail {

// Arc j runs from boundary j to boundary j+1 (cyclically). Returns the
// index of the arc strictly containing x, or -1 when x is a boundary.
inline int raw_arc_index(const std::vector<Angle>& bounds, const Angle& x) {
  const auto it = std::lower_bound(bounds.begin(), bounds.end(), x);
  if (it != bounds.end() && *it == x) return -1;
  const auto k = static_cast<int>(it - bounds.begin());
  return k == 0 ? static_cast<int>(bounds.size()) - 1 : k - 1;
}

}  // namespace detail

/// Labelling: arc 0 starts at the boundary angle at or immediately
/// clockwise of theta_v; labels increase counterclockwise.
class ArcLabeling {
 public:
  explicit ArcLabeling(const CharacteristicAngle& ca) : d_(ca.d), bounds_(partition_boundaries(ca)) {
    const auto it = std::upper_bound(bounds_.begin(), bounds_.end(), ca.theta_v);
    origin_ = it == bounds_.begin() ? d_ - 1 : static_cast<int>(it - bounds_.begin()) - 1;
  }

  /// Rotates the labelling by `shift`; used to check labelling independence.
  ArcLabeling rotated(int shift) const {
    ArcLabeling copy = *this;
    copy.origin_ = ((origin_ + shift) % d_ + d_) % d_;
    return copy;
  }

  int symbol(const Angle& x) const {
    const int raw = detail::raw_arc_index(bounds_, x);
    if (raw < 0) return kStar;
    return ((raw - origin_) % d_ + d_) % d_;
  }

  int degree() const { return d_; }
  const std::vector<Angle>& boundaries() const { return bounds_; }

 private:
  int d_;
  std::vector<Angle> bounds_;
  int origin_ = 0;
};

namespace detail {

inline Itinerary normalize(std::vector<int> pre, std::vector<int> per) {
  // Shortest period.
  const std::size_t n = per.size();
  for (std::size_t p = 1; p <= n; ++p) {
    if (n % p) continue;
    bool ok = true;
    for (std::size_t i = p; i < n && ok; ++i) ok = per[i] == per[i - p];
    if (ok) {
      per.resize(p);
      break;
    }
  }
  // Roll the period back over matching preperiod symbols.
  while (!pre.empty() && pre.back() == per.back()) {
    pre.pop_back();
    std::rotate(per.rbegin(), per.rbegin() + 1, per.rend());
  }
  return Itinerary{std::move(pre), std::move(per)};
}

}  // namespace detail

inline Itinerary itinerary(const Angle& phi, const ArcLabeling& labels) {
  const auto info = orbit(phi, labels.degree());
  std::vector<int> pre, per;
  for (std::size_t i = 0; i < info.orbit.size(); ++i)
    (static_cast<int>(i) < info.preperiod ? pre : per).push_back(labels.symbol(info.orbit[i]));
  return detail::normalize(std::move(pre), std::move(per));
}

inline Itinerary itinerary(const Angle& phi, const CharacteristicAngle& ca) {
  return itinerary(phi, ArcLabeling(ca));
}

/// Wildcard match: a star matches any symbol.
inline bool itineraries_match(const Itinerary& x, const Itinerary& y) {
  const std::size_t horizon = std::max(x.preperiod.size(), y.preperiod.size()) +
                              std::lcm(x.period.size(), y.period.size());
  for (std::size_t n = 0; n < horizon; ++n) {
    const int a = x.at(n), b = y.at(n);
    if (a != b && a != kStar && b != kStar) return false;
  }
  return true;
}

inline bool angles_equivalent(const Angle& phi1, const Angle& phi2, const CharacteristicAngle& ca) {
  if (phi1 == phi2) return true;
  const ArcLabeling labels(ca);
  return itineraries_match(itinerary(phi1, labels), itinerary(phi2, labels));
}

/// Partition of `angles` by itinerary equivalence. Wildcard matching is not
/// transitive in general, so classes are the transitive closure. Classes are
/// sorted internally and ordered by their smallest angle.
inline std::vector<std::vector<Angle>> landing_classes(const std::vector<Angle>& angles,
                                                       const CharacteristicAngle& ca) {
  const ArcLabeling labels(ca);
  const std::size_t n = angles.size();
  std::vector<Itinerary> its;
  its.reserve(n);
  for (const auto& a : angles) its.push_back(itinerary(a, labels));

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  auto unite = [&](std::size_t i, std::size_t j) { parent[find(i)] = find(j); };

  // Identical star-free itineraries share a bucket; starred ones are matched
  // against one representative per bucket and against each other.
  std::map<Itinerary, std::size_t> bucket;
  std::vector<std::size_t> starred;
  for (std::size_t i = 0; i < n; ++i) {
    if (its[i].has_star()) {
      starred.push_back(i);
      continue;
    }
    auto [it, fresh] = bucket.emplace(its[i], i);
    if (!fresh) unite(i, it->second);
  }
  for (std::size_t s = 0; s < starred.size(); ++s) {
    const std::size_t i = starred[s];
    for (const auto& [key, rep] : bucket)
      if (itineraries_match(its[i], key)) unite(i, rep);
    for (std::size_t t = s + 1; t < starred.size(); ++t)
      if (itineraries_match(its[i], its[starred[t]])) unite(i, starred[t]);
  }

  std::map<std::size_t, std::vector<Angle>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(angles[i]);
  std::vector<std::vector<Angle>> out;
  for (auto& [root, g] : groups) {
    std::sort(g.begin(), g.end());
    out.push_back(std::move(g));
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.front() < y.front(); });
  return out;
}

}  // namespace fibers
