#include <gtest/gtest.h>

#include <random>

#include "fibers/dynamics.hpp"
#include "fibers/symbolic.hpp"

using namespace fibers;

namespace {

Angle A(std::int64_t p, std::int64_t q) { return Angle(p, q); }
const CharacteristicAngle kDendrite{A(1, 6), 2};

// Symbol oracle: arc membership by floating comparison against the two
// boundaries, labelling the arc that contains theta_v as 0.
int symbol_oracle(double x, double b0, double b1, double tv) {
  if (x == b0 || x == b1) return kStar;
  const bool in_first = b0 < x && x < b1;
  const bool tv_first = b0 < tv && tv < b1;
  return in_first == tv_first ? 0 : 1;
}

}  // namespace

TEST(Partition, Examples) {
  EXPECT_EQ(partition_boundaries(kDendrite), (std::vector<Angle>{A(1, 12), A(7, 12)}));
  EXPECT_EQ(partition_boundaries({Angle(), 2}), (std::vector<Angle>{Angle(), A(1, 2)}));
  EXPECT_EQ(partition_boundaries({A(1, 7), 2}), (std::vector<Angle>{A(1, 14), A(4, 7)}));
  EXPECT_EQ(partition_boundaries({A(1, 4), 3}).size(), 3u);
}

TEST(Partition, ArcZeroContainsThetaV) {
  for (const auto& tv : angles_up_to(30)) {
    for (int d : {2, 3}) {
      const ArcLabeling labels({tv, d});
      const int s = labels.symbol(tv);
      if (s != kStar) EXPECT_EQ(s, 0) << tv.str();
    }
  }
}

TEST(Itinerary, Examples) {
  auto it = itinerary(A(1, 7), kDendrite);
  EXPECT_TRUE(it.preperiod.empty());
  EXPECT_EQ(it.period, std::vector<int>{0});
  EXPECT_EQ(it.str(), "(0)∞");

  it = itinerary(A(3, 7), kDendrite);
  EXPECT_TRUE(it.preperiod.empty());
  EXPECT_EQ(it.period, (std::vector<int>{0, 1, 1}));

  it = itinerary(A(1, 12), kDendrite);
  ASSERT_FALSE(it.preperiod.empty());
  EXPECT_EQ(it.preperiod[0], kStar);
  EXPECT_TRUE(it.has_star());
  EXPECT_EQ(it.str().front(), '*');
}

TEST(Itinerary, MatchesArcMembershipOracle) {
  const double b0 = 1.0 / 12, b1 = 7.0 / 12, tv = 1.0 / 6;
  for (const auto& a : angles_up_to(45)) {
    const auto it = itinerary(a, kDendrite);
    const auto info = orbit(a, 2);
    const std::size_t horizon = info.orbit.size() + 10;
    Angle x = a;
    for (std::size_t n = 0; n < horizon; ++n) {
      // Boundary hits are decided exactly, the rest by floating comparison.
      const int expected = (x == A(1, 12) || x == A(7, 12)) ? kStar : symbol_oracle(x.to_double(), b0, b1, tv);
      ASSERT_EQ(it.at(n), expected) << a.str() << " at " << n;
      x = times_d(x, 2);
    }
  }
}

TEST(Itinerary, NormalFormIsMinimal) {
  for (const auto& a : angles_up_to(40)) {
    const auto it = itinerary(a, kDendrite);
    // Shortest period: no proper divisor repeats.
    const std::size_t p = it.period.size();
    for (std::size_t q = 1; q < p; ++q) {
      if (p % q) continue;
      bool repeats = true;
      for (std::size_t i = q; i < p; ++i) repeats = repeats && it.period[i] == it.period[i - q];
      EXPECT_FALSE(repeats) << a.str();
    }
    if (!it.preperiod.empty()) EXPECT_NE(it.preperiod.back(), it.period.back()) << a.str();
  }
}

TEST(Equivalence, Examples) {
  EXPECT_TRUE(angles_equivalent(A(1, 7), A(2, 7), kDendrite));
  EXPECT_FALSE(angles_equivalent(A(1, 7), A(3, 7), kDendrite));
  for (const auto& a : angles_up_to(12)) EXPECT_TRUE(angles_equivalent(a, a, kDendrite));
}

TEST(Equivalence, ReflexiveSymmetric) {
  const auto pool = angles_up_to(31);
  for (std::size_t i = 0; i < pool.size(); i += 3)
    for (std::size_t j = 0; j < pool.size(); j += 5)
      EXPECT_EQ(angles_equivalent(pool[i], pool[j], kDendrite), angles_equivalent(pool[j], pool[i], kDendrite));
}

TEST(Equivalence, IndependentOfLabelling) {
  const auto pool = angles_up_to(25);
  for (const CharacteristicAngle& ca : {kDendrite, CharacteristicAngle{A(1, 4), 3}, CharacteristicAngle{A(2, 5), 2}}) {
    const ArcLabeling base(ca);
    for (int shift = 1; shift < ca.d; ++shift) {
      const ArcLabeling other = base.rotated(shift);
      for (std::size_t i = 0; i < pool.size(); i += 2)
        for (std::size_t j = i + 1; j < pool.size(); j += 7)
          EXPECT_EQ(itineraries_match(itinerary(pool[i], base), itinerary(pool[j], base)),
                    itineraries_match(itinerary(pool[i], other), itinerary(pool[j], other)));
    }
  }
}

TEST(Equivalence, ShiftEquivariance) {
  const auto pool = angles_up_to(40);
  const ArcLabeling labels(kDendrite);
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (std::size_t j = i + 1; j < pool.size(); ++j) {
      if (labels.symbol(pool[i]) == kStar || labels.symbol(pool[j]) == kStar) continue;
      if (!angles_equivalent(pool[i], pool[j], kDendrite)) continue;
      EXPECT_TRUE(angles_equivalent(times_d(pool[i], 2), times_d(pool[j], 2), kDendrite))
          << pool[i].str() << " " << pool[j].str();
    }
}

TEST(Equivalence, NoIntervalCollapse) {
  // Angles sharing a wildcard-free itinerary never fill an interval: both
  // arcs between two such angles contain an angle with another itinerary.
  const auto pool = angles_up_to(36);
  std::vector<Itinerary> its;
  for (const auto& a : pool) its.push_back(itinerary(a, kDendrite));
  int pairs = 0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (its[i].has_star()) continue;
    for (std::size_t j = i + 1; j < pool.size(); ++j) {
      if (its[j].has_star() || !(its[i] == its[j])) continue;
      ++pairs;
      bool inner = false, outer = false;
      for (std::size_t k = 0; k < pool.size(); ++k) {
        if (its[k] == its[i]) continue;
        (k > i && k < j ? inner : outer) = true;
      }
      EXPECT_TRUE(inner && outer) << pool[i].str() << " " << pool[j].str();
    }
  }
  EXPECT_GT(pairs, 0);
}

TEST(LandingClasses, DenominatorSeven) {
  std::vector<Angle> sevenths;
  for (int k = 1; k < 7; ++k) sevenths.push_back(A(k, 7));
  const auto classes = landing_classes(sevenths, kDendrite);
  // 1/7, 2/7, 4/7 share the itinerary (0); 3/7, 5/7, 6/7 are distinct shifts of (011).
  ASSERT_EQ(classes.size(), 4u);
  EXPECT_EQ(classes[0], (std::vector<Angle>{A(1, 7), A(2, 7), A(4, 7)}));
  EXPECT_EQ(classes[1], std::vector<Angle>{A(3, 7)});
  EXPECT_EQ(classes[2], std::vector<Angle>{A(5, 7)});
  EXPECT_EQ(classes[3], std::vector<Angle>{A(6, 7)});
}

TEST(LandingClasses, SingleElement) {
  const auto classes = landing_classes({A(5, 11)}, kDendrite);
  ASSERT_EQ(classes.size(), 1u);
  EXPECT_EQ(classes[0], std::vector<Angle>{A(5, 11)});
}

TEST(LandingClasses, DenominatorThreeSplitsAtDendrite) {
  // Itineraries (01) and (10) differ, and at c = i the rays land at
  // distinct points of the period-2 cycle.
  const auto classes = landing_classes({A(1, 3), A(2, 3)}, kDendrite);
  EXPECT_EQ(classes.size(), 2u);
  const Map m(2, {0.0, 1.0});
  const Angle both[] = {A(1, 3), A(2, 3)};
  const auto rays = trace_rays(m, both);
  ASSERT_TRUE(rays[0].landed && rays[1].landed);
  EXPECT_GT(std::abs(*rays[0].landing - *rays[1].landing), 0.5);
}

TEST(LandingClasses, ClassesPartitionInput) {
  const auto pool = angles_up_to(30);
  const auto classes = landing_classes(pool, kDendrite);
  std::size_t total = 0;
  for (const auto& c : classes) {
    total += c.size();
    EXPECT_TRUE(std::is_sorted(c.begin(), c.end()));
  }
  EXPECT_EQ(total, pool.size());
  for (std::size_t i = 1; i < classes.size(); ++i) EXPECT_LT(classes[i - 1].front(), classes[i].front());
}
