#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <limits>
#include <random>

#include "fibers/angle.hpp"
#include "oracles.hpp"

using namespace fibers;

namespace {

Angle A(std::int64_t p, std::int64_t q) { return Angle(p, q); }

std::vector<std::string> strs(const std::vector<Angle>& v) {
  std::vector<std::string> out;
  for (const auto& a : v) out.push_back(a.str());
  return out;
}

}  // namespace

TEST(AngleCanonical, ReducesModOne) {
  EXPECT_EQ(A(2, 4), A(1, 2));
  EXPECT_EQ(A(-1, 3), A(2, 3));
  EXPECT_EQ(A(5, 3), A(2, 3));
  EXPECT_EQ(A(7, 7), Angle());
  EXPECT_EQ(A(0, 9).den(), 1);
  EXPECT_EQ(A(6, 8).str(), "3/4");
  EXPECT_EQ(Angle().str(), "0");
  EXPECT_THROW(A(1, 0), Error);
  EXPECT_THROW(A(1, -3), Error);
}

TEST(AngleCanonical, OrdersNumerically) {
  EXPECT_LT(A(1, 3), A(1, 2));
  EXPECT_LT(Angle(), A(1, 1000));
  EXPECT_GT(A(999, 1000), A(998, 999));
  const std::int64_t big = std::numeric_limits<std::int64_t>::max();
  EXPECT_LT(A(big - 2, big), A(big - 1, big));
}

TEST(AngleParse, AcceptsFractionsAndZero) {
  EXPECT_EQ(parse_angle("1/7"), A(1, 7));
  EXPECT_EQ(parse_angle("0"), Angle());
  EXPECT_EQ(parse_angle(" 2/4 "), A(1, 2));
}

TEST(AngleParse, RejectsBadLiterals) {
  for (const char* bad : {"5", "", "1/0", "3/2", "-1/3", "1/-3", "a/b", "1//2", "1/2/3", "0.5"}) {
    try {
      parse_angle(bad);
      ADD_FAILURE() << "accepted " << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::parse_error) << bad;
    }
  }
}

TEST(TimesD, Examples) {
  EXPECT_EQ(times_d(A(1, 3), 2), A(2, 3));
  EXPECT_EQ(times_d(A(2, 3), 2), A(1, 3));
  EXPECT_EQ(times_d(A(1, 7), 3), A(3, 7));
  EXPECT_THROW(times_d(A(1, 7), 1), Error);
}

TEST(TimesD, OverflowIsReported) {
  const std::int64_t big = std::numeric_limits<std::int64_t>::max();
  try {
    times_d(A(big - 1, big), 2);
    FAIL() << "no overflow reported";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::overflow);
  }
}

TEST(Preimages, Examples) {
  EXPECT_EQ(strs(preimages(Angle(), 2)), (std::vector<std::string>{"0", "1/2"}));
  EXPECT_EQ(strs(preimages(A(1, 3), 2)), (std::vector<std::string>{"1/6", "2/3"}));
  EXPECT_EQ(strs(preimages(A(1, 6), 2)), (std::vector<std::string>{"1/12", "7/12"}));
}

TEST(Preimages, MapBackToSource) {
  for (int d = 2; d <= 5; ++d)
    for (const auto& a : angles_up_to(40)) {
      const auto pre = preimages(a, d);
      ASSERT_EQ(pre.size(), static_cast<std::size_t>(d));
      EXPECT_TRUE(std::is_sorted(pre.begin(), pre.end()));
      for (const auto& p : pre) EXPECT_EQ(times_d(p, d), a);
    }
}

TEST(Orbit, Examples) {
  auto o = orbit(A(1, 7), 2);
  EXPECT_EQ(o.preperiod, 0);
  EXPECT_EQ(o.period, 3);
  EXPECT_EQ(strs(o.orbit), (std::vector<std::string>{"1/7", "2/7", "4/7"}));

  o = orbit(A(1, 6), 2);
  EXPECT_EQ(o.preperiod, 1);
  EXPECT_EQ(o.period, 2);
  EXPECT_EQ(strs(o.orbit), (std::vector<std::string>{"1/6", "1/3", "2/3"}));

  o = orbit(A(1, 2), 2);
  EXPECT_EQ(o.preperiod, 1);
  EXPECT_EQ(o.period, 1);
  EXPECT_EQ(strs(o.orbit), (std::vector<std::string>{"1/2", "0"}));
}

TEST(Orbit, MatchesBruteForceAndFactorization) {
  for (int d : {2, 3, 4, 6}) {
    for (const auto& a : angles_up_to(120)) {
      const auto info = orbit(a, d);
      const auto ref = oracle::brute_orbit(a.num(), a.den(), d);
      ASSERT_EQ(info.preperiod, ref.preperiod) << a.str() << " d=" << d;
      ASSERT_EQ(info.period, ref.period) << a.str() << " d=" << d;
      EXPECT_EQ(info.preperiod, oracle::factor_preperiod(a.den(), d));
      EXPECT_EQ(info.preperiod == 0, std::gcd<std::int64_t>(a.den(), d) == 1);
      // d^period fixes the periodic entry.
      Angle x = info.periodic_entry();
      for (int k = 0; k < info.period; ++k) x = times_d(x, d);
      EXPECT_EQ(x, info.periodic_entry());
      // Listed orbit entries are pairwise distinct.
      auto sorted = info.orbit;
      std::sort(sorted.begin(), sorted.end());
      EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());
    }
  }
}

TEST(Orbit, ArbitraryPrecisionInstantiation) {
  using Big = boost::multiprecision::cpp_int;
  const Big den = Big(3) << 80;
  const BasicAngle<Big> a(Big(1), den);
  const auto info = orbit(a, 2);
  EXPECT_EQ(info.preperiod, 80);
  EXPECT_EQ(info.period, 2);
  EXPECT_EQ(info.periodic_entry().str(), "1/3");
  EXPECT_EQ(parse_angle<Big>("1/1208925819614629174706176").den(), Big(1) << 80);
}

TEST(CircDist, Examples) {
  EXPECT_EQ(circ_dist(A(1, 7), A(2, 7)), boost::rational<std::int64_t>(1, 7));
  EXPECT_EQ(circ_dist(A(1, 10), A(9, 10)), boost::rational<std::int64_t>(1, 5));
  EXPECT_EQ(circ_dist(A(3, 11), A(3, 11)), boost::rational<std::int64_t>(0));
}

TEST(CircDist, MetricProperties) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> den(1, 500);
  auto random_angle = [&] {
    const auto q = den(rng);
    return A(std::uniform_int_distribution<std::int64_t>(0, q - 1)(rng), q);
  };
  const boost::rational<std::int64_t> half(1, 2);
  for (int i = 0; i < 5000; ++i) {
    const Angle a = random_angle(), b = random_angle(), c = random_angle();
    EXPECT_EQ(circ_dist(a, b), circ_dist(b, a));
    EXPECT_LE(circ_dist(a, b), half);
    EXPECT_LE(circ_dist(a, c), circ_dist(a, b) + circ_dist(b, c));
    EXPECT_EQ(circ_dist(a, b) == boost::rational<std::int64_t>(0), a == b);
  }
}

TEST(BaseDigits, Examples) {
  EXPECT_EQ(base_d_digits(A(1, 3), 2, 4), "0101");
  EXPECT_EQ(base_d_digits(Angle(), 2, 3), "000");
  EXPECT_EQ(base_d_digits(A(1, 7), 2, 6), "001001");
  EXPECT_EQ(base_d_digits(A(1, 2), 2, 0), "");
  EXPECT_EQ(base_d_digits(A(5, 9), 3, 4), "1200");
  EXPECT_THROW(base_d_digits(A(1, 3), 2, -1), Error);
}

TEST(AnglesUpTo, CountsReducedFractions) {
  // 1 + phi(2) + ... + phi(7)
  EXPECT_EQ(angles_up_to(7).size(), 18u);
  const auto v = angles_up_to(64);
  EXPECT_TRUE(std::is_sorted(v.begin(), v.end()));
  EXPECT_EQ(std::adjacent_find(v.begin(), v.end()), v.end());
}

TEST(AngleHash, EqualAnglesHashEqual) {
  EXPECT_EQ(std::hash<Angle>{}(A(2, 6)), std::hash<Angle>{}(A(1, 3)));
}
