#pragma once

// External angles in R/Z, stored as exact reduced fractions num/den with
// 0 <= num < den. Everything here is exact; nothing rounds.

#include <algorithm>
#include <charconv>
#include <compare>
#include <concepts>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <boost/container_hash/hash.hpp>
#include <boost/rational.hpp>

#include "fibers/error.hpp"

namespace fibers {

namespace detail {

template <class Int>
inline constexpr bool is_builtin_int_v = std::is_integral_v<Int>;

[[noreturn, gnu::cold, gnu::noinline]] inline void throw_overflow() {
  throw Error(ErrorKind::overflow, "angle arithmetic exceeds the integer range");
}

template <class Int>
Int checked_mul(const Int& a, const Int& b) {
  if constexpr (is_builtin_int_v<Int>) {
    Int out{};
    if (__builtin_mul_overflow(a, b, &out)) throw_overflow();
    return out;
  } else {
    return a * b;
  }
}

template <class Int>
Int checked_add(const Int& a, const Int& b) {
  if constexpr (is_builtin_int_v<Int>) {
    Int out{};
    if (__builtin_add_overflow(a, b, &out)) throw_overflow();
    return out;
  } else {
    return a + b;
  }
}

template <class Int>
Int gcd(Int a, Int b) {
  if constexpr (is_builtin_int_v<Int>) {
    return std::gcd(a, b);
  } else {
    while (b != 0) {
      Int r = a % b;
      a = b;
      b = r;
    }
    return a;
  }
}

// Sign of a1*b2 - a2*b1 without overflow for 64-bit inputs.
template <class Int>
std::strong_ordering cross_compare(const Int& a1, const Int& b2, const Int& a2, const Int& b1) {
  if constexpr (is_builtin_int_v<Int> && sizeof(Int) <= 8) {
    const __int128 lhs = static_cast<__int128>(a1) * b2;
    const __int128 rhs = static_cast<__int128>(a2) * b1;
    return lhs <=> rhs;
  } else {
    const Int lhs = a1 * b2;
    const Int rhs = a2 * b1;
    if (lhs < rhs) return std::strong_ordering::less;
    if (rhs < lhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
}

/// Tag for constructing an angle from a pair already in canonical form.
struct Canonical {};

template <class Int>
std::string int_to_string(const Int& v) {
  if constexpr (is_builtin_int_v<Int>) {
    return std::to_string(v);
  } else {
    return v.str();
  }
}

}  // namespace detail

/// A point of R/Z measured in full turns, kept in canonical reduced form.
template <class Int>
class BasicAngle {
 public:
  using int_type = Int;

  BasicAngle() : num_(0), den_(1) {}

  /// Any integer pair with den > 0; the value is reduced mod 1.
  BasicAngle(Int num, Int den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_ <= 0) throw Error(ErrorKind::invalid_argument, "angle denominator must be positive");
    num_ %= den_;
    if (num_ < 0) num_ += den_;
    Int g = detail::gcd<Int>(num_, den_);
    if (g == 0) g = 1;
    num_ /= g;
    den_ /= g;
    if (num_ == 0) den_ = 1;
  }

  /// Caller guarantees 0 <= num < den, gcd(num, den) = 1 (den = 1 for zero).
  BasicAngle(detail::Canonical, Int num, Int den) : num_(std::move(num)), den_(std::move(den)) {}

  const Int& num() const { return num_; }
  const Int& den() const { return den_; }
  bool is_zero() const { return num_ == 0; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  boost::rational<Int> value() const { return boost::rational<Int>(num_, den_); }

  std::string str() const {
    if (num_ == 0) return "0";
    return detail::int_to_string(num_) + "/" + detail::int_to_string(den_);
  }

  friend bool operator==(const BasicAngle& a, const BasicAngle& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  // Numeric order of the representative in [0, 1).
  friend std::strong_ordering operator<=>(const BasicAngle& a, const BasicAngle& b) {
    return detail::cross_compare<Int>(a.num_, b.den_, b.num_, a.den_);
  }

 private:
  Int num_;
  Int den_;
};

using Angle = BasicAngle<std::int64_t>;

template <class Int>
struct AngleHash {
  std::size_t operator()(const BasicAngle<Int>& a) const {
    std::size_t seed = 0;
    boost::hash_combine(seed, a.num());
    boost::hash_combine(seed, a.den());
    return seed;
  }
};

/// Parses "num/den" (0 <= num < den) or the literal "0".
template <class Int = std::int64_t>
BasicAngle<Int> parse_angle(std::string_view text) {
  auto fail = [&]() -> BasicAngle<Int> {
    throw Error(ErrorKind::parse_error, "bad angle literal '" + std::string(text) + "' (expected p/q)");
  };
  auto parse_int = [&](std::string_view s, Int& out) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
      return false;
    if constexpr (detail::is_builtin_int_v<Int>) {
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
      return ec == std::errc() && ptr == s.data() + s.size();
    } else {
      out = Int(std::string(s));
      return true;
    }
  };
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text == "0") return BasicAngle<Int>();
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return fail();
  Int num{}, den{};
  if (!parse_int(text.substr(0, slash), num) || !parse_int(text.substr(slash + 1), den)) return fail();
  if (den == 0 || !(num < den)) return fail();
  return BasicAngle<Int>(num, den);
}

template <class Int>
BasicAngle<Int> times_d(const BasicAngle<Int>& a, int d) {
  if (d < 2) throw Error(ErrorKind::invalid_argument, "degree must be at least 2");
  Int num = detail::checked_mul<Int>(a.num(), Int(d));
  if (d <= 8) {
    while (num >= a.den()) num -= a.den();
  } else {
    num %= a.den();
  }
  if (num == 0) return BasicAngle<Int>();
  // num/den is reduced, so gcd(d * num, den) = gcd(d, den).
  const Int g = detail::gcd<Int>(a.den() % Int(d), Int(d));
  if (g == 1) return BasicAngle<Int>(detail::Canonical{}, std::move(num), a.den());
  return BasicAngle<Int>(detail::Canonical{}, num / g, a.den() / g);
}

/// The d angles (a + k)/d, in increasing order.
template <class Int>
std::vector<BasicAngle<Int>> preimages(const BasicAngle<Int>& a, int d) {
  if (d < 2) throw Error(ErrorKind::invalid_argument, "degree must be at least 2");
  const Int den = detail::checked_mul<Int>(a.den(), Int(d));
  std::vector<BasicAngle<Int>> out;
  out.reserve(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k)
    out.emplace_back(detail::checked_add<Int>(a.num(), detail::checked_mul<Int>(Int(k), a.den())), den);
  return out;
}

template <class Int>
struct BasicOrbitInfo {
  int preperiod = 0;
  int period = 1;
  /// orbit[0 .. preperiod + period), pairwise distinct.
  std::vector<BasicAngle<Int>> orbit;

  const BasicAngle<Int>& periodic_entry() const { return orbit[static_cast<std::size_t>(preperiod)]; }
};

using OrbitInfo = BasicOrbitInfo<std::int64_t>;

template <class Int>
BasicOrbitInfo<Int> orbit(const BasicAngle<Int>& a, int d) {
  if (d < 2) throw Error(ErrorKind::invalid_argument, "degree must be at least 2");
  // Each step divides the denominator by its common factor with d, and an
  // angle is periodic exactly when that factor is 1.
  BasicOrbitInfo<Int> info;
  BasicAngle<Int> cur = a;
  while (detail::gcd<Int>(cur.den() % Int(d), Int(d)) != 1) {
    info.orbit.push_back(cur);
    cur = times_d(cur, d);
  }
  info.preperiod = static_cast<int>(info.orbit.size());
  const BasicAngle<Int> entry = cur;
  do {
    info.orbit.push_back(cur);
    cur = times_d(cur, d);
  } while (cur != entry);
  info.period = static_cast<int>(info.orbit.size()) - info.preperiod;
  return info;
}

/// Shorter arc length between two angles, in [0, 1/2].
template <class Int>
boost::rational<Int> circ_dist(const BasicAngle<Int>& a, const BasicAngle<Int>& b) {
  Int num, den;
  if (a.den() == b.den()) {
    num = a.num() - b.num();
    den = a.den();
  } else {
    num = detail::checked_mul<Int>(a.num(), b.den()) - detail::checked_mul<Int>(b.num(), a.den());
    den = detail::checked_mul<Int>(a.den(), b.den());
  }
  if (num < 0) num = -num;
  // Both values lie in [0, 1), so |num| < den and den - num cannot overflow.
  const Int other = den - num;
  return boost::rational<Int>(other < num ? other : num, den);
}

/// Digit k is floor(d * frac(d^k a)); digits past 9 use lowercase letters.
template <class Int>
std::string base_d_digits(const BasicAngle<Int>& a, int d, int n) {
  if (d < 2 || d > 36) throw Error(ErrorKind::invalid_argument, "degree must lie in [2, 36] for digit output");
  if (n < 0) throw Error(ErrorKind::invalid_argument, "digit count must be non-negative");
  static constexpr std::string_view alphabet = "0123456789abcdefghijklmnopqrstuvwxyz";
  std::string out;
  out.reserve(static_cast<std::size_t>(n));
  BasicAngle<Int> cur = a;
  for (int k = 0; k < n; ++k) {
    const Int scaled = detail::checked_mul<Int>(cur.num(), Int(d));
    const Int digit = scaled / cur.den();
    out.push_back(alphabet[static_cast<std::size_t>(static_cast<long>(digit))]);
    cur = BasicAngle<Int>(scaled % cur.den(), cur.den());
  }
  return out;
}

/// All reduced angles with denominator in [1, max_den], sorted.
template <class Int = std::int64_t>
std::vector<BasicAngle<Int>> angles_up_to(int max_den) {
  std::vector<BasicAngle<Int>> out;
  for (int q = 1; q <= max_den; ++q)
    for (int p = 0; p < q; ++p)
      if (std::gcd(p, q) == 1) out.emplace_back(Int(p), Int(q));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace fibers

template <class Int>
struct std::hash<fibers::BasicAngle<Int>> : fibers::AngleHash<Int> {};
