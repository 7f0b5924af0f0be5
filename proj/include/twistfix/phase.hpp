#pragma once

#include <boost/rational.hpp>

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>

namespace twistfix {

using Rational = boost::rational<std::int64_t>;
using Complex = std::complex<double>;

/// Parses "p/q", "p" or "-p/q". Throws std::invalid_argument on malformed input or q == 0.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);

/// Reduces q into [0, 1).
Rational frac(const Rational& q);

/// The unit complex number exp(2*pi*i*q), kept as its exponent q in [0, 1).
/// Multiplication of circle elements is addition of exponents, so all
/// identities between phases are decided exactly.
class Phase {
 public:
  Phase() = default;
  explicit Phase(const Rational& exponent) : q_(frac(exponent)) {}
  Phase(std::int64_t num, std::int64_t den) : Phase(Rational(num, den)) {}

  static Phase one() { return Phase(); }

  const Rational& exponent() const noexcept { return q_; }
  bool is_one() const noexcept { return q_.numerator() == 0; }

  Phase operator*(const Phase& o) const { return Phase(q_ + o.q_); }
  Phase& operator*=(const Phase& o) { return *this = *this * o; }
  Phase conj() const { return Phase(-q_); }
  Phase pow(std::int64_t k) const { return Phase(q_ * k); }

  Complex value() const;

  friend bool operator==(const Phase& a, const Phase& b) { return a.q_ == b.q_; }
  friend bool operator!=(const Phase& a, const Phase& b) { return !(a == b); }

 private:
  Rational q_{0};
};

std::string to_string(const Phase& p);

}  // namespace twistfix
