#include "twistfix/phase.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace twistfix {

namespace {

std::int64_t parse_int(std::string_view s, std::string_view whole) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  std::int64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end) {
    throw std::invalid_argument("malformed rational: '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text, text));
  const auto num = parse_int(text.substr(0, slash), text);
  const auto den = parse_int(text.substr(slash + 1), text);
  if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

std::string to_string(const Rational& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

Rational frac(const Rational& q) {
  const auto n = q.numerator();
  const auto d = q.denominator();
  auto r = n % d;
  if (r < 0) r += d;
  return Rational(r, d);
}

Complex Phase::value() const {
  // Exact values on the real and imaginary axes keep commutation checks free of rounding.
  const auto n = q_.numerator();
  const auto d = q_.denominator();
  if (n == 0) return {1.0, 0.0};
  if (4 * n == d) return {0.0, 1.0};
  if (2 * n == d) return {-1.0, 0.0};
  if (4 * n == 3 * d) return {0.0, -1.0};
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(d);
  return {std::cos(angle), std::sin(angle)};
}

std::string to_string(const Phase& p) { return to_string(p.exponent()); }

}  // namespace twistfix
