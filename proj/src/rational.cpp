#include "kp5/rational.hpp"

#include <numeric>

#include "kp5/error.hpp"

namespace kp5 {

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) fail(ErrorCode::InvalidArgument, "zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const std::int64_t g = std::gcd(n, d);
  num = n / (g == 0 ? 1 : g);
  den = d / (g == 0 ? 1 : g);
}

std::string Rational::str() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

Rational Rational::parse(const std::string& text) {
  try {
    const auto slash = text.find('/');
    if (slash == std::string::npos) return Rational(std::stoll(text));
    return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
  } catch (const std::logic_error&) {
    fail(ErrorCode::InvalidArgument, "cannot parse exponent '" + text + "'");
  }
}

}  // namespace kp5
