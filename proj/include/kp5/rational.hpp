#pragma once

#include <cstdint>
#include <string>

namespace kp5 {

/// Nonlinearity exponent p = num/den in lowest terms with den > 0.
/// The equation admits p = m/n with n odd; `is_admissible` checks that.
struct Rational {
  std::int64_t num = 2;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool is_integer() const { return den == 1; }
  bool has_odd_denominator() const { return den % 2 != 0; }

  Rational operator+(std::int64_t k) const { return {num + k * den, den}; }

  std::string str() const;
  static Rational parse(const std::string& text);

  friend bool operator==(const Rational&, const Rational&) = default;
};

}  // namespace kp5
