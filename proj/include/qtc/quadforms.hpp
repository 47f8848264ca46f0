#pragma once

// Positive definite binary quadratic forms: reduction, class numbers of
// imaginary quadratic orders, and representation of primes by the principal
// form (the splitting test for ring class fields).

#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtc/arith.hpp"
#include "qtc/discriminant.hpp"

namespace qtc {

/// Discriminant of an imaginary quadratic order: negative, 0 or 1 mod 4.
class ImaginaryQuadraticDiscriminant {
 public:
  explicit ImaginaryQuadraticDiscriminant(std::int64_t value) : value_(value) {
    if (value >= 0) throw std::invalid_argument("imaginary quadratic discriminant must be negative");
    if (!residue_ok(value))
      throw std::invalid_argument(std::to_string(value) + " is not 0 or 1 mod 4");
  }

  static bool residue_ok(std::int64_t value) {
    const std::int64_t r = ((value % 4) + 4) % 4;
    return r == 0 || r == 1;
  }

  std::int64_t value() const { return value_; }
  std::uint64_t magnitude() const { return static_cast<std::uint64_t>(-value_); }

 private:
  std::int64_t value_;
};

struct BinaryQuadraticForm {
  std::int64_t a = 1;
  std::int64_t b = 0;
  std::int64_t c = 1;

  std::int64_t discriminant() const { return b * b - 4 * a * c; }

  std::int64_t evaluate(std::int64_t x, std::int64_t y) const { return a * x * x + b * x * y + c * y * y; }

  bool is_primitive() const { return std::gcd(std::gcd(a, b), c) == 1; }

  bool is_reduced() const {
    const std::int64_t abs_b = b < 0 ? -b : b;
    if (a <= 0 || abs_b > a || a > c) return false;
    if ((abs_b == a || a == c) && b < 0) return false;
    return true;
  }

  /// Substitutes (x, y) -> (p x + q y, r x + s y).
  BinaryQuadraticForm transformed(std::int64_t p, std::int64_t q, std::int64_t r, std::int64_t s) const {
    return {evaluate(p, r), 2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s, evaluate(q, s)};
  }

  friend bool operator==(const BinaryQuadraticForm&, const BinaryQuadraticForm&) = default;

  friend std::ostream& operator<<(std::ostream& os, const BinaryQuadraticForm& f) {
    return os << '(' << f.a << ',' << f.b << ',' << f.c << ')';
  }
};

/// The unique reduced form properly equivalent to a positive definite form.
inline BinaryQuadraticForm reduce(BinaryQuadraticForm f) {
  if (f.discriminant() >= 0 || f.a <= 0) throw std::invalid_argument("reduce: form is not positive definite");
  for (;;) {
    if (f.b > f.a || f.b <= -f.a) {
      // x -> x + k y brings b into (-a, a].
      const std::int64_t two_a = 2 * f.a;
      std::int64_t k = (f.a - f.b) / two_a;
      if ((f.a - f.b) % two_a < 0) --k;
      f.c = f.a * k * k + f.b * k + f.c;
      f.b = f.b + two_a * k;
    }
    if (f.a > f.c) {
      f = {f.c, -f.b, f.a};
      continue;
    }
    break;
  }
  if (f.a == f.c && f.b < 0) f.b = -f.b;
  return f;
}

/// One reduced primitive form per proper equivalence class of discriminant disc.
inline std::vector<BinaryQuadraticForm> reduced_forms(const ImaginaryQuadraticDiscriminant& disc) {
  const std::int64_t delta = disc.value();
  const std::int64_t n = -delta;
  std::vector<BinaryQuadraticForm> forms;
  // Reduced forms satisfy 3a^2 <= |disc|.
  for (std::int64_t a = 1; 3 * a * a <= n; ++a) {
    for (std::int64_t b = -a + 1; b <= a; ++b) {
      const std::int64_t num = b * b - delta;
      if (num % (4 * a) != 0) continue;
      const std::int64_t c = num / (4 * a);
      if (c < a) continue;
      if (a == c && b < 0) continue;
      const BinaryQuadraticForm f{a, b, c};
      if (f.is_primitive()) forms.push_back(f);
    }
  }
  return forms;
}

inline std::uint64_t class_number(const ImaginaryQuadraticDiscriminant& disc) {
  return reduced_forms(disc).size();
}

/// Class number of the order of discriminant d, or 0 when d is 2 or 3 mod 4.
inline std::uint64_t hprime(std::int64_t d) {
  if (d >= 0) throw std::invalid_argument("hprime: d must be negative");
  if (!ImaginaryQuadraticDiscriminant::residue_ok(d)) return 0;
  return class_number(ImaginaryQuadraticDiscriminant(d));
}

/// The form representing 1: x^2 + (|disc|/4) y^2 or x^2 + xy + ((1+|disc|)/4) y^2.
inline BinaryQuadraticForm principal_form(const ImaginaryQuadraticDiscriminant& disc) {
  const std::int64_t n = -disc.value();
  if (n % 4 == 0) return {1, 0, n / 4};
  return {1, 1, (n + 1) / 4};
}

/// Whether the odd prime p (not dividing disc) is represented by the principal
/// form; equivalently, whether p splits completely in the ring class field.
inline bool represented_by_principal_form(const ImaginaryQuadraticDiscriminant& disc, std::uint64_t p) {
  if (p % 2 == 0) throw std::invalid_argument("represented_by_principal_form: p must be odd");
  if (!is_prime(p)) throw std::invalid_argument("represented_by_principal_form: p must be prime");
  const std::uint64_t n = disc.magnitude();
  if (n % p == 0) throw std::invalid_argument("represented_by_principal_form: p divides the discriminant");

  if (n % 4 == 0) {
    // p = x^2 + m y^2
    const std::uint64_t m = n / 4;
    for (std::uint64_t y = 0; m * y * y <= p; ++y) {
      if (is_square(p - m * y * y)) return true;
    }
    return false;
  }
  // p = x^2 + xy + ((1+n)/4) y^2  <=>  4p = u^2 + n y^2 with u = 2x + y, u = y mod 2.
  const unsigned __int128 four_p = static_cast<unsigned __int128>(p) * 4;
  for (std::uint64_t y = 0; static_cast<unsigned __int128>(n) * y * y <= four_p; ++y) {
    const auto rest = static_cast<std::uint64_t>(four_p - static_cast<unsigned __int128>(n) * y * y);
    const std::uint64_t u = isqrt(rest);
    if (u * u == rest && (u - y) % 2 == 0) return true;
  }
  return false;
}

/// Fundamental discriminant of Q(sqrt(-D)): -D when D = 3 mod 4, else -4D.
inline ImaginaryQuadraticDiscriminant field_discriminant(const QuaternionDiscriminant& D) {
  const auto d = static_cast<std::int64_t>(D.value());
  return ImaginaryQuadraticDiscriminant(D.value() % 4 == 3 ? -d : -4 * d);
}

/// Class number h_D of Q(sqrt(-D)). Always even by genus theory.
inline std::uint64_t field_class_number_hD(const QuaternionDiscriminant& D) {
  const std::uint64_t h = class_number(field_discriminant(D));
  if (h % 2 != 0) throw std::logic_error("class number of Q(sqrt(-D)) came out odd");
  return h;
}

}  // namespace qtc
