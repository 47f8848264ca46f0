#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qtc/arith.hpp"

namespace qtc {

enum class DiscriminantRule { NotGreaterThanOne, NotSquarefree, OddPrimeCount, OutOfRange };

inline const char* describe(DiscriminantRule rule) {
  switch (rule) {
    case DiscriminantRule::NotGreaterThanOne: return "discriminant must be greater than 1";
    case DiscriminantRule::NotSquarefree: return "not squarefree";
    case DiscriminantRule::OddPrimeCount: return "odd number of prime factors";
    case DiscriminantRule::OutOfRange: return "discriminant exceeds supported range";
  }
  return "invalid discriminant";
}

class InvalidDiscriminant : public std::invalid_argument {
 public:
  InvalidDiscriminant(std::uint64_t value, DiscriminantRule rule)
      : std::invalid_argument(std::to_string(value) + ": " + describe(rule)),
        value_(value),
        rule_(rule) {}

  std::uint64_t value() const { return value_; }
  DiscriminantRule rule() const { return rule_; }

 private:
  std::uint64_t value_;
  DiscriminantRule rule_;
};

/// Reduced discriminant D of an indefinite rational quaternion division
/// algebra: squarefree, D > 1, even number of prime factors.
class QuaternionDiscriminant {
 public:
  // -4D must stay representable as a signed 64-bit discriminant.
  static constexpr std::uint64_t kMaxValue = std::uint64_t{1} << 60;

  static QuaternionDiscriminant validate(std::uint64_t n) {
    if (n <= 1) throw InvalidDiscriminant(n, DiscriminantRule::NotGreaterThanOne);
    if (n > kMaxValue) throw InvalidDiscriminant(n, DiscriminantRule::OutOfRange);
    Factorization f = factorize(n);
    if (!f.is_squarefree()) throw InvalidDiscriminant(n, DiscriminantRule::NotSquarefree);
    if (f.omega() % 2 != 0) throw InvalidDiscriminant(n, DiscriminantRule::OddPrimeCount);
    return QuaternionDiscriminant(std::move(f));
  }

  /// Non-throwing check, for range scans.
  static bool is_valid(std::uint64_t n) {
    if (n <= 1 || n > kMaxValue) return false;
    const Factorization f = factorize(n);
    return f.is_squarefree() && f.omega() % 2 == 0;
  }

  std::uint64_t value() const { return factorization_.value(); }
  const Factorization& factorization() const { return factorization_; }
  std::vector<std::uint64_t> primes() const { return factorization_.primes(); }
  std::uint64_t largest_prime() const { return factorization_.powers().back().prime; }
  bool is_even() const { return value() % 2 == 0; }

  /// D with the factor 2 removed if present.
  std::uint64_t dbar() const { return is_even() ? value() / 2 : value(); }

  /// Odd primes dividing D, i.e. the primes of dbar.
  std::vector<std::uint64_t> odd_primes() const {
    std::vector<std::uint64_t> out;
    for (auto p : factorization_.primes()) {
      if (p != 2) out.push_back(p);
    }
    return out;
  }

  int omega() const { return factorization_.omega(); }
  int omega_dbar() const { return is_even() ? omega() - 1 : omega(); }

  /// e_D = omega(dbar) + 2; the density of the S_D primes is 2^-e_D.
  int e_D() const { return omega_dbar() + 2; }

  std::uint64_t euler_phi() const { return factorization_.euler_phi(); }

  friend bool operator==(const QuaternionDiscriminant& a, const QuaternionDiscriminant& b) {
    return a.value() == b.value();
  }

 private:
  explicit QuaternionDiscriminant(Factorization f) : factorization_(std::move(f)) {}

  Factorization factorization_;
};

/// All valid quaternion discriminants in [2, bound], ascending.
inline std::vector<QuaternionDiscriminant> quaternion_discriminants_up_to(std::uint64_t bound) {
  std::vector<QuaternionDiscriminant> out;
  for (std::uint64_t n = 6; n <= bound; ++n) {
    if (QuaternionDiscriminant::is_valid(n)) out.push_back(QuaternionDiscriminant::validate(n));
  }
  return out;
}

}  // namespace qtc
