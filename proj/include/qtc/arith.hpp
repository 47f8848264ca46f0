#pragma once

// Exact elementary number theory over 64-bit integers: Kronecker symbols,
// deterministic primality, factorization, sieves and the usual
// multiplicative functions.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

namespace qtc {

using Rational = boost::rational<std::int64_t>;

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

/// Raised when a sieve would allocate more than the configured budget.
class MemoryCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sieve allocation budget in bytes. Read from QTC_MEMORY_CAP_MB, default 2 GiB.
inline std::uint64_t memory_cap_bytes() {
  constexpr std::uint64_t kDefaultMb = 2048;
  std::uint64_t mb = kDefaultMb;
  if (const char* env = std::getenv("QTC_MEMORY_CAP_MB"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(env, &end, 10);
    if (end != nullptr && *end == '\0' && parsed > 0) mb = parsed;
  }
  return mb << 20;
}

inline void check_memory_budget(std::uint64_t bytes, const char* what) {
  if (bytes > memory_cap_bytes()) {
    throw MemoryCapExceeded(std::string(what) + ": needs " + std::to_string(bytes >> 20) +
                            " MiB, cap is " + std::to_string(memory_cap_bytes() >> 20) +
                            " MiB (QTC_MEMORY_CAP_MB)");
  }
}

namespace detail {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp != 0) {
    if (exp & 1U) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1U;
  }
  return result;
}

inline std::uint64_t magnitude(std::int64_t v) {
  return v < 0 ? std::uint64_t{0} - static_cast<std::uint64_t>(v) : static_cast<std::uint64_t>(v);
}

// Jacobi symbol (a/n) for odd n > 0 and 0 <= a < n.
inline int jacobi_odd(std::uint64_t a, std::uint64_t n) {
  int result = 1;
  while (a != 0) {
    const int twos = std::countr_zero(a);
    a >>= twos;
    if ((twos & 1) != 0 && (n % 8 == 3 || n % 8 == 5)) result = -result;
    if (a % 4 == 3 && n % 4 == 3) result = -result;
    std::swap(a, n);
    a %= n;
  }
  return n == 1 ? result : 0;
}

inline bool miller_rabin_witness(std::uint64_t n, std::uint64_t a, std::uint64_t d, int s) {
  a %= n;
  if (a == 0) return false;
  std::uint64_t x = powmod(a, d, n);
  if (x == 1 || x == n - 1) return false;
  for (int r = 1; r < s; ++r) {
    x = mulmod(x, x, n);
    if (x == n - 1) return false;
  }
  return true;
}

}  // namespace detail

/// Kronecker symbol (a/n), extending Jacobi to all nonzero n. For n = 0 the
/// value is 1 when a = +-1; any other a with n = 0 is rejected.
inline int kronecker(std::int64_t a, std::int64_t n) {
  if (n == 0) {
    if (a == 1 || a == -1) return 1;
    throw std::invalid_argument("kronecker(a, 0) is only defined for a = +-1");
  }
  int result = 1;
  std::uint64_t m = detail::magnitude(n);
  if (n < 0 && a < 0) result = -result;

  const int twos = std::countr_zero(m);
  if (twos > 0) {
    if ((a & 1) == 0) return 0;
    m >>= twos;
    // (a/2) = +1 for a = +-1 mod 8, -1 for a = +-3 mod 8.
    const std::int64_t a8 = ((a % 8) + 8) % 8;
    if ((twos & 1) != 0 && (a8 == 3 || a8 == 5)) result = -result;
  }
  if (m == 1) return result;

  const std::uint64_t mag = detail::magnitude(a) % m;
  std::uint64_t residue = (a < 0 && mag != 0) ? m - mag : mag;
  return result * detail::jacobi_odd(residue, m);
}

/// Deterministic primality for the full 64-bit range.
inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  constexpr std::uint64_t kSmall[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (auto p : kSmall) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  if (n < 37 * 37) return true;

  std::uint64_t d = n - 1;
  const int s = std::countr_zero(d);
  d >>= s;
  // Witness set known to be deterministic below 2^64.
  constexpr std::uint64_t kBases[] = {2, 325, 9375, 28178, 450775, 9780504, 1795265022};
  for (auto a : kBases) {
    if (detail::miller_rabin_witness(n, a, d, s)) return false;
  }
  return true;
}

struct PrimePower {
  std::uint64_t prime;
  int exponent;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Prime factorization of a positive integer, primes strictly increasing.
class Factorization {
 public:
  Factorization() = default;

  /// Builds from prime powers, validating every invariant.
  static Factorization from_prime_powers(std::vector<PrimePower> powers) {
    std::uint64_t value = 1;
    for (std::size_t i = 0; i < powers.size(); ++i) {
      const auto& pp = powers[i];
      if (pp.exponent < 1) throw std::invalid_argument("factorization exponent must be >= 1");
      if (!is_prime(pp.prime)) throw std::invalid_argument("factorization entry is not prime");
      if (i > 0 && powers[i - 1].prime >= pp.prime)
        throw std::invalid_argument("factorization primes must be strictly increasing");
      for (int e = 0; e < pp.exponent; ++e) {
        if (__builtin_mul_overflow(value, pp.prime, &value))
          throw std::overflow_error("factorization value exceeds 64 bits");
      }
    }
    Factorization f;
    f.value_ = value;
    f.powers_ = std::move(powers);
    return f;
  }

  std::uint64_t value() const { return value_; }
  const std::vector<PrimePower>& powers() const { return powers_; }

  std::vector<std::uint64_t> primes() const {
    std::vector<std::uint64_t> out;
    out.reserve(powers_.size());
    for (const auto& pp : powers_) out.push_back(pp.prime);
    return out;
  }

  int omega() const { return static_cast<int>(powers_.size()); }

  bool is_squarefree() const {
    return std::all_of(powers_.begin(), powers_.end(),
                       [](const PrimePower& pp) { return pp.exponent == 1; });
  }

  bool divisible_by(std::uint64_t p) const {
    return std::any_of(powers_.begin(), powers_.end(),
                       [p](const PrimePower& pp) { return pp.prime == p; });
  }

  std::uint64_t euler_phi() const {
    std::uint64_t phi = value_;
    for (const auto& pp : powers_) phi = phi / pp.prime * (pp.prime - 1);
    return phi;
  }

  /// Moebius function value.
  int mobius() const {
    if (!is_squarefree()) return 0;
    return (powers_.size() % 2 == 0) ? 1 : -1;
  }

  friend bool operator==(const Factorization&, const Factorization&) = default;

 private:
  // Trusted constructor for factorizations whose invariants hold by construction.
  Factorization(std::uint64_t value, std::vector<PrimePower> powers)
      : value_(value), powers_(std::move(powers)) {}

  friend Factorization factorize(std::uint64_t n);
  template <typename Sieve>
  friend Factorization factorize_with(const Sieve& sieve, std::uint64_t n);

  std::uint64_t value_ = 1;
  std::vector<PrimePower> powers_;
};

namespace detail {

inline std::uint64_t pollard_brent(std::uint64_t n) {
  if (n % 2 == 0) return 2;
  for (std::uint64_t c = 1;; ++c) {
    auto f = [n, c](std::uint64_t x) { return (mulmod(x, x, n) + c) % n; };
    std::uint64_t y = 2, x = 2, g = 1, q = 1, ys = 2;
    constexpr std::uint64_t kBlock = 128;
    for (std::uint64_t r = 1; g == 1; r <<= 1U) {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) y = f(y);
      for (std::uint64_t k = 0; k < r && g == 1; k += kBlock) {
        ys = y;
        for (std::uint64_t i = 0; i < std::min(kBlock, r - k); ++i) {
          y = f(y);
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
      }
    }
    if (g == n) {
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

inline void split_into(std::uint64_t n, std::vector<std::uint64_t>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  const std::uint64_t d = pollard_brent(n);
  split_into(d, out);
  split_into(n / d, out);
}

inline std::vector<PrimePower> collect_powers(std::vector<std::uint64_t> primes) {
  std::sort(primes.begin(), primes.end());
  std::vector<PrimePower> powers;
  for (auto p : primes) {
    if (!powers.empty() && powers.back().prime == p) {
      ++powers.back().exponent;
    } else {
      powers.push_back({p, 1});
    }
  }
  return powers;
}

}  // namespace detail

/// Factors any n >= 1 (trial division then Pollard-Brent).
inline Factorization factorize(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("factorize: n must be positive");
  std::vector<std::uint64_t> found;
  std::uint64_t rest = n;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL}) {
    while (rest % p == 0) {
      found.push_back(p);
      rest /= p;
    }
  }
  // 6k +- 1 wheel up to a small bound.
  constexpr std::uint64_t kTrialBound = 1000;
  for (std::uint64_t p = 7; p <= kTrialBound && p * p <= rest; p += 6) {
    for (std::uint64_t q : {p, p + 4}) {
      while (rest % q == 0) {
        found.push_back(q);
        rest /= q;
      }
    }
  }
  detail::split_into(rest, found);
  return Factorization(n, detail::collect_powers(std::move(found)));
}

inline bool is_squarefree(std::uint64_t n) { return factorize(n).is_squarefree(); }
inline int omega(std::uint64_t n) { return factorize(n).omega(); }
inline std::uint64_t euler_phi(std::uint64_t n) { return factorize(n).euler_phi(); }

/// Primes in [2, limit], ascending (odd-only Eratosthenes).
inline std::vector<std::uint64_t> prime_sieve(std::uint64_t limit) {
  if (limit < 2) throw std::invalid_argument("prime_sieve: limit must be >= 2");
  const double ln = std::log(static_cast<double>(limit));
  const auto expected_primes = static_cast<std::uint64_t>(1.26 * static_cast<double>(limit) / ln) + 16;
  check_memory_budget(limit / 2 + expected_primes * sizeof(std::uint64_t), "prime_sieve");

  std::vector<bool> composite(limit / 2 + 1, false);  // index i <-> 2i+1
  std::vector<std::uint64_t> primes;
  primes.reserve(expected_primes);
  primes.push_back(2);
  for (std::uint64_t i = 1; 2 * i + 1 <= limit; ++i) {
    if (composite[i]) continue;
    const std::uint64_t p = 2 * i + 1;
    primes.push_back(p);
    for (std::uint64_t m = p * p; m <= limit; m += 2 * p) composite[m / 2] = true;
  }
  return primes;
}

/// Smallest-prime-factor table for fast repeated factorization up to a limit.
class FactorSieve {
 public:
  explicit FactorSieve(std::uint32_t limit) : limit_(limit) {
    check_memory_budget((std::uint64_t{limit} + 1) * sizeof(std::uint32_t), "FactorSieve");
    spf_.assign(std::size_t{limit} + 1, 0);
    for (std::uint64_t i = 2; i <= limit; ++i) {
      if (spf_[i] != 0) continue;
      spf_[i] = static_cast<std::uint32_t>(i);
      for (std::uint64_t m = i * i; m <= limit; m += i) {
        if (spf_[m] == 0) spf_[m] = static_cast<std::uint32_t>(i);
      }
    }
  }

  std::uint32_t limit() const { return limit_; }

  std::uint32_t smallest_factor(std::uint64_t n) const { return spf_.at(n); }

  bool is_prime(std::uint64_t n) const { return n >= 2 && spf_.at(n) == n; }

 private:
  std::uint32_t limit_;
  std::vector<std::uint32_t> spf_;
};

template <typename Sieve>
Factorization factorize_with(const Sieve& sieve, std::uint64_t n) {
  if (n == 0 || n > sieve.limit()) throw std::out_of_range("factorize_with: n outside sieve range");
  std::vector<PrimePower> powers;
  std::uint64_t rest = n;
  while (rest > 1) {
    const std::uint64_t p = sieve.smallest_factor(rest);
    int e = 0;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    powers.push_back({p, e});
  }
  return Factorization(n, std::move(powers));
}

/// floor(sqrt(n)), exact over 64 bits.
inline std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && static_cast<unsigned __int128>(r) * r > n) --r;
  while (static_cast<unsigned __int128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

inline bool is_square(std::uint64_t n) {
  const std::uint64_t r = isqrt(n);
  return r * r == n;
}

}  // namespace qtc
