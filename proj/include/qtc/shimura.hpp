#pragma once

// Genus of the Shimura curve X^D and of its Atkin-Lehner quotient X^D/w_D,
// the w_D fixed-point count, and checks of the known small-genus tables.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtc/arith.hpp"
#include "qtc/discriminant.hpp"
#include "qtc/parallel.hpp"
#include "qtc/quadforms.hpp"

namespace qtc {

/// Discriminants with X^D/w_D of genus 0 (isomorphic to P^1 over Q).
inline const std::vector<std::uint64_t> kRationalQuotientDiscriminants = {
    6,  10, 14, 15, 21, 22, 26, 33,  34,  35,  38,  39,  46,  51,  55,
    62, 69, 74, 86, 87, 94, 95, 111, 119, 134, 146, 159, 194, 206};

/// Discriminants with X^D/w_D of genus 1 (elliptic curves of rank one).
inline const std::vector<std::uint64_t> kEllipticQuotientDiscriminants = {
    57, 58, 65, 77, 82, 106, 118, 122, 129, 143, 166, 210, 215, 314, 330, 390, 510, 546};

/// Discriminants for which some p | D has p >= 4 g_D^2.
inline const std::vector<std::uint64_t> kLargePrimeExceptions = {6,  10, 14, 15, 21, 22, 33,
                                                                 34, 38, 46, 58, 82, 94};

namespace detail {

// prod_{p | D} (1 - (k/p)) for k = -4 or -3.
inline std::int64_t local_factor_product(const QuaternionDiscriminant& D, std::int64_t k) {
  std::int64_t prod = 1;
  for (auto p : D.primes()) prod *= 1 - kronecker(k, static_cast<std::int64_t>(p));
  return prod;
}

inline std::uint64_t require_nonnegative_integer(const Rational& value, const char* what) {
  if (value.denominator() != 1 || value.numerator() < 0) {
    throw std::logic_error(std::string(what) + " evaluated to " + to_string(value) +
                           ", not a non-negative integer");
  }
  return static_cast<std::uint64_t>(value.numerator());
}

/// beta(D) = prod_{p | D} (p - 1) / 2, as a rational.
inline Rational beta(const QuaternionDiscriminant& D) {
  Rational b{1};
  for (auto p : D.primes()) b *= Rational(static_cast<std::int64_t>(p) - 1, 2);
  return b;
}

/// 6 sqrt(p) < 12 + phi(D) - 7 * 2^omega(D), compared by squaring.
inline bool sufficient_inequality_holds(const QuaternionDiscriminant& D, std::uint64_t p) {
  const auto rhs = 12 + static_cast<__int128>(D.euler_phi()) - 7 * (__int128{1} << D.omega());
  if (rhs <= 0) return false;
  return 36 * static_cast<__int128>(p) < rhs * rhs;
}

}  // namespace detail

/// Exact genus of X^D rather than a floating estimate.
inline Rational genus_XD_exact(const QuaternionDiscriminant& D) {
  return Rational{1} + Rational(static_cast<std::int64_t>(D.euler_phi()), 12) -
         Rational(detail::local_factor_product(D, -4), 4) -
         Rational(detail::local_factor_product(D, -3), 3);
}

inline std::uint64_t genus_XD(const QuaternionDiscriminant& D) {
  return detail::require_nonnegative_integer(genus_XD_exact(D), "genus of X^D");
}

/// Number of geometric fixed points of w_D: h'(-D) + h'(-4D).
inline std::uint64_t fixed_point_count(const QuaternionDiscriminant& D) {
  const auto d = static_cast<std::int64_t>(D.value());
  const std::uint64_t count = hprime(-d) + hprime(-4 * d);
  if (count == 0) throw std::logic_error("w_D has no fixed points; class number enumeration is broken");
  return count;
}

inline Rational genus_quotient_exact(const QuaternionDiscriminant& D) {
  return Rational{1} + Rational(static_cast<std::int64_t>(D.euler_phi()), 24) -
         Rational(detail::local_factor_product(D, -4), 8) -
         Rational(detail::local_factor_product(D, -3), 6) -
         Rational(static_cast<std::int64_t>(fixed_point_count(D)), 4);
}

inline std::uint64_t genus_quotient(const QuaternionDiscriminant& D) {
  return detail::require_nonnegative_integer(genus_quotient_exact(D), "genus of X^D/w_D");
}

enum class QuotientCategory { RationalQuotient, EllipticQuotientPositiveRank, FiniteQuotientPoints };

inline const char* to_string(QuotientCategory c) {
  switch (c) {
    case QuotientCategory::RationalQuotient: return "RationalQuotient";
    case QuotientCategory::EllipticQuotientPositiveRank: return "EllipticQuotientPositiveRank";
    case QuotientCategory::FiniteQuotientPoints: return "FiniteQuotientPoints";
  }
  return "?";
}

inline QuotientCategory category_for_genus(std::uint64_t genus_quotient) {
  if (genus_quotient == 0) return QuotientCategory::RationalQuotient;
  if (genus_quotient == 1) return QuotientCategory::EllipticQuotientPositiveRank;
  return QuotientCategory::FiniteQuotientPoints;
}

struct CurveClassification {
  std::uint64_t D = 0;
  std::uint64_t genus_XD = 0;
  std::uint64_t genus_quotient = 0;
  std::uint64_t fixed_points = 0;
  QuotientCategory category = QuotientCategory::RationalQuotient;

  /// Finitely many rational points on the quotient, so many twists of
  /// (X^D, w_D) violate the Hasse principle.
  bool twist_theorem_applies() const { return category == QuotientCategory::FiniteQuotientPoints; }
};

inline CurveClassification classify(const QuaternionDiscriminant& D) {
  CurveClassification out;
  out.D = D.value();
  out.genus_XD = genus_XD(D);
  out.genus_quotient = genus_quotient(D);
  out.fixed_points = fixed_point_count(D);
  out.category = category_for_genus(out.genus_quotient);
  return out;
}

using GenusFunction = std::function<std::uint64_t(const QuaternionDiscriminant&)>;

struct GenusTableReport {
  std::uint64_t bound = 0;
  bool partial = false;  // bound below the largest tabulated discriminant
  std::vector<std::uint64_t> genus0;
  std::vector<std::uint64_t> genus1;
  std::vector<std::uint64_t> genus0_missing, genus0_extra;
  std::vector<std::uint64_t> genus1_missing, genus1_extra;
  std::uint64_t higher_genus_count = 0;
  std::uint64_t discriminants_checked = 0;

  bool matches() const {
    return genus0_missing.empty() && genus0_extra.empty() && genus1_missing.empty() && genus1_extra.empty();
  }
};

namespace detail {

inline std::vector<std::uint64_t> restrict_to(const std::vector<std::uint64_t>& values, std::uint64_t bound) {
  std::vector<std::uint64_t> out;
  std::copy_if(values.begin(), values.end(), std::back_inserter(out), [bound](auto v) { return v <= bound; });
  return out;
}

inline std::vector<std::uint64_t> set_minus(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  std::vector<std::uint64_t> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace detail

/// Compares {D <= bound : genus(X^D/w_D) = 0 or 1} against the published tables.
inline GenusTableReport verify_genus_tables(std::uint64_t bound, Parallelism par = {},
                                            const GenusFunction& genus = genus_quotient) {
  GenusTableReport report;
  report.bound = bound;
  report.partial = bound < kEllipticQuotientDiscriminants.back();

  const auto discriminants = quaternion_discriminants_up_to(bound);
  const auto genera = parallel_map(discriminants, par, genus);
  for (std::size_t i = 0; i < discriminants.size(); ++i) {
    const auto D = discriminants[i].value();
    if (genera[i] == 0) {
      report.genus0.push_back(D);
    } else if (genera[i] == 1) {
      report.genus1.push_back(D);
    } else {
      ++report.higher_genus_count;
    }
  }
  report.discriminants_checked = discriminants.size();

  const auto expected0 = detail::restrict_to(kRationalQuotientDiscriminants, bound);
  const auto expected1 = detail::restrict_to(kEllipticQuotientDiscriminants, bound);
  report.genus0_missing = detail::set_minus(expected0, report.genus0);
  report.genus0_extra = detail::set_minus(report.genus0, expected0);
  report.genus1_missing = detail::set_minus(expected1, report.genus1);
  report.genus1_extra = detail::set_minus(report.genus1, expected1);
  return report;
}

struct LargePrimeReport {
  std::uint64_t bound = 0;
  std::vector<std::uint64_t> failures;  // D with max p | D >= 4 g_D^2
  std::vector<std::uint64_t> expected;

  bool matches() const { return failures == expected; }
};

/// Checks p < 4 g_D^2 for every p | D and every valid D <= bound.
inline LargePrimeReport verify_large_prime_bound(std::uint64_t bound, Parallelism par = {},
                                       const GenusFunction& genus = genus_XD) {
  LargePrimeReport report;
  report.bound = bound;
  const auto discriminants = quaternion_discriminants_up_to(bound);
  const auto fails = parallel_map(discriminants, par, [&](const QuaternionDiscriminant& D) -> std::uint8_t {
    const auto g = static_cast<unsigned __int128>(genus(D));
    return static_cast<unsigned __int128>(D.largest_prime()) >= 4 * g * g ? 1 : 0;
  });
  for (std::size_t i = 0; i < discriminants.size(); ++i) {
    if (fails[i] != 0) report.failures.push_back(discriminants[i].value());
  }
  report.expected = detail::restrict_to(kLargePrimeExceptions, bound);
  return report;
}

}  // namespace qtc
