#pragma once

// Prime sets S_D, S'_D, C_D and the twist set eta_D attached to a quaternion
// discriminant D, plus local-solubility certificates for twists d in eta_D.

#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qtc/arith.hpp"
#include "qtc/discriminant.hpp"
#include "qtc/quadforms.hpp"
#include "qtc/shimura.hpp"

namespace qtc {

enum class PrimeClassKind { InSD, InSPrimeD, Divides2D, Other };

inline const char* to_string(PrimeClassKind k) {
  switch (k) {
    case PrimeClassKind::InSD: return "InSD";
    case PrimeClassKind::InSPrimeD: return "InSPrimeD";
    case PrimeClassKind::Divides2D: return "Divides2D";
    case PrimeClassKind::Other: return "Other";
  }
  return "?";
}

struct PrimeClass {
  std::uint64_t p = 0;
  PrimeClassKind kind = PrimeClassKind::Other;

  bool in_CD() const { return kind != PrimeClassKind::Other; }
};

/// The defining conditions of eta_D, in the order they are checked.
enum class EtaCondition {
  Negative,        // d < 0
  Squarefree,      // (c) |d| squarefree
  OddPrimeCount,   // (c) odd number of prime factors
  ResidueMod8,     // (a) every prime factor is 3 mod 8
  NonResidueModQ,  // (b) (-l/q) = -1 for every prime factor l and q | Dbar
  InertBelowBound  // (d) (d/p) = -1 for primes p in (2, 4g^2], p not dividing D
};

inline const char* to_string(EtaCondition c) {
  switch (c) {
    case EtaCondition::Negative: return "d < 0";
    case EtaCondition::Squarefree: return "condition (c): |d| squarefree";
    case EtaCondition::OddPrimeCount: return "condition (c): odd number of prime factors";
    case EtaCondition::ResidueMod8: return "condition (a): prime factors = 3 mod 8";
    case EtaCondition::NonResidueModQ: return "condition (b): (-l/q) = -1 for q | Dbar";
    case EtaCondition::InertBelowBound: return "condition (d): (d/p) = -1 for p in (2, 4g^2]";
  }
  return "?";
}

struct EtaVerdict {
  std::optional<EtaCondition> failed;
  std::string detail;

  bool accepted() const { return !failed.has_value(); }
};

/// A negative squarefree twist parameter with its factorization.
struct TwistCandidate {
  std::int64_t d = 0;
  Factorization factorization;

  bool odd_parity() const { return factorization.omega() % 2 == 1; }

  static TwistCandidate make(std::int64_t d) {
    if (d >= 0) throw std::invalid_argument("twist candidate must be negative");
    Factorization f = factorize(detail::magnitude(d));
    if (!f.is_squarefree()) throw std::invalid_argument("twist candidate must be squarefree");
    return {d, std::move(f)};
  }
};

enum class PlaceClass { Real, DividesD, Two, DividesDbar, LargeUnramified, SmallUnramified };

inline const char* to_string(PlaceClass p) {
  switch (p) {
    case PlaceClass::Real: return "real";
    case PlaceClass::DividesD: return "p | d";
    case PlaceClass::Two: return "p = 2";
    case PlaceClass::DividesDbar: return "p | Dbar";
    case PlaceClass::LargeUnramified: return "p > 4g^2, p does not divide Dd";
    case PlaceClass::SmallUnramified: return "2 < p <= 4g^2, p does not divide D";
  }
  return "?";
}

struct CertificateEntry {
  PlaceClass place_class = PlaceClass::Real;
  std::string congruence_check;
  std::string citation;
  bool holds = false;
};

/// Witness that Y_d = twist of (X^D, w_D) by Q(sqrt d) has points over every
/// completion of Q, one entry per class of places.
struct LocalCertificate {
  std::uint64_t D = 0;
  std::int64_t d = 0;
  std::uint64_t genus_XD = 0;
  std::vector<CertificateEntry> entries;
  bool complete = false;
};

class CertificateRefusal : public std::domain_error {
 public:
  CertificateRefusal(std::int64_t d, EtaCondition condition, const std::string& detail)
      : std::domain_error("d = " + std::to_string(d) + " refused: " + to_string(condition) +
                          (detail.empty() ? "" : " (" + detail + ")")),
        condition_(condition) {}

  EtaCondition condition() const { return condition_; }

 private:
  EtaCondition condition_;
};

/// Per-discriminant context: caches D's odd primes, g = genus(X^D) and the
/// primes in (2, 4g^2] used by condition (d). Copies share the cache.
class TwistSets {
 public:
  explicit TwistSets(QuaternionDiscriminant D)
      : D_(std::move(D)),
        odd_primes_(D_.odd_primes()),
        genus_(genus_XD(D_)),
        splitting_disc_(field_discriminant(D_)),
        inert_primes_(std::make_shared<LazyPrimes>()) {}

  const QuaternionDiscriminant& discriminant() const { return D_; }
  std::uint64_t genus() const { return genus_; }

  /// 4g^2, the upper end of the interval in condition (d).
  unsigned __int128 inert_bound() const { return 4 * static_cast<unsigned __int128>(genus_) * genus_; }

  bool in_SD(std::uint64_t l) const {
    if (!is_prime(l)) throw std::invalid_argument("in_SD: " + std::to_string(l) + " is not prime");
    return in_SD_prime(l);
  }

  bool in_SprimeD(std::uint64_t l) const {
    if (l % 2 == 0 || !is_prime(l)) throw std::invalid_argument("in_SprimeD: l must be an odd prime");
    if (D_.value() % l == 0) throw std::invalid_argument("in_SprimeD: l divides 2D");
    return kronecker(-static_cast<std::int64_t>(D_.value()), static_cast<std::int64_t>(l)) == 1 &&
           represented_by_principal_form(splitting_disc_, l);
  }

  PrimeClass classify_prime(std::uint64_t p) const {
    if (!is_prime(p)) throw std::invalid_argument("classify_prime: " + std::to_string(p) + " is not prime");
    if (p == 2 || D_.value() % p == 0) return {p, PrimeClassKind::Divides2D};
    const bool s = in_SD_prime(p);
    const bool s_prime = in_SprimeD(p);
    if (s && s_prime) throw std::logic_error("S_D and S'_D overlap at " + std::to_string(p));
    if (s) return {p, PrimeClassKind::InSD};
    if (s_prime) return {p, PrimeClassKind::InSPrimeD};
    return {p, PrimeClassKind::Other};
  }

  EtaVerdict check_eta(std::int64_t d) const {
    if (d >= 0) return {EtaCondition::Negative, "d = " + std::to_string(d)};
    return check_eta(d, factorize(detail::magnitude(d)));
  }

  /// As check_eta(d), with the factorization of |d| supplied by the caller.
  EtaVerdict check_eta(std::int64_t d, const Factorization& abs_d) const {
    if (d >= 0) return {EtaCondition::Negative, "d = " + std::to_string(d)};
    if (!abs_d.is_squarefree()) return {EtaCondition::Squarefree, ""};
    if (abs_d.omega() % 2 == 0)
      return {EtaCondition::OddPrimeCount, std::to_string(abs_d.omega()) + " prime factors"};
    for (const auto& pp : abs_d.powers()) {
      if (pp.prime % 8 != 3)
        return {EtaCondition::ResidueMod8, std::to_string(pp.prime) + " = " + std::to_string(pp.prime % 8) + " mod 8"};
    }
    for (const auto& pp : abs_d.powers()) {
      for (auto q : odd_primes_) {
        const int k = kronecker(-static_cast<std::int64_t>(pp.prime), static_cast<std::int64_t>(q));
        if (k != -1)
          return {EtaCondition::NonResidueModQ,
                  "(-" + std::to_string(pp.prime) + "/" + std::to_string(q) + ") = " + std::to_string(k)};
      }
    }
    for (auto p : inert_primes()) {
      const int k = kronecker(d, static_cast<std::int64_t>(p));
      if (k != -1)
        return {EtaCondition::InertBelowBound,
                "(" + std::to_string(d) + "/" + std::to_string(p) + ") = " + std::to_string(k)};
    }
    return {};
  }

  bool in_etaD(std::int64_t d) const { return check_eta(d).accepted(); }

  LocalCertificate certify(std::int64_t d) const {
    const EtaVerdict verdict = check_eta(d);
    if (!verdict.accepted()) throw CertificateRefusal(d, *verdict.failed, verdict.detail);
    return build_certificate(d);
  }

  /// Primes p with 2 < p <= 4g^2 and p not dividing D.
  const std::vector<std::uint64_t>& inert_primes() const {
    std::call_once(inert_primes_->once, [this] {
      const auto bound = inert_bound();
      if (bound < 3) return;
      if (bound > std::numeric_limits<std::uint32_t>::max())
        throw std::out_of_range("4g^2 exceeds the supported sieve range");
      for (auto p : prime_sieve(static_cast<std::uint64_t>(bound))) {
        if (p > 2 && D_.value() % p != 0) inert_primes_->primes.push_back(p);
      }
    });
    return inert_primes_->primes;
  }

 private:
  struct LazyPrimes {
    std::once_flag once;
    std::vector<std::uint64_t> primes;
  };

  bool in_SD_prime(std::uint64_t l) const {
    if (l % 8 != 3) return false;
    for (auto q : odd_primes_) {
      if (kronecker(-static_cast<std::int64_t>(l), static_cast<std::int64_t>(q)) != -1) return false;
    }
    return true;
  }

  LocalCertificate build_certificate(std::int64_t d) const;

  QuaternionDiscriminant D_;
  std::vector<std::uint64_t> odd_primes_;
  std::uint64_t genus_;
  ImaginaryQuadraticDiscriminant splitting_disc_;
  std::shared_ptr<LazyPrimes> inert_primes_;
};

inline LocalCertificate TwistSets::build_certificate(std::int64_t d) const {
  constexpr const char* kStankewicz = "Stankewicz (2014), ";
  const auto abs_d = factorize(detail::magnitude(d));
  const std::string ds = std::to_string(d);
  const std::string bound = [this] {
    const auto b = inert_bound();
    return b > std::numeric_limits<std::uint64_t>::max() ? std::string(">2^64")
                                                         : std::to_string(static_cast<std::uint64_t>(b));
  }();

  LocalCertificate cert;
  cert.D = D_.value();
  cert.d = d;
  cert.genus_XD = genus_;

  cert.entries.push_back({PlaceClass::Real, "d = " + ds + " < 0",
                          "Shimura (1975): X^D(R) is empty; Clark (2003): (X^D/w_D)(R) is nonempty; "
                          "hence Y_d(R) is nonempty iff d < 0",
                          d < 0});

  {
    std::string check;
    bool holds = true;
    for (const auto& pp : abs_d.powers()) {
      const bool in_s = in_SD_prime(pp.prime);
      holds = holds && in_s;
      if (!check.empty()) check += "; ";
      check += std::to_string(pp.prime) + " in S_D (= 3 mod 8, (-" + std::to_string(pp.prime) +
               "/q) = -1 for q | Dbar)";
    }
    cert.entries.push_back({PlaceClass::DividesD, check, std::string(kStankewicz) + "Thm. 4.1.3 and Thm. 4.1.5", holds});
  }

  {
    const std::int64_t r = ((d % 8) + 8) % 8;
    cert.entries.push_back({PlaceClass::Two,
                            "d = " + std::to_string(r) + " mod 8, so 2 is inert in Q(sqrt(" + ds + "))",
                            std::string(kStankewicz) + (D_.is_even() ? "Thm. 5.1 (2 | D)" : "Cor. 3.17 (2 does not divide D)"),
                            r == 5 && kronecker(d, 2) == -1});
  }

  {
    std::string check;
    bool holds = true;
    for (auto q : odd_primes_) {
      const int k = kronecker(d, static_cast<std::int64_t>(q));
      holds = holds && k == -1;
      if (!check.empty()) check += "; ";
      check += "(" + ds + "/" + std::to_string(q) + ") = " + std::to_string(k);
    }
    cert.entries.push_back({PlaceClass::DividesDbar, check + ", so every p | Dbar is inert",
                            std::string(kStankewicz) + "Cor. 5.2", holds});
  }

  cert.entries.push_back({PlaceClass::LargeUnramified,
                          "no congruence condition; 4g^2 = " + bound + " with g = " + std::to_string(genus_),
                          std::string(kStankewicz) + "Thm. 3.1", true});

  {
    const auto& small = inert_primes();
    bool holds = true;
    for (auto p : small) {
      const bool inert = kronecker(d, static_cast<std::int64_t>(p)) == -1;
      const bool coprime = abs_d.value() % p != 0;
      holds = holds && inert && coprime;
    }
    const std::string check =
        small.empty() ? "vacuous: no primes in (2, " + bound + "] prime to D"
                      : "(" + ds + "/p) = -1 and p does not divide d for all " + std::to_string(small.size()) +
                            " primes p in (2, " + bound + "] prime to D";
    cert.entries.push_back({PlaceClass::SmallUnramified, check, std::string(kStankewicz) + "Cor. 3.17", holds});
  }

  cert.complete = cert.entries.size() == 6;
  for (const auto& e : cert.entries) cert.complete = cert.complete && e.holds;
  if (!cert.complete) throw std::logic_error("accepted twist " + ds + " failed a derived local check");
  return cert;
}

inline bool in_SD(std::uint64_t l, const QuaternionDiscriminant& D) { return TwistSets(D).in_SD(l); }
inline bool in_SprimeD(std::uint64_t l, const QuaternionDiscriminant& D) { return TwistSets(D).in_SprimeD(l); }
inline PrimeClass classify_prime(std::uint64_t p, const QuaternionDiscriminant& D) {
  return TwistSets(D).classify_prime(p);
}
/// d in eta_D. Non-negative d is never a member.
inline bool in_etaD(std::int64_t d, const QuaternionDiscriminant& D) { return TwistSets(D).in_etaD(d); }
inline LocalCertificate certify(std::int64_t d, const QuaternionDiscriminant& D) { return TwistSets(D).certify(d); }

}  // namespace qtc
