#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "qtc/twistsets.hpp"

namespace qtc {
namespace {

QuaternionDiscriminant Q(std::uint64_t n) { return QuaternionDiscriminant::validate(n); }

TEST(SD, Examples) {
  EXPECT_TRUE(in_SD(19, Q(6)));
  EXPECT_FALSE(in_SD(11, Q(6)));
  EXPECT_FALSE(in_SD(3, Q(6)));
  EXPECT_FALSE(in_SD(2, Q(6)));
  EXPECT_THROW(in_SD(9, Q(6)), std::invalid_argument);
}

TEST(SprimeD, Examples) {
  EXPECT_TRUE(in_SprimeD(7, Q(6)));
  EXPECT_FALSE(in_SprimeD(5, Q(6)));
  EXPECT_FALSE(in_SprimeD(19, Q(6)));
  EXPECT_THROW(in_SprimeD(3, Q(6)), std::invalid_argument);
  EXPECT_THROW(in_SprimeD(2, Q(6)), std::invalid_argument);
}

TEST(ClassifyPrime, Examples) {
  EXPECT_EQ(classify_prime(2, Q(6)).kind, PrimeClassKind::Divides2D);
  EXPECT_EQ(classify_prime(3, Q(6)).kind, PrimeClassKind::Divides2D);
  EXPECT_EQ(classify_prime(7, Q(6)).kind, PrimeClassKind::InSPrimeD);
  EXPECT_EQ(classify_prime(5, Q(6)).kind, PrimeClassKind::Other);
  EXPECT_EQ(classify_prime(19, Q(6)).kind, PrimeClassKind::InSD);
}

// S_D from its definition with the Legendre symbol by Euler's criterion.
bool oracle_in_SD(std::uint64_t l, const QuaternionDiscriminant& D) {
  if (l % 8 != 3) return false;
  for (auto q : D.odd_primes()) {
    if (oracle::legendre(-static_cast<std::int64_t>(l), q) != -1) return false;
  }
  return true;
}

TEST(SD, MatchesDefinitionAndImpliesNonSplitting) {
  for (std::uint64_t n : {6, 10, 15, 26, 35, 551, 546}) {
    const auto D = Q(n);
    const TwistSets sets(D);
    for (auto l : prime_sieve(100000)) {
      const bool in = sets.in_SD(l);
      ASSERT_EQ(in, oracle_in_SD(l, D)) << n << ' ' << l;
      // (f): members are inert in Q(sqrt(-D)).
      if (in) {
        ASSERT_EQ(oracle::kronecker(-static_cast<std::int64_t>(n), static_cast<std::int64_t>(l)), -1);
      }
    }
  }
}

TEST(SprimeD, MatchesBruteForceRepresentation) {
  for (std::uint64_t n : {6, 15, 26, 35, 39}) {
    const auto D = Q(n);
    const auto disc = field_discriminant(D);
    const auto f = principal_form(disc);
    const TwistSets sets(D);
    for (auto l : prime_sieve(2000)) {
      if (l == 2 || n % l == 0) continue;
      ASSERT_EQ(sets.in_SprimeD(l), oracle::represents(f.a, f.b, f.c, static_cast<std::int64_t>(l)))
          << n << ' ' << l;
    }
  }
}

TEST(ClassifyPrime, SDAndSprimeDAreDisjoint) {
  for (const auto& D : quaternion_discriminants_up_to(300)) {
    const TwistSets sets(D);
    for (auto p : prime_sieve(5000)) ASSERT_NO_THROW(sets.classify_prime(p)) << D.value() << ' ' << p;
  }
}

TEST(Eta, Examples) {
  EXPECT_TRUE(in_etaD(-19, Q(6)));
  EXPECT_FALSE(in_etaD(-209, Q(6)));
  EXPECT_FALSE(in_etaD(-19 * 43, Q(6)));  // two prime factors
  EXPECT_FALSE(in_etaD(19, Q(6)));
  EXPECT_FALSE(in_etaD(0, Q(6)));
  EXPECT_TRUE(in_etaD(-19 * 43 * 67, Q(6)));
}

TEST(Eta, FirstFailureIsReported) {
  const TwistSets sets(Q(6));
  EXPECT_EQ(sets.check_eta(5).failed, EtaCondition::Negative);
  EXPECT_EQ(sets.check_eta(-19 * 19).failed, EtaCondition::Squarefree);
  EXPECT_EQ(sets.check_eta(-19 * 43).failed, EtaCondition::OddPrimeCount);
  EXPECT_EQ(sets.check_eta(-7).failed, EtaCondition::ResidueMod8);
  EXPECT_EQ(sets.check_eta(-11).failed, EtaCondition::NonResidueModQ);
  // g(X^26) = 2: condition (d) runs over 3, 5, 7, 11.
  const TwistSets s26(Q(26));
  EXPECT_EQ(s26.inert_primes(), (std::vector<std::uint64_t>{3, 5, 7, 11}));
  EXPECT_EQ(s26.check_eta(-19).failed, EtaCondition::InertBelowBound);
  EXPECT_TRUE(s26.check_eta(-67).accepted());
}

TEST(Eta, ParityOfPrimeCount) {
  // Any product of two S_D primes is excluded whatever D is.
  for (std::uint64_t n : {6, 26, 551}) {
    const TwistSets sets(Q(n));
    std::vector<std::uint64_t> s;
    for (auto l : prime_sieve(2000)) {
      if (sets.in_SD(l)) s.push_back(l);
    }
    for (std::size_t i = 0; i + 1 < s.size() && i < 20; ++i) {
      const auto d = -static_cast<std::int64_t>(s[i] * s[i + 1]);
      ASSERT_EQ(sets.check_eta(d).failed, EtaCondition::OddPrimeCount);
    }
  }
}

TEST(Eta, CongruenceAndGenusZeroClosure) {
  // For genus 0, condition (d) is empty, so products of three S_D primes are members.
  const TwistSets sets(Q(6));
  std::vector<std::uint64_t> s;
  for (auto l : prime_sieve(400)) {
    if (sets.in_SD(l)) s.push_back(l);
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      for (std::size_t k = j + 1; k < s.size(); ++k) {
        const auto d = -static_cast<std::int64_t>(s[i] * s[j] * s[k]);
        ASSERT_TRUE(sets.in_etaD(d)) << d;
        ASSERT_EQ(((d % 8) + 8) % 8, 5);  // (e)
      }
    }
  }
}

TEST(Certify, CompleteCertificate) {
  const auto cert = certify(-19, Q(6));
  EXPECT_TRUE(cert.complete);
  ASSERT_EQ(cert.entries.size(), 6U);
  std::set<PlaceClass> classes;
  for (const auto& e : cert.entries) {
    classes.insert(e.place_class);
    EXPECT_TRUE(e.holds);
    EXPECT_FALSE(e.citation.empty());
    EXPECT_FALSE(e.congruence_check.empty());
  }
  EXPECT_EQ(classes.size(), 6U);
}

TEST(Certify, Refusals) {
  try {
    certify(-11, Q(6));
    FAIL();
  } catch (const CertificateRefusal& r) {
    EXPECT_EQ(r.condition(), EtaCondition::NonResidueModQ);
    EXPECT_NE(std::string(r.what()).find("condition (b)"), std::string::npos);
  }
  try {
    certify(5, Q(6));
    FAIL();
  } catch (const CertificateRefusal& r) {
    EXPECT_EQ(r.condition(), EtaCondition::Negative);
    EXPECT_NE(std::string(r.what()).find("d < 0"), std::string::npos);
  }
}

TEST(Certify, CitationDependsOnParityOfD) {
  const auto even = certify(-19, Q(6));
  const auto odd_D = Q(15);
  const TwistSets sets(odd_D);
  std::int64_t d = 0;
  for (auto l : prime_sieve(2000)) {
    if (sets.in_etaD(-static_cast<std::int64_t>(l))) {
      d = -static_cast<std::int64_t>(l);
      break;
    }
  }
  ASSERT_NE(d, 0);
  const auto odd = sets.certify(d);
  EXPECT_NE(even.entries[2].citation, odd.entries[2].citation);
}

TEST(TwistSets, CopiesShareTheInertPrimeCache) {
  const TwistSets a(Q(551));
  const TwistSets b = a;
  EXPECT_EQ(&a.inert_primes(), &b.inert_primes());
  EXPECT_EQ(static_cast<std::uint64_t>(a.inert_bound()), 4U * 43U * 43U);
}

}  // namespace
}  // namespace qtc
