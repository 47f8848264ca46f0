// Acceptance suite: one PASS/FAIL line per criterion.
//   qtc_acceptance            run every criterion
//   qtc_acceptance 4 10ii     run the named criteria
// Exit status is 0 iff every selected criterion passed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qtc/cli.hpp"
#include "qtc/qtc.hpp"

namespace {

using namespace qtc;

// Pinned tolerances.
constexpr double kDensityTolerance = 0.10;      // criteria 4, 5
constexpr double kBetaTolerance = 0.05;         // criterion 10(i)
constexpr double kSuperPrimeFactor = 1.05;      // criterion 10(iii)
constexpr std::uint64_t kTableBound = 10000;    // criteria 1, 2, 3, 6
constexpr std::uint64_t kDensityX = 1000000;    // criteria 4, 5, 8, 10
constexpr std::uint64_t kIndicatorN = 100000;   // criterion 7
constexpr std::int64_t kRefusalRange = 20000;   // criterion 9

const Parallelism kPar{0};

struct Outcome {
  bool pass = false;
  std::string detail;
};

QuaternionDiscriminant Q(std::uint64_t n) { return QuaternionDiscriminant::validate(n); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

Outcome genus_tables() {
  std::ostringstream out, err;
  const int code = cli::run({"verify", "--limit", std::to_string(kTableBound), "--format", "json"}, out, err);
  const auto j = nlohmann::json::parse(out.str());
  const auto& t = j["genus_tables"];
  const std::size_t n0 = t["genus0"].size(), n1 = t["genus1"].size();
  const std::uint64_t checked = t["discriminants_checked"], higher = t["higher_genus_count"];
  const bool pass = code == 0 && j["status"] == "match" && n0 == 29 && n1 == 18 && higher == checked - n0 - n1 &&
                    t["genus0"].get<std::vector<std::uint64_t>>() == kRationalQuotientDiscriminants &&
                    t["genus1"].get<std::vector<std::uint64_t>>() == kEllipticQuotientDiscriminants;
  return {pass, "exit " + std::to_string(code) + ", genus 0: " + std::to_string(n0) + ", genus 1: " +
                    std::to_string(n1) + ", genus >= 2: " + std::to_string(higher) + " of " + std::to_string(checked)};
}

Outcome large_prime_set() {
  const auto r = verify_large_prime_bound(kTableBound, kPar);
  return {r.failures == kLargePrimeExceptions, "failure set {" + cli::join(r.failures) + "}"};
}

Outcome fixed_points_and_integrality() {
  std::uint64_t checked = 0, bad = 0;
  for (const auto& D : quaternion_discriminants_up_to(kTableBound)) {
    ++checked;
    const auto d = static_cast<std::int64_t>(D.value());
    const bool positive = hprime(-d) + hprime(-4 * d) > 0;
    const bool integral = genus_XD_exact(D).denominator() == 1 && genus_quotient_exact(D).denominator() == 1;
    bad += positive && integral ? 0 : 1;
  }
  return {bad == 0, std::to_string(checked) + " discriminants, " + std::to_string(bad) + " failures"};
}

Outcome sd_density() {
  const auto pi = prime_sieve(kDensityX).size();
  bool pass = true;
  std::string detail;
  for (std::uint64_t n : {6, 26}) {
    const auto D = Q(n);
    const auto r = density_report(count_SD(kDensityX, TwistSets(D), {kPar}), pi, predicted_density_SD(D));
    pass = pass && r.relative_error < kDensityTolerance;
    detail += "D=" + std::to_string(n) + ": " + to_string(r.empirical) + " vs " + to_string(r.predicted) +
              " (rel " + fmt(r.relative_error) + ") ";
  }
  return {pass, detail};
}

Outcome sprime_density() {
  const auto D = Q(6);
  const auto pi = prime_sieve(kDensityX).size();
  const auto h = field_class_number_hD(D);
  const auto r = density_report(count_SprimeD(kDensityX, TwistSets(D), {kPar}), pi, predicted_density_SprimeD(D));
  return {h == 2 && r.predicted == Rational(1, 4) && r.relative_error < kDensityTolerance,
          "h_6 = " + std::to_string(h) + ", " + to_string(r.empirical) + " vs 1/4 (rel " + fmt(r.relative_error) + ")"};
}

Outcome delta_bound() {
  std::uint64_t violations = 0;
  Rational max{0};
  std::vector<std::uint64_t> attained;
  for (const auto& D : quaternion_discriminants_up_to(kTableBound)) {
    try {
      const auto delta = delta_D(D);
      if (delta > max) max = delta;
      if (delta == kDeltaBound) attained.push_back(D.value());
    } catch (const std::logic_error&) {
      ++violations;
    }
  }
  const bool at6 = !attained.empty() && attained.front() == 6;
  return {violations == 0 && at6 && max == kDeltaBound,
          "max " + to_string(max) + ", equality at {" + cli::join(attained) + "}, " + std::to_string(violations) +
              " violations"};
}

Outcome indicator_equivalence() {
  std::uint64_t mismatches = 0, members = 0;
  for (std::uint64_t n : {6, 26}) {
    const auto D = Q(n);
    const EtaCoefficients coeff(D);
    const TwistSets sets(D);
    for (std::uint64_t m = 1; m <= kIndicatorN; ++m) {
      const bool in = sets.in_etaD(-static_cast<std::int64_t>(m));
      members += in ? 1 : 0;
      mismatches += (coeff.a(m) == 1) == in ? 0 : 1;
    }
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches, " + std::to_string(members) + " members"};
}

std::map<std::uint64_t, std::vector<std::uint64_t>>& eta_members() {
  static std::map<std::uint64_t, std::vector<std::uint64_t>> cache;
  if (cache.empty()) {
    for (std::uint64_t n : {6, 26, 551}) cache[n] = members_eta(kDensityX, TwistSets(Q(n)), kPar);
  }
  return cache;
}

Outcome congruence_properties() {
  std::uint64_t eta_bad = 0, eta_count = 0, sd_bad = 0, sd_count = 0;
  for (auto& [n, members] : eta_members()) {
    for (auto m : members) {
      ++eta_count;
      const std::int64_t d = -static_cast<std::int64_t>(m);
      eta_bad += ((d % 8) + 8) % 8 == 5 ? 0 : 1;
    }
    for (auto l : members_SD(kDensityX, TwistSets(Q(n)), kPar)) {
      ++sd_count;
      sd_bad += oracle::kronecker(-static_cast<std::int64_t>(n), static_cast<std::int64_t>(l)) == -1 ? 0 : 1;
    }
  }
  return {eta_bad == 0 && sd_bad == 0, std::to_string(eta_count) + " twists (" + std::to_string(eta_bad) +
                                           " not 5 mod 8), " + std::to_string(sd_count) + " S_D primes (" +
                                           std::to_string(sd_bad) + " split)"};
}

// First failing condition of d for eta_D, computed from the definition with
// trial division and Euler's criterion.
std::optional<EtaCondition> oracle_first_failure(std::int64_t d, const QuaternionDiscriminant& D,
                                                 const std::vector<std::uint64_t>& small_primes) {
  if (d >= 0) return EtaCondition::Negative;
  const auto f = oracle::trial_factor(static_cast<std::uint64_t>(-d));
  for (std::size_t i = 1; i < f.size(); ++i) {
    if (f[i] == f[i - 1]) return EtaCondition::Squarefree;
  }
  if (f.size() % 2 == 0) return EtaCondition::OddPrimeCount;
  for (auto l : f) {
    if (l % 8 != 3) return EtaCondition::ResidueMod8;
  }
  for (auto l : f) {
    for (auto q : D.odd_primes()) {
      if (oracle::legendre(-static_cast<std::int64_t>(l), q) != -1) return EtaCondition::NonResidueModQ;
    }
  }
  for (auto p : small_primes) {
    if (oracle::legendre(d, p) != -1) return EtaCondition::InertBelowBound;
  }
  return std::nullopt;
}

Outcome certificates() {
  std::uint64_t issued = 0, refused = 0, bad = 0;
  for (auto& [n, members] : eta_members()) {
    const TwistSets sets(Q(n));
    for (auto m : members) {
      try {
        const auto cert = sets.certify(-static_cast<std::int64_t>(m));
        const bool ok = cert.complete && cert.entries.size() == 6;
        bad += ok ? 0 : 1;
        ++issued;
      } catch (const std::exception&) {
        ++bad;
      }
    }
    std::vector<std::uint64_t> small;
    const auto g = genus_XD(Q(n));
    for (std::uint64_t p = 3; p <= 4 * g * g; p += 2) {
      if (oracle::trial_is_prime(p) && n % p != 0) small.push_back(p);
    }
    for (std::int64_t d = -kRefusalRange; d <= 50; ++d) {
      if (d == 0) continue;
      const auto expected = oracle_first_failure(d, Q(n), small);
      if (!expected) continue;
      try {
        sets.certify(d);
        ++bad;
      } catch (const CertificateRefusal& r) {
        ++refused;
        bad += r.condition() == *expected ? 0 : 1;
      }
    }
  }
  return {bad == 0, std::to_string(issued) + " certificates, " + std::to_string(refused) + " refusals, " +
                        std::to_string(bad) + " errors"};
}

Outcome synthetic_recovery() {
  bool pass = true;
  std::string detail;
  for (double beta : {0.5, 0.875, 1.0, 2.0}) {
    CountingSeries s{"synthetic", {}};
    for (auto x : checkpoint_grid(10000000)) {
      const double lx = std::log(static_cast<double>(x));
      s.checkpoints.push_back({x, static_cast<std::uint64_t>(std::floor(5.0 * x / std::pow(lx, beta)))});
    }
    const auto fit = fit_asymptotic(s);
    pass = pass && std::abs(fit.beta_hat - beta) < kBetaTolerance;
    detail += fmt(beta) + " -> " + fmt(fit.beta_hat) + " ";
  }
  return {pass, detail};
}

Outcome zero_density_trend() {
  const std::vector<std::uint64_t> decades = {1000, 10000, 100000, 1000000};
  bool pass = true;
  std::string detail;
  for (std::uint64_t n : {6, 26}) {
    const TwistSets sets(Q(n));
    for (const auto& series : {count_etaD(kDensityX, sets, {kPar}), count_CD_smooth(kDensityX, sets, {kPar})}) {
      double prev = 2;
      detail += series.set_name + "_" + std::to_string(n) + ":";
      for (auto x : decades) {
        const double density = static_cast<double>(series.count_at(x)) / static_cast<double>(x);
        pass = pass && density < prev;
        prev = density;
        detail += " " + fmt(density);
      }
      detail += "  ";
    }
  }
  return {pass, detail};
}

Outcome super_prime_growth() {
  bool pass = false;
  std::string detail;
  for (std::uint64_t n : {6, 10, 14, 22, 26, 34}) {
    const auto members = members_eta(kDensityX, TwistSets(Q(n)), kPar);
    std::uint64_t primes = 0;
    for (auto m : members) primes += is_prime(m) ? 1 : 0;
    const double ratio = primes == 0 ? 0.0 : static_cast<double>(members.size()) / static_cast<double>(primes);
    pass = pass || (members.size() > primes && ratio > kSuperPrimeFactor);
    detail += "D=" + std::to_string(n) + ": " + std::to_string(members.size()) + "/" + std::to_string(primes) + " = " +
              fmt(ratio) + "  ";
  }
  return {pass, detail + "(need > " + fmt(kSuperPrimeFactor) + ")"};
}

struct Criterion {
  std::string id;
  std::string name;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {"1", "genus 0 / genus 1 tables up to 10^4", genus_tables},
      {"2", "p >= 4g^2 exception set up to 10^4", large_prime_set},
      {"3", "fixed-point positivity and genus integrality", fixed_points_and_integrality},
      {"4", "S_D prime density at 10^6", sd_density},
      {"5", "S'_D prime density at 10^6", sprime_density},
      {"6", "delta_D <= 3/8 with equality at D = 6", delta_bound},
      {"7", "a_n is the indicator of -eta_D", indicator_equivalence},
      {"8", "eta_D members are 5 mod 8; S_D primes are inert", congruence_properties},
      {"9", "certificates issued and refused", certificates},
      {"10i", "synthetic exponent recovery", synthetic_recovery},
      {"10ii", "eta_D(X)/X and smooth count density decrease", zero_density_trend},
      {"10iii", "eta_D(X) exceeds 1.05 x its prime members", super_prime_growth},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> selected(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& c : criteria()) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s [%s] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", c.id.c_str(), c.name.c_str(), o.detail.c_str(),
                secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
