#pragma once

// Counting functions for S_D, S'_D, eta_D and the C_D-smooth integers,
// empirical densities, the coefficient functions b_n / a_n whose support is
// -eta_D, and log-power asymptotic fits N(X) ~ c X / log^beta X.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qtc/arith.hpp"
#include "qtc/discriminant.hpp"
#include "qtc/parallel.hpp"
#include "qtc/quadforms.hpp"
#include "qtc/shimura.hpp"
#include "qtc/twistsets.hpp"

namespace qtc {

struct Checkpoint {
  std::uint64_t x = 0;
  std::uint64_t count = 0;

  Rational density() const {
    return Rational(static_cast<std::int64_t>(count), static_cast<std::int64_t>(x));
  }

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

struct CountingSeries {
  std::string set_name;
  std::vector<Checkpoint> checkpoints;

  bool is_monotone() const {
    for (std::size_t i = 1; i < checkpoints.size(); ++i) {
      if (checkpoints[i].x <= checkpoints[i - 1].x || checkpoints[i].count < checkpoints[i - 1].count) return false;
    }
    return true;
  }

  const Checkpoint& final() const { return checkpoints.back(); }

  std::uint64_t count_at(std::uint64_t x) const {
    for (const auto& c : checkpoints) {
      if (c.x == x) return c.count;
    }
    throw std::out_of_range("no checkpoint at X = " + std::to_string(x));
  }
};

/// 10^(k / per_decade) rounded, for k >= per_decade, up to limit; limit is
/// always the last entry.
inline std::vector<std::uint64_t> checkpoint_grid(std::uint64_t limit, unsigned per_decade = 4) {
  if (limit == 0) throw std::invalid_argument("checkpoint_grid: limit must be positive");
  if (per_decade == 0) throw std::invalid_argument("checkpoint_grid: per_decade must be positive");
  std::vector<std::uint64_t> grid;
  for (unsigned k = per_decade;; ++k) {
    const auto x = static_cast<std::uint64_t>(std::llround(std::pow(10.0, static_cast<double>(k) / per_decade)));
    if (x > limit) break;
    if (grid.empty() || grid.back() != x) grid.push_back(x);
  }
  if (grid.empty() || grid.back() != limit) grid.push_back(limit);
  return grid;
}

/// Series of #{m in members : m <= x} over a grid; members sorted ascending.
inline CountingSeries series_from_members(std::string name, const std::vector<std::uint64_t>& members,
                                          const std::vector<std::uint64_t>& grid) {
  CountingSeries series{std::move(name), {}};
  for (auto x : grid) {
    const auto count = std::upper_bound(members.begin(), members.end(), x) - members.begin();
    series.checkpoints.push_back({x, static_cast<std::uint64_t>(count)});
  }
  return series;
}

struct ScanOptions {
  Parallelism parallelism{};
  unsigned per_decade = 4;
};

namespace detail {

template <typename Pred>
std::vector<std::uint64_t> filter_primes(const std::vector<std::uint64_t>& primes, Parallelism par, Pred pred) {
  const auto flags = parallel_map(primes, par, [&](std::uint64_t p) -> std::uint8_t { return pred(p) ? 1 : 0; });
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    if (flags[i] != 0) out.push_back(primes[i]);
  }
  return out;
}

}  // namespace detail

/// Primes l <= limit in S_D.
inline std::vector<std::uint64_t> members_SD(std::uint64_t limit, const TwistSets& sets, Parallelism par = {}) {
  if (limit < 2) return {};
  return detail::filter_primes(prime_sieve(limit), par, [&](std::uint64_t l) { return sets.in_SD(l); });
}

/// Primes l <= limit, l not dividing 2D, in S'_D.
inline std::vector<std::uint64_t> members_SprimeD(std::uint64_t limit, const TwistSets& sets, Parallelism par = {}) {
  if (limit < 2) return {};
  const auto D = sets.discriminant().value();
  return detail::filter_primes(prime_sieve(limit), par,
                               [&](std::uint64_t l) { return l != 2 && D % l != 0 && sets.in_SprimeD(l); });
}

/// Primes p <= limit in C_D = S_D u S'_D u {p | 2D}.
inline std::vector<std::uint64_t> members_CD(std::uint64_t limit, const TwistSets& sets, Parallelism par = {}) {
  if (limit < 2) return {};
  return detail::filter_primes(prime_sieve(limit), par,
                               [&](std::uint64_t p) { return sets.classify_prime(p).in_CD(); });
}

/// |d| for d in eta_D with |d| <= limit, ascending.
inline std::vector<std::uint64_t> members_eta(std::uint64_t limit, const TwistSets& sets, Parallelism par = {}) {
  if (limit < 1) return {};
  if (limit > std::numeric_limits<std::uint32_t>::max()) throw std::out_of_range("members_eta: limit too large");
  const FactorSieve sieve(static_cast<std::uint32_t>(limit));
  const std::size_t workers = std::max<std::size_t>(1, par.resolved());
  std::vector<std::vector<std::uint64_t>> chunks(workers);
  const std::size_t chunk_len = (limit + workers - 1) / workers;
  parallel_for(workers, par, [&](std::size_t begin, std::size_t end) {
    for (std::size_t w = begin; w < end; ++w) {
      const std::uint64_t lo = 2 + w * chunk_len;
      const std::uint64_t hi = std::min<std::uint64_t>(limit, lo + chunk_len - 1);
      for (std::uint64_t n = lo; n <= hi; ++n) {
        if (sets.check_eta(-static_cast<std::int64_t>(n), factorize_with(sieve, n)).accepted())
          chunks[w].push_back(n);
      }
    }
  });
  std::vector<std::uint64_t> out;
  for (auto& c : chunks) out.insert(out.end(), c.begin(), c.end());
  return out;
}

inline CountingSeries count_SD(std::uint64_t X, const TwistSets& sets, const ScanOptions& opts = {}) {
  if (X < 2) throw std::invalid_argument("count_SD: X must be >= 2");
  return series_from_members("SD", members_SD(X, sets, opts.parallelism), checkpoint_grid(X, opts.per_decade));
}

inline CountingSeries count_SprimeD(std::uint64_t X, const TwistSets& sets, const ScanOptions& opts = {}) {
  if (X < 2) throw std::invalid_argument("count_SprimeD: X must be >= 2");
  return series_from_members("SprimeD", members_SprimeD(X, sets, opts.parallelism),
                             checkpoint_grid(X, opts.per_decade));
}

inline CountingSeries count_CD_primes(std::uint64_t X, const TwistSets& sets, const ScanOptions& opts = {}) {
  if (X < 2) throw std::invalid_argument("count_CD_primes: X must be >= 2");
  return series_from_members("CD", members_CD(X, sets, opts.parallelism), checkpoint_grid(X, opts.per_decade));
}

inline CountingSeries count_etaD(std::uint64_t X, const TwistSets& sets, const ScanOptions& opts = {}) {
  if (X < 2) throw std::invalid_argument("count_etaD: X must be >= 2");
  return series_from_members("eta", members_eta(X, sets, opts.parallelism), checkpoint_grid(X, opts.per_decade));
}

/// n <= X all of whose prime factors lie in C_D (n = 1 included).
inline CountingSeries count_CD_smooth(std::uint64_t X, const TwistSets& sets, const ScanOptions& opts = {}) {
  if (X < 1) throw std::invalid_argument("count_CD_smooth: X must be >= 1");
  const auto grid = checkpoint_grid(X, opts.per_decade);
  CountingSeries series{"CD_smooth", {}};
  if (X == 1) {
    series.checkpoints.push_back({1, 1});
    return series;
  }
  const auto primes = prime_sieve(X);
  check_memory_budget(X + 1, "count_CD_smooth");
  const auto flags = parallel_map(primes, opts.parallelism,
                                  [&](std::uint64_t p) -> std::uint8_t { return sets.classify_prime(p).in_CD() ? 1 : 0; });
  std::vector<std::uint8_t> excluded(X + 1, 0);
  for (std::size_t i = 0; i < primes.size(); ++i) {
    if (flags[i] != 0) continue;
    for (std::uint64_t m = primes[i]; m <= X; m += primes[i]) excluded[m] = 1;
  }
  std::uint64_t count = 0;
  std::size_t next = 0;
  for (std::uint64_t n = 1; n <= X && next < grid.size(); ++n) {
    if (excluded[n] == 0) ++count;
    if (n == grid[next]) series.checkpoints.push_back({grid[next++], count});
  }
  return series;
}

enum class VjReading {
  Conditions,  // v = 3 mod 8 and (-v/q) = -1 for odd q | D: the S_D conditions
  Literal      // v = 3 mod 8 and (v/q) = -1 for odd q | D
};

/// b_n and a_n computed from congruence classes: b is the multiplicative
/// 0/1 function supported on primes in the classes v_j mod 8 Dbar, and a_n
/// adds the Moebius factor (mu^2 - mu)/2 and the selector "-n is a
/// non-residue mod every prime dividing I", where I is the product of the
/// primes below 4g^2 prime to 2D. Residuosity uses Euler's criterion, not
/// the Kronecker symbol.
class EtaCoefficients {
 public:
  explicit EtaCoefficients(const QuaternionDiscriminant& D, VjReading reading = VjReading::Conditions)
      : modulus_(8 * D.dbar()), odd_primes_(D.odd_primes()) {
    class_mask_.assign(modulus_, 0);
    for (std::uint64_t r = 3; r < modulus_; r += 8) {
      bool ok = true;
      for (auto q : odd_primes_) {
        const std::uint64_t v = reading == VjReading::Conditions ? (q - r % q) % q : r % q;
        ok = ok && euler_criterion(v, q) == -1;
      }
      if (ok) {
        class_mask_[r] = 1;
        residue_classes_.push_back(r);
      }
    }
    const std::uint64_t g = genus_XD(D);
    if (g > (std::uint64_t{1} << 15)) throw std::out_of_range("EtaCoefficients: 4g^2 exceeds the sieve range");
    const std::uint64_t bound = 4 * g * g;
    if (bound > 3) {
      for (auto l : prime_sieve(bound - 1)) {
        if (l != 2 && D.value() % l != 0) selector_primes_.push_back(l);
      }
    }
  }

  std::uint64_t modulus() const { return modulus_; }
  const std::vector<std::uint64_t>& residue_classes() const { return residue_classes_; }
  const std::vector<std::uint64_t>& selector_primes() const { return selector_primes_; }

  bool prime_in_classes(std::uint64_t p) const { return class_mask_[p % modulus_] != 0; }

  int b(const Factorization& f) const {
    for (const auto& pp : f.powers()) {
      if (!prime_in_classes(pp.prime)) return 0;
    }
    return 1;
  }
  int b(std::uint64_t n) const { return b(factorize(n)); }

  int a(const Factorization& f) const {
    if (b(f) == 0) return 0;
    const int mu = f.mobius();
    if ((mu * mu - mu) / 2 == 0) return 0;
    const std::uint64_t n = f.value();
    for (auto l : selector_primes_) {
      if (euler_criterion((l - n % l) % l, l) != -1) return 0;
    }
    return 1;
  }
  int a(std::uint64_t n) const { return a(factorize(n)); }

  /// (v/p) for odd prime p via v^((p-1)/2) mod p.
  static int euler_criterion(std::uint64_t v, std::uint64_t p) {
    v %= p;
    if (v == 0) return 0;
    return detail::powmod(v, (p - 1) / 2, p) == 1 ? 1 : -1;
  }

 private:
  std::uint64_t modulus_;
  std::vector<std::uint64_t> odd_primes_;
  std::vector<std::uint8_t> class_mask_;
  std::vector<std::uint64_t> residue_classes_;
  std::vector<std::uint64_t> selector_primes_;
};

inline int coefficient_b(std::uint64_t n, const QuaternionDiscriminant& D) { return EtaCoefficients(D).b(n); }
inline int coefficient_a(std::uint64_t n, const QuaternionDiscriminant& D) { return EtaCoefficients(D).a(n); }

struct VjComparison {
  std::uint64_t limit = 0;
  std::uint64_t primes_conditions = 0;  // primes <= limit in the S_D classes
  std::uint64_t primes_literal = 0;     // primes <= limit in the literal classes
  std::uint64_t disagreements = 0;
  std::vector<std::uint64_t> first_disagreements;  // up to 10
};

/// Primes <= limit on which the two readings of the v_j classes differ.
inline VjComparison compare_vj_readings(const QuaternionDiscriminant& D, std::uint64_t limit) {
  const EtaCoefficients conditions(D, VjReading::Conditions);
  const EtaCoefficients literal(D, VjReading::Literal);
  VjComparison out;
  out.limit = limit;
  if (limit < 2) return out;
  for (auto p : prime_sieve(limit)) {
    const bool c = conditions.prime_in_classes(p);
    const bool l = literal.prime_in_classes(p);
    out.primes_conditions += c ? 1 : 0;
    out.primes_literal += l ? 1 : 0;
    if (c != l) {
      ++out.disagreements;
      if (out.first_disagreements.size() < 10) out.first_disagreements.push_back(p);
    }
  }
  return out;
}

inline const Rational kDeltaBound{3, 8};

/// delta_D = 2^-e_D + 1/(2 h_D), the density of C_D.
inline Rational delta_D(const QuaternionDiscriminant& D) {
  const Rational delta = Rational(1, std::int64_t{1} << D.e_D()) +
                         Rational(1, 2 * static_cast<std::int64_t>(field_class_number_hD(D)));
  if (delta > kDeltaBound) throw std::logic_error("delta_D exceeds 3/8 for D = " + std::to_string(D.value()));
  return delta;
}

struct AsymptoticFit {
  double c_hat = 0;
  double beta_hat = 0;
  double residual = 0;  // RMS of log-residuals
  bool beta_fixed = false;
  std::size_t points = 0;
};

inline constexpr std::uint64_t kDefaultFitMinX = 1000;
inline constexpr std::size_t kMinFitPoints = 4;

/// Least squares for log N(X) = log c + log X - beta log log X over
/// checkpoints with X >= min_x and N > 0. With fixed_beta only c is fitted.
inline AsymptoticFit fit_asymptotic(const CountingSeries& series, std::optional<double> fixed_beta = std::nullopt,
                                    std::uint64_t min_x = kDefaultFitMinX) {
  const bool all_zero = std::all_of(series.checkpoints.begin(), series.checkpoints.end(),
                                    [](const Checkpoint& c) { return c.count == 0; });
  if (all_zero) throw std::invalid_argument("fit_asymptotic: degenerate series (all counts zero)");

  std::vector<double> t, y;
  for (const auto& c : series.checkpoints) {
    if (c.x < min_x || c.count == 0 || c.x < 16) continue;
    const double lx = std::log(static_cast<double>(c.x));
    t.push_back(std::log(lx));
    y.push_back(std::log(static_cast<double>(c.count)) - lx);
  }
  if (t.size() < kMinFitPoints)
    throw std::invalid_argument("fit_asymptotic: need at least 4 nonzero checkpoints with X >= " +
                                std::to_string(min_x));

  const auto n = static_cast<double>(t.size());
  AsymptoticFit fit;
  fit.points = t.size();
  double intercept = 0;
  if (fixed_beta) {
    fit.beta_fixed = true;
    fit.beta_hat = *fixed_beta;
    for (std::size_t i = 0; i < t.size(); ++i) intercept += y[i] + fit.beta_hat * t[i];
    intercept /= n;
  } else {
    double mt = 0, my = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      mt += t[i];
      my += y[i];
    }
    mt /= n;
    my /= n;
    double stt = 0, sty = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      stt += (t[i] - mt) * (t[i] - mt);
      sty += (t[i] - mt) * (y[i] - my);
    }
    if (stt == 0) throw std::invalid_argument("fit_asymptotic: checkpoints do not span a range of X");
    const double slope = sty / stt;
    fit.beta_hat = -slope;
    intercept = my - slope * mt;
  }
  fit.c_hat = std::exp(intercept);
  double ss = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = y[i] - (intercept - fit.beta_hat * t[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

struct DensityReport {
  std::string set_name;
  Rational empirical{0};  // members / pi(X)
  Rational predicted{0};
  double relative_error = 0;
};

inline DensityReport density_report(const CountingSeries& series, std::uint64_t prime_count, Rational predicted) {
  DensityReport r;
  r.set_name = series.set_name;
  r.empirical = Rational(static_cast<std::int64_t>(series.final().count), static_cast<std::int64_t>(prime_count));
  r.predicted = predicted;
  r.relative_error = std::abs(to_double(r.empirical) / to_double(predicted) - 1.0);
  return r;
}

/// Predicted prime densities: 2^-e_D for S_D, 1/(2 h_D) for S'_D.
inline Rational predicted_density_SD(const QuaternionDiscriminant& D) { return Rational(1, std::int64_t{1} << D.e_D()); }
inline Rational predicted_density_SprimeD(const QuaternionDiscriminant& D) {
  return Rational(1, 2 * static_cast<std::int64_t>(field_class_number_hD(D)));
}

struct SeriesFit {
  std::optional<AsymptoticFit> free_fit;
  std::optional<AsymptoticFit> pinned_fit;
  std::optional<double> pinned_beta;
  std::string note;
};

struct CensusEntry {
  CountingSeries series;
  std::optional<DensityReport> density;
  SeriesFit fit;
};

struct CensusReport {
  CurveClassification classification;
  std::uint64_t limit = 0;
  std::uint64_t prime_count = 0;
  int e_D = 0;
  std::uint64_t h_D = 0;
  Rational delta{0};
  bool delta_within_bound = false;
  bool in_exception_set = false;
  bool low_x = false;  // too few checkpoints above the fit threshold
  std::vector<CensusEntry> entries;  // SD, SprimeD, CD, eta, CD_smooth
  std::optional<VjComparison> vj_comparison;
};

namespace detail {

inline SeriesFit fit_series(const CountingSeries& series, std::optional<double> pinned_beta, bool low_x) {
  SeriesFit out;
  out.pinned_beta = pinned_beta;
  if (low_x) {
    out.note = "low-X: fits unreliable";
    return out;
  }
  try {
    out.free_fit = fit_asymptotic(series);
    if (pinned_beta) out.pinned_fit = fit_asymptotic(series, pinned_beta);
  } catch (const std::invalid_argument& e) {
    out.note = e.what();
  }
  return out;
}

}  // namespace detail

struct CensusOptions {
  ScanOptions scan{};
  bool compare_vj = false;
};

inline CensusReport run_census(const QuaternionDiscriminant& D, std::uint64_t limit, const CensusOptions& opts = {}) {
  if (limit < 2) throw std::invalid_argument("census: limit must be >= 2");
  const TwistSets sets(D);
  CensusReport report;
  report.classification = classify(D);
  report.limit = limit;
  report.prime_count = prime_sieve(limit).size();
  report.e_D = D.e_D();
  report.h_D = field_class_number_hD(D);
  report.delta = delta_D(D);
  report.delta_within_bound = report.delta <= kDeltaBound;
  report.in_exception_set = std::binary_search(kLargePrimeExceptions.begin(), kLargePrimeExceptions.end(), D.value());

  const auto grid = checkpoint_grid(limit, opts.scan.per_decade);
  report.low_x = std::count_if(grid.begin(), grid.end(), [](auto x) { return x >= kDefaultFitMinX; }) <
                 static_cast<std::ptrdiff_t>(kMinFitPoints);

  const double eta_exponent = 1.0 - std::ldexp(1.0, -D.e_D());
  const double smooth_exponent = 1.0 - to_double(report.delta);

  auto add = [&](CountingSeries s, std::optional<Rational> predicted, std::optional<double> pinned) {
    CensusEntry e{std::move(s), std::nullopt, {}};
    if (predicted) e.density = density_report(e.series, report.prime_count, *predicted);
    e.fit = detail::fit_series(e.series, pinned, report.low_x);
    report.entries.push_back(std::move(e));
  };

  add(count_SD(limit, sets, opts.scan), predicted_density_SD(D), 1.0);
  add(count_SprimeD(limit, sets, opts.scan), predicted_density_SprimeD(D), 1.0);
  add(count_CD_primes(limit, sets, opts.scan), report.delta, 1.0);
  if (report.in_exception_set) {
    add(count_etaD(limit, sets, opts.scan), std::nullopt, std::nullopt);
    report.entries.back().fit = {};
    report.entries.back().fit.note = "no asymptotic model: D has a prime factor p >= 4g^2";
  } else {
    add(count_etaD(limit, sets, opts.scan), std::nullopt, eta_exponent);
  }
  add(count_CD_smooth(limit, sets, opts.scan), std::nullopt, smooth_exponent);

  if (opts.compare_vj) report.vj_comparison = compare_vj_readings(D, limit);
  return report;
}

}  // namespace qtc
