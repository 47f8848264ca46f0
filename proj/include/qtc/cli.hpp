#pragma once

// The qtc command line: classify | verify | sets | census | certify.
// Exit codes: 0 ok, 1 verification mismatch, 2 certificate refusal,
// 3 memory cap exceeded, 64 usage error, 65 invalid discriminant.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qtc/census.hpp"
#include "qtc/shimura.hpp"
#include "qtc/twistsets.hpp"

namespace qtc::cli {

using nlohmann::ordered_json;

enum ExitCode : int {
  kOk = 0,
  kMismatch = 1,
  kRefused = 2,
  kMemoryCap = 3,
  kUsage = 64,
  kInvalidDiscriminant = 65,
};

enum class Format { Text, Json, Csv };

struct JobConfig {
  std::string command;
  std::optional<std::uint64_t> discriminant;
  std::uint64_t limit = 0;
  Format format = Format::Text;
  unsigned per_decade = 4;
  unsigned jobs = 0;
  std::string output;  // empty: standard output
  std::string which = "SD";
  std::int64_t twist = 0;
  bool compare_vj = false;
};

/// Six significant digits, as a JSON number.
inline double sig6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return std::stod(buf);
}

inline std::string sig6_string(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::string join(const std::vector<std::uint64_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
  return out;
}

// --- classify ----------------------------------------------------------------

inline ordered_json classification_json(const QuaternionDiscriminant& D, const CurveClassification& c) {
  return {{"D", D.value()},
          {"dbar", D.dbar()},
          {"e_D", D.e_D()},
          {"genus_XD", c.genus_XD},
          {"genus_quotient", c.genus_quotient},
          {"fixed_point_count", c.fixed_points},
          {"category", to_string(c.category)},
          {"twist_theorem_applies", c.twist_theorem_applies()}};
}

inline int cmd_classify(const JobConfig& cfg, std::ostream& out) {
  const auto D = QuaternionDiscriminant::validate(*cfg.discriminant);
  const auto c = classify(D);
  switch (cfg.format) {
    case Format::Json: {
      ordered_json j = {{"command", "classify"}};
      j.update(classification_json(D, c));
      out << j.dump(2) << '\n';
      break;
    }
    case Format::Csv:
      out << "D,dbar,e_D,genus_XD,genus_quotient,fixed_point_count,category\n"
          << D.value() << ',' << D.dbar() << ',' << D.e_D() << ',' << c.genus_XD << ',' << c.genus_quotient << ','
          << c.fixed_points << ',' << to_string(c.category) << '\n';
      break;
    case Format::Text:
      out << "D                  " << D.value() << '\n'
          << "Dbar               " << D.dbar() << '\n'
          << "e_D                " << D.e_D() << '\n'
          << "genus X^D          " << c.genus_XD << '\n'
          << "genus X^D/w_D      " << c.genus_quotient << '\n'
          << "w_D fixed points   " << c.fixed_points << '\n'
          << "category           " << to_string(c.category) << '\n';
      break;
  }
  return kOk;
}

// --- verify ------------------------------------------------------------------

inline int verify_exit_status(const GenusTableReport& tables, const LargePrimeReport& large) {
  return tables.matches() && large.matches() ? kOk : kMismatch;
}

inline int write_verify(const JobConfig& cfg, const GenusTableReport& tables, const LargePrimeReport& large,
                        std::ostream& out) {
  const int status = verify_exit_status(tables, large);
  switch (cfg.format) {
    case Format::Json: {
      ordered_json j = {
          {"command", "verify"},
          {"limit", tables.bound},
          {"partial", tables.partial},
          {"status", status == kOk ? "match" : "mismatch"},
          {"genus_tables",
           {{"discriminants_checked", tables.discriminants_checked},
            {"genus0", tables.genus0},
            {"genus1", tables.genus1},
            {"higher_genus_count", tables.higher_genus_count},
            {"genus0_missing", tables.genus0_missing},
            {"genus0_extra", tables.genus0_extra},
            {"genus1_missing", tables.genus1_missing},
            {"genus1_extra", tables.genus1_extra}}},
          {"large_prime", {{"failures", large.failures}, {"expected", large.expected}, {"matches", large.matches()}}}};
      out << j.dump(2) << '\n';
      break;
    }
    case Format::Csv:
      out << "check,status,computed,expected_missing,expected_extra\n";
      out << "genus0," << (tables.genus0_missing.empty() && tables.genus0_extra.empty() ? "match" : "mismatch") << ','
          << csv_field(join(tables.genus0)) << ',' << csv_field(join(tables.genus0_missing)) << ','
          << csv_field(join(tables.genus0_extra)) << '\n';
      out << "genus1," << (tables.genus1_missing.empty() && tables.genus1_extra.empty() ? "match" : "mismatch") << ','
          << csv_field(join(tables.genus1)) << ',' << csv_field(join(tables.genus1_missing)) << ','
          << csv_field(join(tables.genus1_extra)) << '\n';
      out << "large_prime," << (large.matches() ? "match" : "mismatch") << ',' << csv_field(join(large.failures))
          << ",,\n";
      break;
    case Format::Text:
      out << "valid discriminants <= " << tables.bound << ": " << tables.discriminants_checked
          << (tables.partial ? " (partial tables)" : "") << '\n';
      out << "genus 0 (" << tables.genus0.size() << "): " << join(tables.genus0) << '\n';
      out << "genus 1 (" << tables.genus1.size() << "): " << join(tables.genus1) << '\n';
      out << "genus >= 2: " << tables.higher_genus_count << '\n';
      if (!tables.genus0_missing.empty()) out << "  genus 0 missing: " << join(tables.genus0_missing) << '\n';
      if (!tables.genus0_extra.empty()) out << "  genus 0 extra:   " << join(tables.genus0_extra) << '\n';
      if (!tables.genus1_missing.empty()) out << "  genus 1 missing: " << join(tables.genus1_missing) << '\n';
      if (!tables.genus1_extra.empty()) out << "  genus 1 extra:   " << join(tables.genus1_extra) << '\n';
      out << "p >= 4g^2 for some p | D: " << join(large.failures) << '\n';
      if (!large.matches()) out << "  expected:        " << join(large.expected) << '\n';
      out << (status == kOk ? "MATCH" : "MISMATCH") << '\n';
      break;
  }
  return status;
}

inline int cmd_verify(const JobConfig& cfg, std::ostream& out) {
  const Parallelism par{cfg.jobs};
  const auto tables = verify_genus_tables(cfg.limit, par);
  const auto large = verify_large_prime_bound(cfg.limit, par);
  return write_verify(cfg, tables, large, out);
}

// --- sets --------------------------------------------------------------------

inline int cmd_sets(const JobConfig& cfg, std::ostream& out) {
  const auto D = QuaternionDiscriminant::validate(*cfg.discriminant);
  const TwistSets sets(D);
  const Parallelism par{cfg.jobs};
  std::vector<std::int64_t> values;
  auto take = [&](const std::vector<std::uint64_t>& v, int sign) {
    for (auto x : v) values.push_back(sign * static_cast<std::int64_t>(x));
  };
  if (cfg.which == "SD") {
    take(members_SD(cfg.limit, sets, par), 1);
  } else if (cfg.which == "SprimeD") {
    take(members_SprimeD(cfg.limit, sets, par), 1);
  } else if (cfg.which == "CD") {
    take(members_CD(cfg.limit, sets, par), 1);
  } else {
    take(members_eta(cfg.limit, sets, par), -1);
  }
  if (cfg.format == Format::Csv) out << "value\n";
  for (auto v : values) {
    if (cfg.format == Format::Json) {
      out << ordered_json{{"value", v}}.dump() << '\n';
    } else {
      out << v << '\n';
    }
  }
  return kOk;
}

// --- census ------------------------------------------------------------------

inline std::vector<std::string> census_notes(const CensusReport& r) {
  std::vector<std::string> notes;
  switch (r.classification.category) {
    case QuotientCategory::RationalQuotient:
      notes.emplace_back("genus(X^D/w_D) = 0: the quotient is P^1 over Q, so it has infinitely many rational "
                         "points and the twist construction does not apply");
      break;
    case QuotientCategory::EllipticQuotientPositiveRank:
      notes.emplace_back("genus(X^D/w_D) = 1: the quotient is an elliptic curve of positive rank, so it has "
                         "infinitely many rational points and the twist construction does not apply");
      break;
    case QuotientCategory::FiniteQuotientPoints:
      break;
  }
  if (r.in_exception_set) notes.emplace_back("D has a prime factor p >= 4g^2: no asymptotic model for eta_D");
  if (r.low_x) notes.emplace_back("low-X: fits unreliable");
  return notes;
}

inline ordered_json fit_json(const std::optional<AsymptoticFit>& f) {
  if (!f) return nullptr;
  return {{"c", sig6(f->c_hat)}, {"beta", sig6(f->beta_hat)}, {"residual", sig6(f->residual)}, {"points", f->points}};
}

inline ordered_json census_json(const CensusReport& r, const QuaternionDiscriminant& D) {
  ordered_json series = ordered_json::array();
  for (const auto& e : r.entries) {
    ordered_json points = ordered_json::array();
    for (const auto& c : e.series.checkpoints)
      points.push_back({{"X", c.x}, {"count", c.count}, {"density", to_string(c.density())}});
    ordered_json density = nullptr;
    if (e.density) {
      density = {{"empirical", to_string(e.density->empirical)},
                 {"predicted", to_string(e.density->predicted)},
                 {"relative_error", sig6_string(e.density->relative_error)}};
    }
    ordered_json pinned_beta = nullptr;
    if (e.fit.pinned_beta) pinned_beta = sig6(*e.fit.pinned_beta);
    series.push_back({{"set", e.series.set_name},
                      {"checkpoints", points},
                      {"density", density},
                      {"fit",
                       {{"free", fit_json(e.fit.free_fit)},
                        {"pinned", fit_json(e.fit.pinned_fit)},
                        {"pinned_beta", pinned_beta},
                        {"note", e.fit.note}}}});
  }
  ordered_json j = {{"command", "census"},
                    {"D", D.value()},
                    {"limit", r.limit},
                    {"prime_count", r.prime_count},
                    {"classification", classification_json(D, r.classification)},
                    {"e_D", r.e_D},
                    {"h_D", r.h_D},
                    {"delta_D", to_string(r.delta)},
                    {"delta_bound", to_string(kDeltaBound)},
                    {"delta_within_bound", r.delta_within_bound},
                    {"in_exception_set", r.in_exception_set},
                    {"low_x", r.low_x},
                    {"notes", census_notes(r)},
                    {"series", series}};
  if (r.vj_comparison) {
    const auto& v = *r.vj_comparison;
    j["vj_comparison"] = {{"limit", v.limit},
                          {"primes_conditions", v.primes_conditions},
                          {"primes_literal", v.primes_literal},
                          {"disagreements", v.disagreements},
                          {"first_disagreements", v.first_disagreements}};
  }
  return j;
}

inline void census_csv(const CountingSeries& s, std::ostream& out) {
  out << "X,count,density\n";
  for (const auto& c : s.checkpoints) out << c.x << ',' << c.count << ',' << sig6_string(to_double(c.density())) << '\n';
}

inline void census_text(const CensusReport& r, const QuaternionDiscriminant& D, std::ostream& out) {
  out << "D = " << D.value() << ", X = " << r.limit << ", pi(X) = " << r.prime_count << '\n'
      << "genus X^D = " << r.classification.genus_XD << ", genus X^D/w_D = " << r.classification.genus_quotient
      << " (" << to_string(r.classification.category) << ")\n"
      << "e_D = " << r.e_D << ", h_D = " << r.h_D << ", delta_D = " << to_string(r.delta)
      << (r.delta_within_bound ? " <= 3/8" : " > 3/8 (VIOLATION)") << '\n';
  for (const auto& note : census_notes(r)) out << "note: " << note << '\n';
  for (const auto& e : r.entries) {
    out << '\n' << e.series.set_name << ": N(X) = " << e.series.final().count;
    if (e.density) {
      out << ", density among primes " << sig6_string(to_double(e.density->empirical)) << " (predicted "
          << to_string(e.density->predicted) << ", rel. error " << sig6_string(e.density->relative_error) << ")";
    }
    out << '\n';
    for (const auto& c : e.series.checkpoints)
      out << "  " << c.x << '\t' << c.count << '\t' << sig6_string(to_double(c.density())) << '\n';
    if (e.fit.free_fit)
      out << "  fit: c = " << sig6_string(e.fit.free_fit->c_hat) << ", beta = " << sig6_string(e.fit.free_fit->beta_hat)
          << ", rms = " << sig6_string(e.fit.free_fit->residual) << '\n';
    if (e.fit.pinned_fit)
      out << "  fit (beta = " << sig6_string(*e.fit.pinned_beta) << "): c = " << sig6_string(e.fit.pinned_fit->c_hat)
          << ", rms = " << sig6_string(e.fit.pinned_fit->residual) << '\n';
    if (!e.fit.note.empty()) out << "  " << e.fit.note << '\n';
  }
  if (r.vj_comparison) {
    const auto& v = *r.vj_comparison;
    out << "\nv_j readings: " << v.primes_conditions << " vs " << v.primes_literal << " primes, " << v.disagreements
        << " disagreements";
    if (!v.first_disagreements.empty()) out << " (first: " << join(v.first_disagreements) << ")";
    out << '\n';
  }
}

inline int cmd_census(const JobConfig& cfg, std::ostream& out) {
  const auto D = QuaternionDiscriminant::validate(*cfg.discriminant);
  CensusOptions opts;
  opts.scan.parallelism = Parallelism{cfg.jobs};
  opts.scan.per_decade = cfg.per_decade;
  opts.compare_vj = cfg.compare_vj;
  const auto report = run_census(D, cfg.limit, opts);
  switch (cfg.format) {
    case Format::Json:
      out << census_json(report, D).dump(2) << '\n';
      break;
    case Format::Csv:
      if (!cfg.output.empty()) {
        // One file per counting series next to the requested path.
        const std::filesystem::path base(cfg.output);
        for (const auto& e : report.entries) {
          auto path = base;
          path.replace_filename(base.stem().string() + "." + e.series.set_name + base.extension().string());
          std::ofstream file(path);
          if (!file) throw std::runtime_error("cannot write " + path.string());
          census_csv(e.series, file);
        }
      }
      for (const auto& e : report.entries) {
        out << "# " << e.series.set_name << '\n';
        census_csv(e.series, out);
      }
      break;
    case Format::Text:
      census_text(report, D, out);
      break;
  }
  return kOk;
}

// --- certify -----------------------------------------------------------------

inline constexpr const char* kCertificateClaim =
    "Y_d has points over every completion of Q; each entry establishes local solubility at one class of places";

// Recorded in every certificate: the claim is nonemptiness of Y_d(A_Q).
inline constexpr const char* kCertificateNote =
    "a statement of the form Y_d(A_Q) = empty for d in eta_D is read as Y_d(A_Q) nonempty, which is what the "
    "entries establish";

inline int cmd_certify(const JobConfig& cfg, std::ostream& out) {
  const auto D = QuaternionDiscriminant::validate(*cfg.discriminant);
  const TwistSets sets(D);
  const EtaVerdict verdict = sets.check_eta(cfg.twist);
  if (!verdict.accepted()) {
    const CertificateRefusal refusal(cfg.twist, *verdict.failed, verdict.detail);
    switch (cfg.format) {
      case Format::Json:
        out << ordered_json{{"command", "certify"},
                            {"D", D.value()},
                            {"d", cfg.twist},
                            {"refused", true},
                            {"condition", to_string(*verdict.failed)},
                            {"detail", verdict.detail}}
                   .dump(2)
            << '\n';
        break;
      case Format::Csv:
      case Format::Text:
        out << "refused: " << refusal.what() << '\n';
        break;
    }
    return kRefused;
  }
  const LocalCertificate cert = sets.certify(cfg.twist);
  switch (cfg.format) {
    case Format::Json: {
      ordered_json entries = ordered_json::array();
      for (const auto& e : cert.entries)
        entries.push_back({{"place_class", to_string(e.place_class)},
                           {"congruence_check", e.congruence_check},
                           {"citation", e.citation},
                           {"holds", e.holds}});
      out << ordered_json{{"command", "certify"},
                          {"D", cert.D},
                          {"d", cert.d},
                          {"refused", false},
                          {"genus_XD", cert.genus_XD},
                          {"complete", cert.complete},
                          {"claim", kCertificateClaim},
                          {"note", kCertificateNote},
                          {"entries", entries}}
                 .dump(2)
          << '\n';
      break;
    }
    case Format::Csv:
      out << "place_class,congruence_check,citation\n";
      for (const auto& e : cert.entries)
        out << csv_field(to_string(e.place_class)) << ',' << csv_field(e.congruence_check) << ','
            << csv_field(e.citation) << '\n';
      break;
    case Format::Text:
      out << "certificate for d = " << cert.d << ", D = " << cert.D << " (g = " << cert.genus_XD << "): "
          << (cert.complete ? "complete" : "INCOMPLETE") << '\n';
      for (const auto& e : cert.entries)
        out << "  [" << to_string(e.place_class) << "] " << e.congruence_check << "\n      " << e.citation << '\n';
      break;
  }
  return kOk;
}

// --- entry point -------------------------------------------------------------

inline int dispatch(const JobConfig& cfg, std::ostream& out) {
  if (cfg.command == "classify") return cmd_classify(cfg, out);
  if (cfg.command == "verify") return cmd_verify(cfg, out);
  if (cfg.command == "sets") return cmd_sets(cfg, out);
  if (cfg.command == "census") return cmd_census(cfg, out);
  return cmd_certify(cfg, out);
}

/// Parses args (without the program name) and runs the command.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shimura curve twist verification toolkit", "qtc"};
  app.require_subcommand(1);
  app.fallthrough();

  JobConfig cfg;
  std::string format = "text";
  std::optional<std::uint64_t> limit;
  app.add_option("--limit", limit, "Upper bound X for scans / D for verification");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json", "csv"}));
  app.add_option("--jobs", cfg.jobs, "Worker threads (0 = logical CPU count)");
  app.add_option("--output", cfg.output, "Write output to PATH instead of standard output");
  app.add_option("--checkpoints", cfg.per_decade, "Checkpoints per decade")->check(CLI::Range(1U, 100U));

  std::uint64_t D = 0;
  auto* classify_cmd = app.add_subcommand("classify", "Genus data and classification of X^D/w_D");
  classify_cmd->add_option("D", D, "Quaternion discriminant")->required();

  app.add_subcommand("verify", "Check the genus 0 / genus 1 tables and the 4g^2 exception set");

  auto* sets_cmd = app.add_subcommand("sets", "Enumerate S_D, S'_D, C_D primes or eta_D twists");
  sets_cmd->add_option("D", D, "Quaternion discriminant")->required();
  sets_cmd->add_option("--which", cfg.which, "Set to enumerate")->check(CLI::IsMember({"SD", "SprimeD", "CD", "eta"}));

  auto* census_cmd = app.add_subcommand("census", "Counting series, densities and asymptotic fits");
  census_cmd->add_option("D", D, "Quaternion discriminant")->required();
  census_cmd->add_flag("--compare-vj", cfg.compare_vj, "Report primes where the two v_j readings disagree");

  auto* certify_cmd = app.add_subcommand("certify", "Local solubility certificate for a twist d (pass d after --)");
  certify_cmd->add_option("D", D, "Quaternion discriminant")->required();
  certify_cmd->add_option("d", cfg.twist, "Twist parameter")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  cfg.format = format == "json" ? Format::Json : format == "csv" ? Format::Csv : Format::Text;
  if (cfg.command != "verify") cfg.discriminant = D;

  const std::uint64_t default_limit = cfg.command == "verify" ? 10000 : cfg.command == "census" ? 1000000 : 1000;
  cfg.limit = limit.value_or(default_limit);
  if (cfg.limit > std::numeric_limits<std::uint32_t>::max()) {
    err << "usage error: --limit exceeds the supported scan range (2^32 - 1)\n";
    return kUsage;
  }
  if ((cfg.command == "sets" || cfg.command == "census") && cfg.limit < 2) {
    err << "usage error: --limit must be at least 2\n";
    return kUsage;
  }

  try {
    if (cfg.output.empty() || (cfg.command == "census" && cfg.format == Format::Csv)) return dispatch(cfg, out);
    std::ofstream file(cfg.output);
    if (!file) {
      err << "error: cannot write " << cfg.output << '\n';
      return kUsage;
    }
    return dispatch(cfg, file);
  } catch (const InvalidDiscriminant& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidDiscriminant;
  } catch (const MemoryCapExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kMemoryCap;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace qtc::cli
