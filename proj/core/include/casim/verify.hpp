#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "casim/distribution.hpp"
#include "casim/observer.hpp"
#include "casim/token_model.hpp"

namespace casim {

enum class DistanceKind { kTotalVariation, kKLDivergence };
enum class CheckMode { kExact, kMonteCarlo };
enum class Verdict { kSimulates, kFails };

std::string_view to_string(DistanceKind kind);
std::string_view to_string(CheckMode mode);
std::string_view to_string(Verdict verdict);

/// Total variation distance, half the L1 distance over the union of supports.
template <class T>
double tvd(const Distribution<T>& p, const Distribution<T>& q) {
  p.require_normalized("first argument of tvd");
  q.require_normalized("second argument of tvd");
  std::set<T> support;
  for (const auto& [x, _] : p) support.insert(x);
  for (const auto& [x, _] : q) support.insert(x);
  double sum = 0.0;
  for (const auto& x : support) sum += std::abs(p[x] - q[x]);
  return 0.5 * sum;
}

/// KL(p || q). Infinite when p has mass where q has none.
template <class T>
double kl_divergence(const Distribution<T>& p, const Distribution<T>& q) {
  p.require_normalized("first argument of kl");
  q.require_normalized("second argument of kl");
  double sum = 0.0;
  for (const auto& [x, px] : p) {
    if (px <= 0.0) continue;
    const double qx = q[x];
    if (qx <= 0.0) return std::numeric_limits<double>::infinity();
    sum += px * std::log(px / qx);
  }
  return std::max(sum, 0.0);
}

/// Referent-side law lifted into the mapped outcome space (no unmapped mass).
Distribution<MappedState> lift(const Distribution<EndogenousSetting>& d);

double distance(DistanceKind kind, const Distribution<EndogenousSetting>& lhs,
                const Distribution<MappedState>& rhs);

struct McRun {
  Distribution<MappedState> rhs;
  double distance = 0.0;

  bool operator==(const McRun&) const = default;
};

struct McStats {
  std::size_t samples = 0;
  std::size_t runs = 0;
  double mean = 0.0;
  double std_dev = 0.0;  // sample standard deviation; 0 for a single run
  std::uint64_t seed = 0;
  std::vector<McRun> per_run;

  bool operator==(const McStats&) const = default;
};

/// Both sides of the simulation criterion plus the decision.
///
/// Exact reports: distance_value is the distance between lhs and rhs. With no
/// epsilon the verdict is outcome-wise equality within kTolerance; otherwise
/// it is distance_value < epsilon.
/// Monte Carlo reports: rhs pools every run; distance_value is the mean of the
/// per-run distances, each recomputable from lhs and that run's rhs.
struct VerificationReport {
  CheckMode mode = CheckMode::kExact;
  DistanceKind distance_kind = DistanceKind::kTotalVariation;
  Distribution<EndogenousSetting> lhs;
  Distribution<MappedState> rhs;
  double distance_value = 0.0;
  std::optional<double> epsilon;
  Verdict verdict = Verdict::kFails;
  double unmapped_mass = 0.0;
  std::optional<McStats> mc;

  bool operator==(const VerificationReport&) const = default;
};

/// Outcome-wise equality of the two sides within kTolerance.
bool sides_equal(const Distribution<EndogenousSetting>& lhs, const Distribution<MappedState>& rhs);

/// Recomputes distance_value from the embedded distributions.
double recompute_distance(const VerificationReport& report);

/// Exact causal abstractive simulation check: the verdict is outcome-wise
/// equality of both sides within kTolerance. `d` only selects which distance
/// is reported alongside.
VerificationReport check_exact(const Observer& obs, const TokenSimulator& sim, const ExactOptions& options = {},
                               DistanceKind d = DistanceKind::kTotalVariation);

VerificationReport check_approx(const Observer& obs, const TokenSimulator& sim, double epsilon,
                                DistanceKind d = DistanceKind::kTotalVariation, const ExactOptions& options = {});

struct McCheckOptions {
  std::size_t samples = 10'000;
  std::size_t runs = 10;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Repeats the Monte Carlo estimate `runs` times (run seeds derived from the
/// base seed and run index) and decides on the mean distance.
VerificationReport mc_check(const Observer& obs, const TokenSimulator& sim, double epsilon,
                            const McCheckOptions& options, DistanceKind d = DistanceKind::kTotalVariation);

/// One turn of a multi-turn interaction: the simulator sees
/// transcript_prefix ++ prompt for every prompt the observer produces, where
/// the prefix is the concatenated earlier prompts and responses.
struct Turn {
  TokenSequence transcript_prefix;
  Observer observer;
};

struct TrajectoryOptions {
  CheckMode mode = CheckMode::kExact;
  DistanceKind distance = DistanceKind::kTotalVariation;
  ExactOptions exact;
  McCheckOptions mc;
};

/// Independent single-turn check per turn; errors name the failing turn.
std::vector<VerificationReport> multi_turn_trajectory(const std::vector<Turn>& turns, const TokenSimulator& sim,
                                                      double epsilon, const TrajectoryOptions& options = {});

/// Concatenates transcript segments, e.g. s1 p1 s2 for the second turn.
TokenSequence concat_transcript(std::initializer_list<std::span<const Token>> segments);

}  // namespace casim
