#include "casim/verify.hpp"

#include <numeric>

#include "casim/random.hpp"

namespace casim {

namespace {

struct Sides {
  Distribution<EndogenousSetting> lhs;
  Distribution<TokenSequence> prompts;
};

Sides prepare(const Observer& obs, const TokenSimulator& sim, const TokenSequence& transcript_prefix = {}) {
  Sides sides{referent_outcome_distribution(obs), {}};
  const auto prompts = prompt_distribution(obs);
  if (transcript_prefix.empty()) {
    sides.prompts = prompts;
  } else {
    for (const auto& [prompt, p] : prompts) {
      TokenSequence full = transcript_prefix;
      full.insert(full.end(), prompt.begin(), prompt.end());
      sides.prompts.add(full, p);
    }
  }
  sides.prompts = joint_input_distribution(sides.prompts, sim).prompts;
  return sides;
}

VerificationReport exact_report(Sides sides, const Observer& obs, const TokenSimulator& sim,
                                std::optional<double> epsilon, DistanceKind d, const ExactOptions& options) {
  VerificationReport report;
  report.mode = CheckMode::kExact;
  report.distance_kind = d;
  report.lhs = std::move(sides.lhs);
  report.rhs = tau_push(exact_output_distribution(sim, sides.prompts, options), obs.tau(), sim.vocab());
  report.distance_value = distance(d, report.lhs, report.rhs);
  report.epsilon = epsilon;
  report.unmapped_mass = report.rhs[std::nullopt];
  const bool ok = epsilon ? report.distance_value < *epsilon : sides_equal(report.lhs, report.rhs);
  report.verdict = ok ? Verdict::kSimulates : Verdict::kFails;
  return report;
}

void require_epsilon(double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::kInvalidArgument, "epsilon must be positive");
}

VerificationReport mc_report(Sides sides, const Observer& obs, const TokenSimulator& sim, double epsilon,
                             const McCheckOptions& options, DistanceKind d) {
  require_epsilon(epsilon);
  if (options.samples < 1 || options.runs < 1) {
    throw Error(ErrorKind::kInvalidArgument, "samples and runs must be at least 1");
  }
  VerificationReport report;
  report.mode = CheckMode::kMonteCarlo;
  report.distance_kind = d;
  report.lhs = std::move(sides.lhs);
  report.epsilon = epsilon;

  McStats stats;
  stats.samples = options.samples;
  stats.runs = options.runs;
  stats.seed = options.seed;
  std::map<MappedState, double> pooled;
  for (std::size_t run = 0; run < options.runs; ++run) {
    MonteCarloOptions mc{options.samples, derive_seed(options.seed, run), options.threads};
    McRun r;
    r.rhs = tau_push(mc_output_distribution(sim, sides.prompts, mc), obs.tau(), sim.vocab());
    r.distance = distance(d, report.lhs, r.rhs);
    for (const auto& [x, p] : r.rhs) pooled[x] += p;
    stats.per_run.push_back(std::move(r));
  }
  const double n = static_cast<double>(options.runs);
  double sum = 0.0;
  for (const auto& r : stats.per_run) sum += r.distance;
  stats.mean = sum / n;
  if (options.runs > 1 && std::isfinite(stats.mean)) {
    double ss = 0.0;
    for (const auto& r : stats.per_run) ss += (r.distance - stats.mean) * (r.distance - stats.mean);
    stats.std_dev = std::sqrt(ss / (n - 1.0));
  }
  for (const auto& [x, p] : pooled) report.rhs.add(x, p / n);

  report.distance_value = stats.mean;
  report.unmapped_mass = report.rhs[std::nullopt];
  report.verdict = stats.mean < epsilon ? Verdict::kSimulates : Verdict::kFails;
  report.mc = std::move(stats);
  return report;
}

}  // namespace

std::string_view to_string(DistanceKind kind) {
  return kind == DistanceKind::kTotalVariation ? "tvd" : "kl";
}

std::string_view to_string(CheckMode mode) { return mode == CheckMode::kExact ? "exact" : "monte-carlo"; }

std::string_view to_string(Verdict verdict) { return verdict == Verdict::kSimulates ? "simulates" : "fails"; }

Distribution<MappedState> lift(const Distribution<EndogenousSetting>& d) {
  return map_outcomes<MappedState>(d, [](const EndogenousSetting& s) { return MappedState(s); });
}

double distance(DistanceKind kind, const Distribution<EndogenousSetting>& lhs,
                const Distribution<MappedState>& rhs) {
  const auto lifted = lift(lhs);
  return kind == DistanceKind::kTotalVariation ? tvd(lifted, rhs) : kl_divergence(lifted, rhs);
}

bool sides_equal(const Distribution<EndogenousSetting>& lhs, const Distribution<MappedState>& rhs) {
  const auto lifted = lift(lhs);
  for (const auto& [x, p] : lifted) {
    if (std::abs(p - rhs[x]) > kTolerance) return false;
  }
  for (const auto& [x, p] : rhs) {
    if (std::abs(p - lifted[x]) > kTolerance) return false;
  }
  return true;
}

double recompute_distance(const VerificationReport& report) {
  if (!report.mc) return distance(report.distance_kind, report.lhs, report.rhs);
  double sum = 0.0;
  for (const auto& r : report.mc->per_run) sum += distance(report.distance_kind, report.lhs, r.rhs);
  return sum / static_cast<double>(report.mc->per_run.size());
}

VerificationReport check_exact(const Observer& obs, const TokenSimulator& sim, const ExactOptions& options,
                               DistanceKind d) {
  return exact_report(prepare(obs, sim), obs, sim, std::nullopt, d, options);
}

VerificationReport check_approx(const Observer& obs, const TokenSimulator& sim, double epsilon, DistanceKind d,
                                const ExactOptions& options) {
  require_epsilon(epsilon);
  return exact_report(prepare(obs, sim), obs, sim, epsilon, d, options);
}

VerificationReport mc_check(const Observer& obs, const TokenSimulator& sim, double epsilon,
                            const McCheckOptions& options, DistanceKind d) {
  return mc_report(prepare(obs, sim), obs, sim, epsilon, options, d);
}

std::vector<VerificationReport> multi_turn_trajectory(const std::vector<Turn>& turns, const TokenSimulator& sim,
                                                      double epsilon, const TrajectoryOptions& options) {
  require_epsilon(epsilon);
  std::vector<VerificationReport> out;
  out.reserve(turns.size());
  for (std::size_t i = 0; i < turns.size(); ++i) {
    try {
      const auto& turn = turns[i];
      auto sides = prepare(turn.observer, sim, turn.transcript_prefix);
      if (options.mode == CheckMode::kExact) {
        out.push_back(exact_report(std::move(sides), turn.observer, sim, epsilon, options.distance, options.exact));
      } else {
        out.push_back(mc_report(std::move(sides), turn.observer, sim, epsilon, options.mc, options.distance));
      }
    } catch (const Error& e) {
      throw e.nested("turn " + std::to_string(i + 1));
    }
  }
  return out;
}

TokenSequence concat_transcript(std::initializer_list<std::span<const Token>> segments) {
  TokenSequence out;
  for (auto seg : segments) out.insert(out.end(), seg.begin(), seg.end());
  return out;
}

}  // namespace casim
