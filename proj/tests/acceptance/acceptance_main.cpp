// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "casim/scenario_io.hpp"
#include "casim/verify.hpp"
#include "cli.hpp"
#include "fixtures.hpp"
#include "property_suites.hpp"

namespace {

using namespace casim;

// Pinned tolerances.
constexpr double kExactTol = 1e-9;
constexpr double kTopTwoMeanLo = 0.005;
constexpr double kTopTwoMeanHi = 0.020;
constexpr double kTopTwoStdMax = 0.006;
constexpr double kFastSeconds = 1.0;
constexpr double kSlowSeconds = 5.0;

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string num(double v) { return format_real(v); }

struct CliRun {
  int code;
  std::string out;
};

CliRun cli_json(std::vector<std::string> args) {
  args.insert(args.end(), {"--output", "json"});
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str() + err.str()};
}

// Reads a numeric field such as "mean": 0.5 from a report.
double json_number(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\": ");
  if (pos == std::string::npos) return std::nan("");
  const auto start = pos + key.size() + 4;
  const auto token = text.substr(start, text.find_first_of(",\n}", start) - start);
  if (token == "\"inf\"") return INFINITY;
  return std::stod(token);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

VerificationReport exact(std::string_view name) {
  const auto doc = builtin(name);
  return check_exact(doc.observer, doc.simulator);
}

VerificationReport approx(std::string_view name, double eps) {
  const auto doc = builtin(name);
  return check_approx(doc.observer, doc.simulator, eps);
}

Outcome greedy_result() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto defaults = cli_json({"verify", "example1-greedy", "--mode", "mc"});
  const double t = seconds_since(t0);
  o.require(defaults.code == cli::kFails, "exit code " + std::to_string(defaults.code));
  o.require(json_number(defaults.out, "mean") == 0.5, "mean " + num(json_number(defaults.out, "mean")));
  o.require(json_number(defaults.out, "std") == 0.0, "std " + num(json_number(defaults.out, "std")));
  for (const char* seed : {"1", "7", "2024"}) {
    const auto r = cli_json({"verify", "example1-greedy", "--mode", "mc", "--seed", seed});
    o.require(json_number(r.out, "mean") == 0.5 && json_number(r.out, "std") == 0.0, std::string("seed ") + seed);
  }
  const auto ex = cli_json({"verify", "example1-greedy", "--mode", "exact"});
  o.require(json_number(ex.out, "distanceValue") == 0.5, "exact " + num(json_number(ex.out, "distanceValue")));
  o.require(t < kFastSeconds, "runtime " + num(t) + " s");
  o.detail += o.ok ? "mc 0.5 ± 0 over seeds 0,1,7,2024; exact 0.5" : "";
  return o;
}

Outcome top_two_result() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = cli_json({"verify", "example1-top2", "--mode", "mc", "--samples", "10000", "--runs", "10"});
  const double t = seconds_since(t0);
  const double mean = json_number(r.out, "mean"), sd = json_number(r.out, "std");
  o.require(mean >= kTopTwoMeanLo && mean <= kTopTwoMeanHi, "mean " + num(mean));
  o.require(sd <= kTopTwoStdMax, "std " + num(sd));
  o.require(t < kSlowSeconds, "runtime " + num(t) + " s");
  const double d = exact("example1-top2").distance_value;
  o.require(std::abs(d - 0.01) <= kExactTol, "exact " + num(d));
  if (o.ok) o.detail = "mc mean " + num(mean) + " std " + num(sd) + "; exact " + num(d);
  return o;
}

Outcome example4_result() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = exact("example4");
  const double t = seconds_since(t0);
  const EndogenousSetting h{{"H"}}, tl{{"T"}};
  for (const auto& s : {h, tl}) {
    o.require(std::abs(r.lhs[s] - 0.5) <= kExactTol, "lhs");
    o.require(std::abs(r.rhs[MappedState(s)] - 0.5) <= kExactTol, "rhs");
  }
  o.require(r.lhs.size() == 2 && r.rhs.size() == 2, "support");
  o.require(r.verdict == Verdict::kSimulates, "verdict");
  o.require(std::abs(r.distance_value) <= kExactTol, "distance " + num(r.distance_value));
  o.require(t < kFastSeconds, "runtime " + num(t) + " s");
  if (o.ok) o.detail = "lhs = rhs = {H: 0.5, T: 0.5}, simulates";
  return o;
}

Outcome marginal_result() {
  Outcome o;
  const auto d = prompt_distribution(coin_observer());
  o.require(d.size() == 3, "support size " + std::to_string(d.size()));
  for (const auto& p : {TokenSequence{"flip", "a", "coin"}, TokenSequence{"toss", "a", "coin"},
                        TokenSequence{"simulate", "a", "coin"}}) {
    o.require(std::abs(d[p] - 1.0 / 3.0) <= kExactTol, render_tokens(p) + " " + num(d[p]));
  }
  if (o.ok) o.detail = "{flip: 1/3, toss: 1/3, simulate: 1/3}";
  return o;
}

Outcome example2_result() {
  Outcome o;
  const auto biased = approx("example2-biased", 0.05);
  const auto fair = approx("example2-fair", 0.05);
  o.require(std::abs(biased.distance_value - 0.4) <= kExactTol, "biased " + num(biased.distance_value));
  o.require(biased.verdict == Verdict::kFails, "biased verdict");
  o.require(std::abs(fair.distance_value) <= kExactTol, "fair " + num(fair.distance_value));
  o.require(fair.verdict == Verdict::kSimulates, "fair verdict");
  if (o.ok) o.detail = "biased 0.4 fails, fair 0 simulates at eps 0.05";
  return o;
}

Outcome example3_result() {
  Outcome o;
  const auto mismatch = exact("example3-mismatch");
  const auto prime = exact("example3-tauprime");
  o.require(std::abs(mismatch.unmapped_mass - 1.0) <= kExactTol, "unmapped " + num(mismatch.unmapped_mass));
  o.require(std::abs(mismatch.distance_value - 1.0) <= kExactTol, "distance " + num(mismatch.distance_value));
  o.require(mismatch.verdict == Verdict::kFails, "mismatch verdict");
  o.require(std::abs(prime.distance_value) <= kExactTol, "tau' distance " + num(prime.distance_value));
  if (o.ok) o.detail = "mismatch unmapped 1, distance 1; tau' distance 0";
  return o;
}

Outcome property_result() {
  Outcome o;
  const std::vector<std::pair<std::string, std::function<std::string()>>> suites{
      {"a", [] { return testing::sampler_rows_property(1000, 101); }},
      {"b", [] { return testing::exact_vs_mc_property(10'000, 102); }},
      {"c", [] {
         auto s = testing::epsilon_monotone_property(300, 103);
         return s.empty() ? testing::tvd_metric_property(1000, 104) : s;
       }},
      {"d", [] { return testing::tau_mass_property(500, 105); }},
      {"e", [] { return testing::round_trip_property(); }},
  };
  for (const auto& [tag, suite] : suites) {
    const auto failure = suite();
    o.require(failure.empty(), "(" + tag + ") " + failure);
  }
  if (o.ok) o.detail = "suites a-e hold";
  return o;
}

Outcome trajectory_result() {
  Outcome o;
  const auto c = testing::two_turn_case("P2.2", "P2.1");
  const auto reports = multi_turn_trajectory(c.turns, c.simulator, 0.05);
  o.require(reports.size() == 2, "turn count");
  if (reports.size() == 2) {
    o.require(std::abs(reports[0].distance_value) <= kExactTol, "turn 1 " + num(reports[0].distance_value));
    o.require(std::abs(reports[1].distance_value - 0.4) <= kExactTol, "turn 2 " + num(reports[1].distance_value));
    if (o.ok) o.detail = "(" + num(reports[0].distance_value) + ", " + num(reports[1].distance_value) + ")";
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 greedy sampler distance", greedy_result},
      {"2 top-2 sampler distance", top_two_result},
      {"3 fair coin simulates", example4_result},
      {"4 prompt marginal", marginal_result},
      {"5 biased vs fair table", example2_result},
      {"6 token mismatch and widened map", example3_result},
      {"7 property suites", property_result},
      {"8 two-turn trajectory", trajectory_result},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += o.ok ? 0 : 1;
    std::printf("%s  criterion %s: %s\n", o.ok ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
