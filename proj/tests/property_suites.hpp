// Randomized property suites shared by the unit tests and the acceptance
// runner. Each returns the first counterexample it finds, or an empty string.

#pragma once

#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "casim/scenario_io.hpp"
#include "casim/verify.hpp"
#include "oracles.hpp"

namespace casim::testing {

inline const std::vector<Token>& property_tokens() {
  static const std::vector<Token> kTokens{"Heads", "Tails", "H", "T", "coin"};
  return kTokens;
}

inline Sampler random_sampler(std::mt19937_64& rng) {
  switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0: return Sampler::greedy();
    case 1: return Sampler::top_k(std::uniform_int_distribution<std::size_t>(1, 5)(rng));
    default: return Sampler::top_p(std::uniform_real_distribution<double>(0.05, 1.0)(rng));
  }
}

/// Coin simulator whose three prompt rows are random.
inline TokenSimulator random_coin_simulator(std::mt19937_64& rng) {
  const std::vector<Token> outputs{"Heads", "Tails", "H", "T"};
  ConditionalTable table;
  for (const auto& prompt : {TokenSequence{"flip", "a", "coin"}, TokenSequence{"toss", "a", "coin"},
                             TokenSequence{"simulate", "a", "coin"}}) {
    table.emplace(prompt, random_row(rng, outputs, outputs.size()));
  }
  return TokenSimulator(coin_vocabulary(), table, random_sampler(rng), 1, 8);
}

/// Sampler-induced laws are normalized, supported inside the row, and Greedy
/// coincides with TopK(1).
inline std::string sampler_rows_property(std::size_t rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Vocabulary vocab(property_tokens());
  for (std::size_t i = 0; i < rows; ++i) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, property_tokens().size())(rng);
    const auto row = random_row(rng, property_tokens(), n);
    for (const auto& sampler : {Sampler::greedy(), Sampler::top_k(1 + i % 5), Sampler::top_p(0.05 + 0.95 * (i % 20) / 19.0)}) {
      const auto d = induced_step_distribution(row, sampler, vocab);
      if (!d.is_normalized()) return "row " + std::to_string(i) + ": " + sampler.name() + " not normalized";
      for (const auto& [t, p] : d) {
        if (p > 0.0 && !(row[t] > 0.0)) return "row " + std::to_string(i) + ": " + t + " outside support";
      }
      if (sampler.kind == Sampler::Kind::kTopK && d.size() > sampler.k) {
        return "row " + std::to_string(i) + ": more than k tokens";
      }
    }
    if (induced_step_distribution(row, Sampler::greedy(), vocab) != induced_step_distribution(row, Sampler::top_k(1), vocab)) {
      return "row " + std::to_string(i) + ": greedy differs from top-1";
    }
  }
  return {};
}

/// Exact and Monte Carlo mapped laws agree within 4 standard errors of a
/// fair Bernoulli frequency on every built-in.
inline std::string exact_vs_mc_property(std::size_t samples, std::uint64_t seed) {
  const double bound = 4.0 * std::sqrt(0.25 / static_cast<double>(samples));
  for (const auto& name : builtin_names()) {
    const auto doc = builtin(name);
    const auto exact = check_exact(doc.observer, doc.simulator);
    const auto mc = mc_check(doc.observer, doc.simulator, 0.05, {samples, 1, seed, 1});
    const double gap = tvd(exact.rhs, mc.mc->per_run.front().rhs);
    if (gap > bound) {
      std::ostringstream s;
      s << name << ": tvd " << gap << " > " << bound;
      return s.str();
    }
  }
  return {};
}

/// A simulator accepted at epsilon is accepted at every larger epsilon.
inline std::string epsilon_monotone_property(std::size_t cases, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto obs = coin_observer(true);
  std::uniform_real_distribution<double> eps(1e-3, 1.0);
  for (std::size_t i = 0; i < cases; ++i) {
    const auto sim = random_coin_simulator(rng);
    double a = eps(rng), b = eps(rng);
    if (a > b) std::swap(a, b);
    const auto lo = check_approx(obs, sim, a);
    const auto hi = check_approx(obs, sim, b);
    if (lo.verdict == Verdict::kSimulates && hi.verdict != Verdict::kSimulates) {
      return "case " + std::to_string(i) + ": accepted at " + std::to_string(a) + " but not " + std::to_string(b);
    }
  }
  return {};
}

/// Non-negativity, identity, symmetry and the triangle inequality of tvd.
inline std::string tvd_metric_property(std::size_t triples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto& tokens = property_tokens();
  for (std::size_t i = 0; i < triples; ++i) {
    const auto p = random_row(rng, tokens, tokens.size());
    const auto q = random_row(rng, tokens, tokens.size());
    const auto r = random_row(rng, tokens, tokens.size());
    const double pq = tvd(p, q), qp = tvd(q, p), qr = tvd(q, r), pr = tvd(p, r);
    const std::string at = "triple " + std::to_string(i) + ": ";
    if (pq < 0.0 || pq > 1.0 + 1e-12) return at + "out of [0,1]";
    if (tvd(p, p) != 0.0) return at + "d(p,p) != 0";
    if (std::abs(pq - qp) > 1e-15) return at + "asymmetric";
    if (pr > pq + qr + 1e-12) return at + "triangle inequality";
    if (std::abs(pq - abs_sum_half(p.masses(), q.masses())) > 1e-12) return at + "disagrees with oracle";
  }
  return {};
}

/// tau_push keeps total mass, including sub-distributions.
inline std::string tau_mass_property(std::size_t cases, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto vocab = coin_vocabulary();
  const std::vector<Token> words{"Heads", "Tails", "H", "T", "coin", "STOP"};
  const auto tau = coin_observer(true).tau();
  std::uniform_int_distribution<std::size_t> len(1, 3), pick(0, words.size() - 1);
  std::uniform_real_distribution<double> mass(0.0, 1.0);
  for (std::size_t i = 0; i < cases; ++i) {
    Distribution<PaddedOutput> d;
    const auto n = len(rng) + 2;
    for (std::size_t j = 0; j < n; ++j) {
      TokenSequence seq;
      const auto l = len(rng);
      for (std::size_t k = 0; k < l; ++k) seq.push_back(words[pick(rng)]);
      d.add(PaddedOutput{seq}, mass(rng));
    }
    const double total = d.total();
    d.mark_sub(true);
    const auto pushed = tau_push(d, tau, vocab);
    if (std::abs(pushed.total() - total) > 1e-12) return "case " + std::to_string(i) + ": mass changed";
  }
  return {};
}

/// load(save(doc)) == doc for every built-in.
inline std::string round_trip_property() {
  for (const auto& name : builtin_names()) {
    const auto doc = builtin(name);
    if (load_scenario(save_scenario(doc)) != doc) return name + ": round trip changed the document";
  }
  return {};
}

}  // namespace casim::testing
