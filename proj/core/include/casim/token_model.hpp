#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "casim/distribution.hpp"

namespace casim {

using Token = std::string;
using TokenSequence = std::vector<Token>;

/// Ordered token set plus the reserved STOP and padding symbols. Vocabulary
/// order is the tie-break for every ranking of equally probable tokens.
class Vocabulary {
 public:
  Vocabulary() = default;
  /// `stop` and `pad` are appended when `tokens` does not list them.
  Vocabulary(std::vector<Token> tokens, Token stop = "STOP", Token pad = "ε");

  const std::vector<Token>& tokens() const { return tokens_; }
  const Token& stop() const { return stop_; }
  const Token& pad() const { return pad_; }
  bool contains(std::string_view t) const { return index_.contains(std::string(t)); }
  /// Position in vocabulary order; throws for unknown tokens.
  std::size_t index_of(std::string_view t) const;

  bool operator==(const Vocabulary& o) const {
    return tokens_ == o.tokens_ && stop_ == o.stop_ && pad_ == o.pad_;
  }

 private:
  std::vector<Token> tokens_;
  Token stop_;
  Token pad_;
  std::map<Token, std::size_t> index_;
};

using ConditionalTable = std::map<TokenSequence, Distribution<Token>>;

struct Sampler {
  enum class Kind { kGreedy, kTopK, kTopP };

  Kind kind = Kind::kGreedy;
  std::size_t k = 1;  // kTopK only
  double p = 1.0;     // kTopP only

  static Sampler greedy() { return {}; }
  static Sampler top_k(std::size_t k);
  static Sampler top_p(double p);

  std::string name() const;

  bool operator==(const Sampler&) const = default;
};

/// Fixed-length generation result: once STOP or the pad symbol has been
/// emitted, every later position holds the pad symbol.
struct PaddedOutput {
  TokenSequence tokens;

  auto operator<=>(const PaddedOutput&) const = default;
};

/// A conditional-probability table over token sequences paired with a
/// sampler, a fixed output length and a context size. The table may be
/// partial; looking up an absent row that generation actually reaches is an
/// error rather than an implicit default.
class TokenSimulator {
 public:
  TokenSimulator() = default;
  TokenSimulator(Vocabulary vocab, ConditionalTable table, Sampler sampler, std::size_t max_output_len,
                 std::size_t context_size);

  const Vocabulary& vocab() const { return vocab_; }
  const ConditionalTable& table() const { return table_; }
  const Sampler& sampler() const { return sampler_; }
  std::size_t max_output_len() const { return max_output_len_; }
  std::size_t context_size() const { return context_size_; }

  /// Row for `prefix`; throws kMissingRow naming the prefix.
  const Distribution<Token>& row(std::span<const Token> prefix) const;

  /// Throws kLengthBound unless prompt length + max_output_len <= context_size,
  /// and kInvalidArgument for prompt tokens outside the vocabulary.
  void check_prompt(std::span<const Token> prompt) const;

  /// Sampler-retained candidates of the row for `prefix`, ranked and
  /// renormalized once at construction; throws kMissingRow like row().
  const std::vector<std::pair<Token, double>>& step_candidates(const TokenSequence& prefix) const;

  TokenSimulator with_sampler(Sampler s) const;

  bool operator==(const TokenSimulator& other) const;

 private:
  using RankedRows = std::map<TokenSequence, std::vector<std::pair<Token, double>>>;

  void rank_rows();

  Vocabulary vocab_;
  ConditionalTable table_;
  Sampler sampler_;
  std::size_t max_output_len_ = 1;
  std::size_t context_size_ = 1;
  std::shared_ptr<const RankedRows> ranked_ = std::make_shared<RankedRows>();
};

/// Candidates retained by the sampler, renormalized, in descending
/// probability order with ties broken by vocabulary order.
std::vector<std::pair<Token, double>> ranked_step_candidates(const Distribution<Token>& row,
                                                             const Sampler& sampler,
                                                             const Vocabulary& vocab);

/// The sampler's per-step law once the uniform draw is marginalized out.
Distribution<Token> induced_step_distribution(const Distribution<Token>& row, const Sampler& sampler,
                                              const Vocabulary& vocab);

/// Inverse-CDF selection over the ranked candidates: returns the first
/// candidate whose cumulative mass reaches `r`. For top-2 this is the most
/// probable token iff r <= p1 / (p1 + p2).
Token sample_step(const Distribution<Token>& row, const Sampler& sampler, const Vocabulary& vocab,
                  double r);

/// Autoregressive generation of exactly max_output_len tokens, one uniform
/// draw per position, with padding after STOP.
PaddedOutput generate(const TokenSimulator& sim, std::span<const Token> prompt,
                      std::span<const double> randoms);

struct ExactOptions {
  std::size_t node_budget = 1'000'000;
};

/// Exact output law by depth-first enumeration of every sampler branch.
Distribution<PaddedOutput> exact_output_distribution(const TokenSimulator& sim,
                                                     const Distribution<TokenSequence>& prompts,
                                                     const ExactOptions& options = {});

struct MonteCarloOptions {
  std::size_t samples = 10'000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Consecutive trials sharing one uniform stream. Trial t reads its draws
/// from the stream of block t / kTrialsPerStream, after the draws of the
/// earlier trials in that block.
inline constexpr std::size_t kTrialsPerStream = 1024;

/// Uniform draws consumed by trial `trial` of a Monte Carlo estimate: the
/// first selects the prompt, the remaining max_output_len drive generation.
std::vector<double> trial_randoms(std::uint64_t seed, std::uint64_t trial, std::size_t output_len);

/// Selects a prompt from `prompts` by inverse CDF in canonical outcome order.
const TokenSequence& select_prompt(const Distribution<TokenSequence>& prompts, double u);

/// Empirical output law from seeded trials. Each trial draws from its own
/// stream derived from (seed, trial index), so the result is identical for
/// any thread count.
Distribution<PaddedOutput> mc_output_distribution(const TokenSimulator& sim,
                                                  const Distribution<TokenSequence>& prompts,
                                                  const MonteCarloOptions& options);

/// Strips trailing pad symbols and then one final STOP.
TokenSequence depad(const PaddedOutput& out, const Vocabulary& vocab);

std::string render_tokens(std::span<const Token> tokens);

}  // namespace casim
