#include "casim/token_model.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "casim/random.hpp"

namespace casim {

namespace {

std::string quote_prefix(std::span<const Token> prefix) { return "[" + render_tokens(prefix) + "]"; }

}  // namespace

Vocabulary::Vocabulary(std::vector<Token> tokens, Token stop, Token pad)
    : tokens_(std::move(tokens)), stop_(std::move(stop)), pad_(std::move(pad)) {
  if (stop_.empty() || pad_.empty()) {
    throw Error(ErrorKind::kInvalidModel, "STOP and pad symbols must be non-empty");
  }
  if (stop_ == pad_) throw Error(ErrorKind::kInvalidModel, "STOP and pad symbols must differ");
  if (std::find(tokens_.begin(), tokens_.end(), stop_) == tokens_.end()) tokens_.push_back(stop_);
  if (std::find(tokens_.begin(), tokens_.end(), pad_) == tokens_.end()) tokens_.push_back(pad_);
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty()) throw Error(ErrorKind::kInvalidModel, "vocabulary tokens must be non-empty");
    if (!index_.emplace(tokens_[i], i).second) {
      throw Error(ErrorKind::kInvalidModel, "duplicate vocabulary token '" + tokens_[i] + "'");
    }
  }
}

std::size_t Vocabulary::index_of(std::string_view t) const {
  auto it = index_.find(std::string(t));
  if (it == index_.end()) {
    throw Error(ErrorKind::kInvalidArgument, "token '" + std::string(t) + "' is not in the vocabulary");
  }
  return it->second;
}

Sampler Sampler::top_k(std::size_t k) {
  if (k < 1) throw Error(ErrorKind::kInvalidArgument, "top-k requires k >= 1");
  return {Kind::kTopK, k, 1.0};
}

Sampler Sampler::top_p(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorKind::kInvalidArgument, "top-p requires p in (0, 1]");
  return {Kind::kTopP, 1, p};
}

std::string Sampler::name() const {
  switch (kind) {
    case Kind::kGreedy: return "greedy";
    case Kind::kTopK: return "top-" + std::to_string(k);
    case Kind::kTopP: {
      std::string s = std::to_string(p);
      s.erase(s.find_last_not_of('0') + 1);
      if (s.back() == '.') s.pop_back();
      return "top-p(" + s + ")";
    }
  }
  return "?";
}

TokenSimulator::TokenSimulator(Vocabulary vocab, ConditionalTable table, Sampler sampler,
                               std::size_t max_output_len, std::size_t context_size)
    : vocab_(std::move(vocab)),
      table_(std::move(table)),
      sampler_(sampler),
      max_output_len_(max_output_len),
      context_size_(context_size) {
  if (max_output_len_ < 1) throw Error(ErrorKind::kInvalidModel, "max output length must be positive");
  if (context_size_ < max_output_len_) {
    throw Error(ErrorKind::kInvalidModel, "context size " + std::to_string(context_size_) +
                                              " is smaller than the output length " +
                                              std::to_string(max_output_len_));
  }
  if (sampler_.kind == Sampler::Kind::kTopK) sampler_ = Sampler::top_k(sampler_.k);
  if (sampler_.kind == Sampler::Kind::kTopP) sampler_ = Sampler::top_p(sampler_.p);

  for (const auto& [prefix, row] : table_) {
    const std::string where = "row " + quote_prefix(prefix);
    for (const auto& t : prefix) {
      if (!vocab_.contains(t)) {
        throw Error(ErrorKind::kInvalidModel, "prefix token '" + t + "' is not in the vocabulary", where);
      }
      if (t == vocab_.pad()) throw Error(ErrorKind::kInvalidModel, "prefix contains the pad symbol", where);
    }
    if (prefix.size() >= context_size_) {
      throw Error(ErrorKind::kInvalidModel, "prefix does not fit the context size", where);
    }
    try {
      row.validate();
      row.require_normalized("conditional row");
    } catch (const Error& e) {
      throw e.nested(where);
    }
    for (const auto& [t, _] : row) {
      if (!vocab_.contains(t)) {
        throw Error(ErrorKind::kInvalidModel, "token '" + t + "' is not in the vocabulary", where);
      }
      if (t == vocab_.pad()) {
        throw Error(ErrorKind::kInvalidModel, "the pad symbol may not appear in a row", where);
      }
    }
  }
  rank_rows();
}

void TokenSimulator::rank_rows() {
  auto ranked = std::make_shared<RankedRows>();
  for (const auto& [prefix, row] : table_) ranked->emplace(prefix, ranked_step_candidates(row, sampler_, vocab_));
  ranked_ = std::move(ranked);
}

bool TokenSimulator::operator==(const TokenSimulator& other) const {
  return vocab_ == other.vocab_ && table_ == other.table_ && sampler_ == other.sampler_ &&
         max_output_len_ == other.max_output_len_ && context_size_ == other.context_size_;
}

const std::vector<std::pair<Token, double>>& TokenSimulator::step_candidates(const TokenSequence& prefix) const {
  auto it = ranked_->find(prefix);
  if (it == ranked_->end()) {
    throw Error(ErrorKind::kMissingRow, "no conditional row for reachable prefix", quote_prefix(prefix));
  }
  return it->second;
}

const Distribution<Token>& TokenSimulator::row(std::span<const Token> prefix) const {
  auto it = table_.find(TokenSequence(prefix.begin(), prefix.end()));
  if (it == table_.end()) {
    throw Error(ErrorKind::kMissingRow, "no conditional row for reachable prefix", quote_prefix(prefix));
  }
  return it->second;
}

void TokenSimulator::check_prompt(std::span<const Token> prompt) const {
  for (const auto& t : prompt) {
    if (!vocab_.contains(t) || t == vocab_.pad()) {
      throw Error(ErrorKind::kInvalidArgument, "prompt token '" + t + "' is not a usable vocabulary token",
                  quote_prefix(prompt));
    }
  }
  if (prompt.size() + max_output_len_ > context_size_) {
    throw Error(ErrorKind::kLengthBound,
                "prompt length " + std::to_string(prompt.size()) + " + output length " +
                    std::to_string(max_output_len_) + " exceeds context size " + std::to_string(context_size_),
                quote_prefix(prompt));
  }
}

TokenSimulator TokenSimulator::with_sampler(Sampler s) const {
  TokenSimulator out = *this;
  out.sampler_ = s;
  if (out.sampler_.kind == Sampler::Kind::kTopK) out.sampler_ = Sampler::top_k(s.k);
  if (out.sampler_.kind == Sampler::Kind::kTopP) out.sampler_ = Sampler::top_p(s.p);
  out.rank_rows();
  return out;
}

std::vector<std::pair<Token, double>> ranked_step_candidates(const Distribution<Token>& row,
                                                             const Sampler& sampler,
                                                             const Vocabulary& vocab) {
  struct Candidate {
    const Token* token;
    double p;
    std::size_t order;
  };
  std::vector<Candidate> ranked;
  row.for_each_positive([&](const Token& t, double p) { ranked.push_back({&t, p, vocab.index_of(t)}); });
  if (ranked.empty()) throw Error(ErrorKind::kInvalidArgument, "cannot sample from an empty row");
  std::sort(ranked.begin(), ranked.end(), [](const Candidate& a, const Candidate& b) {
    return a.p != b.p ? a.p > b.p : a.order < b.order;
  });

  std::size_t keep = ranked.size();
  switch (sampler.kind) {
    case Sampler::Kind::kGreedy:
      keep = 1;
      break;
    case Sampler::Kind::kTopK:
      keep = std::min(keep, sampler.k);
      break;
    case Sampler::Kind::kTopP: {
      double cum = 0.0;
      for (std::size_t i = 0; i < ranked.size(); ++i) {
        cum += ranked[i].p;
        if (cum >= sampler.p - 1e-12) {
          keep = i + 1;
          break;
        }
      }
      break;
    }
  }

  double norm = 0.0;
  for (std::size_t i = 0; i < keep; ++i) norm += ranked[i].p;
  std::vector<std::pair<Token, double>> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.emplace_back(*ranked[i].token, ranked[i].p / norm);
  return out;
}

Distribution<Token> induced_step_distribution(const Distribution<Token>& row, const Sampler& sampler,
                                              const Vocabulary& vocab) {
  Distribution<Token> out;
  for (auto& [t, p] : ranked_step_candidates(row, sampler, vocab)) out.add(t, p);
  return out;
}

namespace {

const Token& pick_ranked(const std::vector<std::pair<Token, double>>& ranked, double r) {
  double cum = 0.0;
  for (const auto& [t, p] : ranked) {
    cum += p;
    if (r <= cum) return t;
  }
  // r within rounding of 1.0 past the final cumulative sum.
  return ranked.back().first;
}

void require_unit(double r) {
  if (!(r >= 0.0 && r <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "random draw " + std::to_string(r) + " is outside [0, 1]");
  }
}

}  // namespace

Token sample_step(const Distribution<Token>& row, const Sampler& sampler, const Vocabulary& vocab,
                  double r) {
  require_unit(r);
  return pick_ranked(ranked_step_candidates(row, sampler, vocab), r);
}

PaddedOutput generate(const TokenSimulator& sim, std::span<const Token> prompt,
                      std::span<const double> randoms) {
  sim.check_prompt(prompt);
  const std::size_t l = sim.max_output_len();
  if (randoms.size() != l) {
    throw Error(ErrorKind::kInvalidArgument, "expected " + std::to_string(l) + " random draws, got " +
                                                 std::to_string(randoms.size()));
  }
  const auto& vocab = sim.vocab();
  TokenSequence context(prompt.begin(), prompt.end());
  PaddedOutput out;
  out.tokens.reserve(l);
  bool stopped = false;
  for (std::size_t i = 0; i < l; ++i) {
    if (stopped) {
      out.tokens.push_back(vocab.pad());
      continue;
    }
    require_unit(randoms[i]);
    const Token& next = pick_ranked(sim.step_candidates(context), randoms[i]);
    stopped = next == vocab.stop();
    context.push_back(next);
    out.tokens.push_back(next);
  }
  return out;
}

Distribution<PaddedOutput> exact_output_distribution(const TokenSimulator& sim,
                                                     const Distribution<TokenSequence>& prompts,
                                                     const ExactOptions& options) {
  prompts.require_normalized("prompt distribution");
  const auto& vocab = sim.vocab();
  const std::size_t l = sim.max_output_len();
  Distribution<PaddedOutput> out;
  std::size_t nodes = 0;

  TokenSequence context;
  PaddedOutput partial;
  // Recursion depth is bounded by the output length.
  auto expand = [&](auto&& self, double mass) -> void {
    if (++nodes > options.node_budget) {
      throw Error(ErrorKind::kBudgetExceeded,
                  "exact enumeration exceeded the node budget of " + std::to_string(options.node_budget) +
                      "; use Monte Carlo mode instead");
    }
    if (partial.tokens.size() == l) {
      out.add(partial, mass);
      return;
    }
    if (!partial.tokens.empty() &&
        (partial.tokens.back() == vocab.stop() || partial.tokens.back() == vocab.pad())) {
      const std::size_t filled = partial.tokens.size();
      partial.tokens.resize(l, vocab.pad());
      out.add(partial, mass);
      partial.tokens.resize(filled);
      return;
    }
    for (const auto& [t, q] : sim.step_candidates(context)) {
      if (q <= 0.0) continue;
      context.push_back(t);
      partial.tokens.push_back(t);
      self(self, mass * q);
      partial.tokens.pop_back();
      context.pop_back();
    }
  };

  prompts.for_each_positive([&](const TokenSequence& prompt, double p) {
    sim.check_prompt(prompt);
    context = prompt;
    partial.tokens.clear();
    expand(expand, p);
  });
  return out;
}

std::vector<double> trial_randoms(std::uint64_t seed, std::uint64_t trial, std::size_t output_len) {
  UniformStream stream(derive_seed(seed, trial / kTrialsPerStream));
  stream.discard((trial % kTrialsPerStream) * (output_len + 1));
  std::vector<double> draws(output_len + 1);
  for (auto& d : draws) d = stream.next();
  return draws;
}

const TokenSequence& select_prompt(const Distribution<TokenSequence>& prompts, double u) {
  const TokenSequence* last = nullptr;
  double cum = 0.0;
  for (const auto& [prompt, p] : prompts) {
    if (p <= 0.0) continue;
    cum += p;
    last = &prompt;
    if (u < cum) return prompt;
  }
  if (!last) throw Error(ErrorKind::kInvalidArgument, "prompt distribution has no positive mass");
  return *last;
}

Distribution<PaddedOutput> mc_output_distribution(const TokenSimulator& sim,
                                                  const Distribution<TokenSequence>& prompts,
                                                  const MonteCarloOptions& options) {
  if (options.samples < 1) throw Error(ErrorKind::kInvalidArgument, "samples must be at least 1");
  prompts.require_normalized("prompt distribution");
  prompts.for_each_positive([&](const TokenSequence& prompt, double) { sim.check_prompt(prompt); });

  const std::size_t l = sim.max_output_len();
  const std::size_t blocks = (options.samples + kTrialsPerStream - 1) / kTrialsPerStream;
  const unsigned threads = static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(options.threads, blocks)));
  std::vector<std::map<PaddedOutput, std::size_t>> counts(threads);
  std::vector<std::exception_ptr> errors(threads);

  auto work = [&](unsigned w) {
    try {
      std::vector<double> draws(l);
      for (std::size_t b = blocks * w / threads; b < blocks * (w + 1) / threads; ++b) {
        UniformStream stream(derive_seed(options.seed, b));
        const std::size_t end = std::min(options.samples, (b + 1) * kTrialsPerStream);
        for (std::size_t trial = b * kTrialsPerStream; trial < end; ++trial) {
          const auto& prompt = select_prompt(prompts, stream.next());
          for (auto& d : draws) d = stream.next();
          ++counts[w][generate(sim, prompt, draws)];
        }
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };

  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::map<PaddedOutput, std::size_t> merged;
  for (auto& c : counts) {
    for (auto& [out, n] : c) merged[out] += n;
  }
  Distribution<PaddedOutput> empirical;
  const double total = static_cast<double>(options.samples);
  for (auto& [out, n] : merged) empirical.add(out, static_cast<double>(n) / total);
  return empirical;
}

TokenSequence depad(const PaddedOutput& out, const Vocabulary& vocab) {
  TokenSequence seq = out.tokens;
  while (!seq.empty() && seq.back() == vocab.pad()) seq.pop_back();
  if (!seq.empty() && seq.back() == vocab.stop()) seq.pop_back();
  return seq;
}

std::string render_tokens(std::span<const Token> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace casim
