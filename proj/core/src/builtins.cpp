// The fair-coin scenarios: an observer whose referent is a coin (S is the
// heads- or tails-causing state, X the face it lands on), three equally likely
// prompts, and a family of one-step token tables that succeed or fail to
// simulate it.

#include <algorithm>
#include <array>

#include "casim/scenario_io.hpp"

namespace casim {

namespace {

const std::array<TokenSequence, 3> kPrompts = {
    TokenSequence{"flip", "a", "coin"},
    TokenSequence{"toss", "a", "coin"},
    TokenSequence{"simulate", "a", "coin"},
};

CausalModel coin_model() {
  std::vector<Variable> exo{{"S", FiniteRange({"H-causing", "T-causing"})}};
  std::vector<Variable> endo{{"X", FiniteRange({"H", "T"})}};
  StructuralEquation lands{"X", {"S"}, {{{"H-causing"}, "H"}, {{"T-causing"}, "T"}}};
  std::vector<Intervention> allowed{{{{"S", "H-causing"}}}, {{{"S", "T-causing"}}}};
  return CausalModel(std::move(exo), std::move(endo), {std::move(lands)}, std::move(allowed));
}

// The same two-token row for each of the three prompts.
ConditionalTable same_rows(const Token& first, double p_first, const Token& second, double p_second) {
  ConditionalTable table;
  for (const auto& prompt : kPrompts) {
    table.emplace(prompt, Distribution<Token>::from({{first, p_first}, {second, p_second}}));
  }
  return table;
}

struct BuiltinSpec {
  std::string_view name;
  std::string_view table;
  Sampler sampler;
  bool tau_prime;
};

const std::array<BuiltinSpec, 7>& specs() {
  static const std::array<BuiltinSpec, 7> kSpecs = {{
      {"example1-greedy", "P1", Sampler::greedy(), false},
      {"example1-top2", "P1", Sampler::top_k(2), false},
      {"example2-biased", "P2.1", Sampler::top_k(2), false},
      {"example2-fair", "P2.2", Sampler::top_k(2), false},
      {"example3-mismatch", "P3.2", Sampler::top_k(2), false},
      {"example3-tauprime", "P3.2", Sampler::top_k(2), true},
      {"example4", "P4", Sampler::top_k(2), false},
  }};
  return kSpecs;
}

const BuiltinSpec& find_spec(std::string_view name) {
  const auto& all = specs();
  auto it = std::find_if(all.begin(), all.end(), [&](const BuiltinSpec& s) { return s.name == name; });
  if (it == all.end()) {
    std::string known;
    for (const auto& s : all) known += (known.empty() ? "" : ", ") + std::string(s.name);
    throw Error(ErrorKind::kUnknownBuiltin, "unknown scenario '" + std::string(name) + "'; available: " + known);
  }
  return *it;
}

}  // namespace

Vocabulary coin_vocabulary() {
  return Vocabulary({"flip", "toss", "simulate", "a", "coin", "Heads", "Tails", "H", "T"}, "STOP", "ε");
}

ConditionalTable coin_table(std::string_view name) {
  if (name == "P1") return same_rows("Heads", 0.51, "Tails", 0.49);
  if (name == "P2.1") return same_rows("Heads", 0.9, "Tails", 0.1);
  if (name == "P2.2" || name == "P3.1" || name == "P4") return same_rows("Heads", 0.5, "Tails", 0.5);
  if (name == "P3.2") return same_rows("H", 0.5, "T", 0.5);
  throw Error(ErrorKind::kUnknownBuiltin, "unknown coin table '" + std::string(name) + "'");
}

Observer coin_observer(bool accept_short_tokens) {
  auto model = coin_model();
  const Context heads_causing{{"H-causing"}};
  const Context tails_causing{{"T-causing"}};
  auto contexts = Distribution<Context>::from({{heads_causing, 0.5}, {tails_causing, 0.5}});

  Distribution<TokenSequence>::Map thirds;
  for (const auto& p : kPrompts) thirds.emplace(p, 1.0 / 3.0);
  EncodingDist encodings;
  for (const auto& ctx : {heads_causing, tails_causing}) {
    encodings.emplace(std::make_pair(ctx, Intervention::null()), Distribution<TokenSequence>::from(thirds));
  }

  const EndogenousSetting heads{{"H"}};
  const EndogenousSetting tails{{"T"}};
  std::vector<TauEntry> tau{{{"Heads"}, heads}, {{"Tails"}, tails}};
  if (accept_short_tokens) {
    tau.push_back({{"H"}, heads});
    tau.push_back({{"T"}, tails});
  }
  auto interventions = never_intervene(model);
  return Observer(std::move(model), std::move(contexts), std::move(interventions), std::move(encodings),
                  TauMap(std::move(tau)));
}

std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const auto& s : specs()) out.emplace_back(s.name);
  return out;
}

std::string builtin_text(std::string_view name) {
  const auto& spec = find_spec(name);
  ScenarioDoc doc;
  doc.name = std::string(spec.name);
  doc.observer = coin_observer(spec.tau_prime);
  doc.simulator = TokenSimulator(coin_vocabulary(), coin_table(spec.table), spec.sampler, 1, 8);
  return save_scenario(doc);
}

ScenarioDoc builtin(std::string_view name) { return load_scenario(builtin_text(name)); }

}  // namespace casim
