#include <gtest/gtest.h>

#include <random>

#include "casim/observer.hpp"
#include "casim/scenario_io.hpp"

namespace casim {
namespace {

const Context kHC{{"H-causing"}};
const Context kTC{{"T-causing"}};
const TokenSequence kFlip{"flip", "a", "coin"};
const TokenSequence kToss{"toss", "a", "coin"};
const TokenSequence kSimulate{"simulate", "a", "coin"};

Observer with_contexts(const Observer& base, Distribution<Context> contexts) {
  return Observer(base.referent_model(), std::move(contexts), base.intervention_dist(), base.encoding_dist(),
                  base.tau());
}

PaddedOutput out(std::initializer_list<Token> tokens) { return PaddedOutput{TokenSequence(tokens)}; }

TEST(ReferentOutcomeTest, FairCoin) {
  const auto d = referent_outcome_distribution(coin_observer());
  EXPECT_NEAR(d[EndogenousSetting{{"H"}}], 0.5, 1e-12);
  EXPECT_NEAR(d[EndogenousSetting{{"T"}}], 0.5, 1e-12);
}

TEST(ReferentOutcomeTest, InterventionFixesOutcome) {
  const auto base = coin_observer();
  InterventionDist always_heads;
  EncodingDist enc;
  const Intervention heads{{{"S", "H-causing"}}};
  for (const auto& ctx : {kHC, kTC}) {
    always_heads.emplace(ctx, Distribution<Intervention>::point(heads));
    enc.emplace(std::make_pair(ctx, heads), Distribution<TokenSequence>::point(kFlip));
  }
  const Observer obs(base.referent_model(), base.context_dist(), always_heads, enc, base.tau());
  EXPECT_EQ(referent_outcome_distribution(obs), Distribution<EndogenousSetting>::point({{"H"}}));
}

TEST(ReferentOutcomeTest, PointMassContext) {
  const auto obs = with_contexts(coin_observer(), Distribution<Context>::point(kTC));
  EXPECT_EQ(referent_outcome_distribution(obs), Distribution<EndogenousSetting>::point({{"T"}}));
}

TEST(PromptDistributionTest, Thirds) {
  const auto d = prompt_distribution(coin_observer());
  EXPECT_EQ(d.size(), 3u);
  for (const auto& p : {kFlip, kToss, kSimulate}) EXPECT_NEAR(d[p], 1.0 / 3.0, 1e-12);
}

TEST(PromptDistributionTest, ContextDependentEncoding) {
  const auto base = coin_observer();
  EncodingDist enc;
  enc.emplace(std::make_pair(kHC, Intervention::null()), Distribution<TokenSequence>::point(kFlip));
  enc.emplace(std::make_pair(kTC, Intervention::null()), Distribution<TokenSequence>::point(kToss));
  const Observer obs(base.referent_model(), Distribution<Context>::from({{kHC, 0.8}, {kTC, 0.2}}),
                     base.intervention_dist(), enc, base.tau());
  const auto d = prompt_distribution(obs);
  EXPECT_NEAR(d[kFlip], 0.8, 1e-12);
  EXPECT_NEAR(d[kToss], 0.2, 1e-12);
}

TEST(PromptDistributionTest, ConstantEncoding) {
  const auto base = coin_observer();
  EncodingDist enc;
  for (const auto& ctx : {kHC, kTC}) {
    enc.emplace(std::make_pair(ctx, Intervention::null()), Distribution<TokenSequence>::point(kSimulate));
  }
  const Observer obs(base.referent_model(), base.context_dist(), base.intervention_dist(), enc, base.tau());
  EXPECT_EQ(prompt_distribution(obs), Distribution<TokenSequence>::point(kSimulate));
}

TEST(JointInputTest, AcceptsFittingPrompts) {
  const TokenSimulator sim(coin_vocabulary(), coin_table("P4"), Sampler::top_k(2), 1, 8);
  const auto law = joint_input_distribution(prompt_distribution(coin_observer()), sim);
  EXPECT_EQ(law.simulator, &sim);
  EXPECT_EQ(law.prompts.size(), 3u);
}

TEST(JointInputTest, RejectsOverlongPrompt) {
  const TokenSimulator sim(coin_vocabulary(), coin_table("P4"), Sampler::top_k(2), 2, 4);
  try {
    joint_input_distribution(prompt_distribution(coin_observer()), sim);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kLengthBound);
  }
}

TEST(JointInputTest, RejectsEmptyAndUnknownTokens) {
  const TokenSimulator sim(coin_vocabulary(), coin_table("P4"), Sampler::top_k(2), 1, 8);
  EXPECT_THROW(joint_input_distribution(Distribution<TokenSequence>{}, sim), Error);
  EXPECT_THROW(joint_input_distribution(Distribution<TokenSequence>::point({"roll", "a", "die"}), sim), Error);
}

TEST(TauPushTest, HeadsTailsMap) {
  const auto vocab = coin_vocabulary();
  const auto outputs = Distribution<PaddedOutput>::from({{out({"Heads"}), 0.5}, {out({"Tails"}), 0.5}});
  const auto d = tau_push(outputs, coin_observer().tau(), vocab);
  EXPECT_NEAR(d[MappedState{EndogenousSetting{{"H"}}}], 0.5, 1e-12);
  EXPECT_NEAR(d[MappedState{EndogenousSetting{{"T"}}}], 0.5, 1e-12);
  EXPECT_NEAR(d[std::nullopt], 0.0, 1e-12);
}

TEST(TauPushTest, ShortTokensUnmappedUnderDefaultMap) {
  const auto vocab = coin_vocabulary();
  const auto outputs = Distribution<PaddedOutput>::from({{out({"H"}), 0.5}, {out({"T"}), 0.5}});
  const auto d = tau_push(outputs, coin_observer().tau(), vocab);
  EXPECT_EQ(d, Distribution<MappedState>::point(std::nullopt));
  const auto widened = tau_push(outputs, coin_observer(true).tau(), vocab);
  EXPECT_NEAR(widened[MappedState{EndogenousSetting{{"H"}}}], 0.5, 1e-12);
}

TEST(TauPushTest, DepadsBeforeMatching) {
  const auto vocab = coin_vocabulary();
  const auto outputs = Distribution<PaddedOutput>::point(out({"Heads", "STOP", "ε"}));
  EXPECT_EQ(tau_push(outputs, coin_observer().tau(), vocab),
            Distribution<MappedState>::point(EndogenousSetting{{"H"}}));
}

TEST(TauPushTest, ConservesMassAndIsMonotone) {
  const auto vocab = coin_vocabulary();
  const auto tau = coin_observer().tau();
  const auto small = Distribution<PaddedOutput>::sub_distribution({{out({"Heads"}), 0.2}, {out({"coin"}), 0.1}});
  const auto large = Distribution<PaddedOutput>::sub_distribution({{out({"Heads"}), 0.4}, {out({"coin"}), 0.3}});
  const auto a = tau_push(small, tau, vocab);
  const auto b = tau_push(large, tau, vocab);
  EXPECT_NEAR(a.total(), 0.3, 1e-12);
  EXPECT_NEAR(b.total(), 0.7, 1e-12);
  for (const auto& [s, p] : a) EXPECT_LE(p, b[s] + 1e-12);
}

TEST(TauMapTest, FirstMatchWinsAndDuplicatesRejected) {
  const TauMap tau({{{"Heads"}, {{"H"}}}, {{"Tails"}, {{"T"}}}});
  EXPECT_EQ(tau.lookup({"Heads"}), MappedState(EndogenousSetting{{"H"}}));
  EXPECT_EQ(tau.lookup({"Edge"}), std::nullopt);
  EXPECT_THROW(TauMap({{{"Heads"}, {{"H"}}}, {{"Heads"}, {{"T"}}}}), Error);
}

TEST(ObserverTest, RejectsInvalidPieces) {
  const auto base = coin_observer();
  const auto& m = base.referent_model();
  // Context row not normalized.
  EXPECT_THROW(with_contexts(base, Distribution<Context>::sub_distribution({{kHC, 0.4}})), Error);
  // Context outside the model.
  EXPECT_THROW(with_contexts(base, Distribution<Context>::point(Context{{"edge"}})), Error);
  // Missing encoding for a supported pair.
  EncodingDist partial;
  partial.emplace(std::make_pair(kHC, Intervention::null()), Distribution<TokenSequence>::point(kFlip));
  EXPECT_THROW(Observer(m, base.context_dist(), base.intervention_dist(), partial, base.tau()), Error);
  // Disallowed intervention with mass.
  InterventionDist bad;
  for (const auto& ctx : {kHC, kTC}) bad.emplace(ctx, Distribution<Intervention>::point(Intervention{{{"X", "H"}}}));
  try {
    Observer(m, base.context_dist(), bad, base.encoding_dist(), base.tau());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotAllowed);
  }
  // Tau target outside the referent's ranges.
  EXPECT_THROW(base.with_tau(TauMap({{{"Heads"}, {{"edge"}}}})), Error);
}

}  // namespace
}  // namespace casim
