#include <gtest/gtest.h>

#include "property_suites.hpp"

namespace casim {
namespace {

TEST(PropertyTest, SamplerRows) { EXPECT_EQ(testing::sampler_rows_property(1000, 1), ""); }

TEST(PropertyTest, ExactAgreesWithMonteCarlo) { EXPECT_EQ(testing::exact_vs_mc_property(10'000, 3), ""); }

TEST(PropertyTest, EpsilonMonotone) { EXPECT_EQ(testing::epsilon_monotone_property(300, 5), ""); }

TEST(PropertyTest, TvdIsAMetric) { EXPECT_EQ(testing::tvd_metric_property(1000, 7), ""); }

TEST(PropertyTest, TauPushConservesMass) { EXPECT_EQ(testing::tau_mass_property(500, 11), ""); }

TEST(PropertyTest, BuiltinsRoundTrip) { EXPECT_EQ(testing::round_trip_property(), ""); }

TEST(PropertyTest, PromptMarginalIsNormalized) {
  std::mt19937_64 rng(13);
  const auto base = coin_observer();
  const std::vector<TokenSequence> prompts{{"flip", "a", "coin"}, {"toss", "a", "coin"}, {"simulate", "a", "coin"}};
  const std::vector<Context> contexts{Context{{"H-causing"}}, Context{{"T-causing"}}};
  const std::vector<Intervention> ivs{Intervention::null(), Intervention{{{"S", "H-causing"}}},
                                      Intervention{{{"S", "T-causing"}}}};
  for (int i = 0; i < 200; ++i) {
    const auto ctx_row = testing::random_row(rng, {"H-causing", "T-causing"}, 2);
    Distribution<Context> ctx;
    for (const auto& [v, p] : ctx_row) ctx.add(Context{{v}}, p);
    InterventionDist iv_dist;
    EncodingDist enc;
    for (const auto& c : contexts) {
      const auto iv_row = testing::random_row(rng, {"0", "1", "2"}, 3);
      Distribution<Intervention> row;
      for (const auto& [idx, p] : iv_row) row.add(ivs[std::stoul(idx)], p);
      iv_dist.emplace(c, row);
      for (const auto& iv : ivs) {
        const auto e_row = testing::random_row(rng, {"0", "1", "2"}, 3);
        Distribution<TokenSequence> e;
        for (const auto& [idx, p] : e_row) e.add(prompts[std::stoul(idx)], p);
        enc.emplace(std::make_pair(c, iv), e);
      }
    }
    const Observer obs(base.referent_model(), ctx, iv_dist, enc, base.tau());
    EXPECT_TRUE(prompt_distribution(obs).is_normalized());
    EXPECT_TRUE(referent_outcome_distribution(obs).is_normalized());
  }
}

TEST(PropertyTest, ExactMatchesGridOnRandomTables) {
  std::mt19937_64 rng(17);
  const auto obs = coin_observer(true);
  for (int i = 0; i < 100; ++i) {
    const auto sim = testing::random_coin_simulator(rng);
    if (sim.sampler().kind == Sampler::Kind::kTopP) continue;  // renormalized masses need not be on the grid
    const auto prompts = prompt_distribution(obs);
    const auto exact = exact_output_distribution(sim, prompts);
    // Row weights are integers summing to at most 24, so a grid of lcm(1..24)
    // would be exact; a fine grid bounds the error by the cell count instead.
    const auto grid = testing::grid_output_law(sim, prompts.masses(), 20'000);
    EXPECT_LT(testing::abs_sum_half(exact.masses(), grid), 4 * 2.0 / 20'000) << i;
  }
}

}  // namespace
}  // namespace casim
