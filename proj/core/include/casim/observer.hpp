#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "casim/distribution.hpp"
#include "casim/scm.hpp"
#include "casim/token_model.hpp"

namespace casim {

/// A referent state, or nullopt for output the observer's map does not cover.
using MappedState = std::optional<EndogenousSetting>;

struct TauEntry {
  TokenSequence pattern;
  EndogenousSetting state;

  bool operator==(const TauEntry&) const = default;
};

/// Ordered map from de-padded simulator outputs to referent states. The first
/// matching entry wins; anything unmatched maps to the unmapped outcome.
class TauMap {
 public:
  TauMap() = default;
  explicit TauMap(std::vector<TauEntry> entries);

  const std::vector<TauEntry>& entries() const { return entries_; }
  MappedState lookup(const TokenSequence& output) const;

  bool operator==(const TauMap&) const = default;

 private:
  std::vector<TauEntry> entries_;
};

using InterventionDist = std::map<Context, Distribution<Intervention>>;
using EncodingDist = std::map<std::pair<Context, Intervention>, Distribution<TokenSequence>>;

/// The observer: its causal model of the referent, the distributions it
/// draws contexts, interventions and prompts from, and its state map.
///
/// Construction checks that every conditional row is normalized, that the
/// conditional maps are total over the support of what they condition on,
/// that every intervention with mass is allowed, and that every tau target is
/// a valid referent state.
class Observer {
 public:
  Observer() = default;
  Observer(CausalModel referent_model, Distribution<Context> context_dist, InterventionDist intervention_dist,
           EncodingDist encoding_dist, TauMap tau);

  const CausalModel& referent_model() const { return model_; }
  const Distribution<Context>& context_dist() const { return contexts_; }
  const InterventionDist& intervention_dist() const { return interventions_; }
  const EncodingDist& encoding_dist() const { return encodings_; }
  const TauMap& tau() const { return tau_; }

  Observer with_tau(TauMap tau) const;

  bool operator==(const Observer&) const = default;

 private:
  CausalModel model_;
  Distribution<Context> contexts_;
  InterventionDist interventions_;
  EncodingDist encodings_;
  TauMap tau_;
};

/// Intervention distribution putting all mass on the null intervention for
/// every context of `model`.
InterventionDist never_intervene(const CausalModel& model);

/// Referent-side law: contexts and interventions drawn from the observer,
/// each pushed through the intervened model.
Distribution<EndogenousSetting> referent_outcome_distribution(const Observer& obs);

/// Prompt marginal: sum over contexts and interventions of
/// encoding(prompt | u, j) * intervention(j | u) * context(u).
Distribution<TokenSequence> prompt_distribution(const Observer& obs);

/// Prompt law paired with a simulator whose internal randomness is the
/// independent uniform draws. Holding one certifies every prompt in the
/// support fits the simulator.
struct JointInputLaw {
  Distribution<TokenSequence> prompts;
  const TokenSimulator* simulator = nullptr;
};

/// Validates that `prompts` has positive mass and that every prompt respects
/// the simulator's length bound and vocabulary.
JointInputLaw joint_input_distribution(const Distribution<TokenSequence>& prompts, const TokenSimulator& sim);

/// Maps each output through `tau` after de-padding. Total mass is preserved;
/// unmatched outputs accumulate on the unmapped outcome.
Distribution<MappedState> tau_push(const Distribution<PaddedOutput>& outputs, const TauMap& tau,
                                   const Vocabulary& vocab);

}  // namespace casim
