#include "casim/observer.hpp"

#include <set>

namespace casim {

TauMap::TauMap(std::vector<TauEntry> entries) : entries_(std::move(entries)) {
  std::set<TokenSequence> seen;
  for (const auto& e : entries_) {
    if (!seen.insert(e.pattern).second) {
      throw Error(ErrorKind::kInvalidModel, "duplicate tau pattern [" + render_tokens(e.pattern) + "]");
    }
  }
}

MappedState TauMap::lookup(const TokenSequence& output) const {
  for (const auto& e : entries_) {
    if (e.pattern == output) return e.state;
  }
  return std::nullopt;
}

Observer::Observer(CausalModel referent_model, Distribution<Context> context_dist,
                   InterventionDist intervention_dist, EncodingDist encoding_dist, TauMap tau)
    : model_(std::move(referent_model)),
      contexts_(std::move(context_dist)),
      interventions_(std::move(intervention_dist)),
      encodings_(std::move(encoding_dist)),
      tau_(std::move(tau)) {
  contexts_.require_normalized("context distribution");
  for (const auto& [ctx, _] : contexts_) {
    if (!model_.is_valid_context(ctx)) {
      throw Error(ErrorKind::kInvalidModel, "context (" + join_key(ctx.values) + ") is not valid for the referent model");
    }
  }
  for (const auto& [ctx, ivs] : interventions_) {
    const std::string where = "intervention distribution (" + join_key(ctx.values) + ")";
    if (!model_.is_valid_context(ctx)) throw Error(ErrorKind::kInvalidModel, "invalid context", where);
    try {
      ivs.validate();
    } catch (const Error& e) {
      throw e.nested(where);
    }
    for (const auto& [iv, _] : ivs) {
      if (!model_.is_allowed(iv)) {
        throw Error(ErrorKind::kNotAllowed, intervention_key(model_, iv) + " is not an allowed intervention", where);
      }
    }
  }
  for (const auto& [key, prompts] : encodings_) {
    const std::string where =
        "encoding distribution (" + join_key(key.first.values) + ", " + intervention_key(model_, key.second) + ")";
    if (!model_.is_valid_context(key.first)) throw Error(ErrorKind::kInvalidModel, "invalid context", where);
    try {
      prompts.validate();
    } catch (const Error& e) {
      throw e.nested(where);
    }
  }

  contexts_.for_each_positive([&](const Context& ctx, double) {
    auto it = interventions_.find(ctx);
    if (it == interventions_.end()) {
      throw Error(ErrorKind::kInvalidModel, "no intervention distribution for context (" + join_key(ctx.values) + ")");
    }
    it->second.for_each_positive([&](const Intervention& iv, double) {
      if (!encodings_.contains({ctx, iv})) {
        throw Error(ErrorKind::kInvalidModel, "no encoding distribution for (" + join_key(ctx.values) + ", " +
                                                  intervention_key(model_, iv) + ")");
      }
    });
  });

  for (const auto& e : tau_.entries()) {
    if (!model_.is_valid_setting(e.state)) {
      throw Error(ErrorKind::kInvalidModel, "tau target (" + join_key(e.state.values) +
                                                ") is not a valid referent state",
                  "tau [" + render_tokens(e.pattern) + "]");
    }
  }
}

Observer Observer::with_tau(TauMap tau) const {
  return Observer(model_, contexts_, interventions_, encodings_, std::move(tau));
}

InterventionDist never_intervene(const CausalModel& model) {
  InterventionDist out;
  for (auto& ctx : model.all_contexts()) out.emplace(std::move(ctx), Distribution<Intervention>::point(Intervention::null()));
  return out;
}

Distribution<EndogenousSetting> referent_outcome_distribution(const Observer& obs) {
  const auto& model = obs.referent_model();
  Distribution<EndogenousSetting> out;
  obs.context_dist().for_each_positive([&](const Context& ctx, double pc) {
    obs.intervention_dist().at(ctx).for_each_positive([&](const Intervention& iv, double pj) {
      out.add(evaluate(apply_intervention(model, iv), ctx), pc * pj);
    });
  });
  return out;
}

Distribution<TokenSequence> prompt_distribution(const Observer& obs) {
  const auto& model = obs.referent_model();
  Distribution<TokenSequence> out;
  obs.context_dist().for_each_positive([&](const Context& ctx, double pc) {
    auto ivs = obs.intervention_dist().find(ctx);
    if (ivs == obs.intervention_dist().end()) {
      throw Error(ErrorKind::kInvalidModel, "no intervention distribution for context (" + join_key(ctx.values) + ")");
    }
    ivs->second.for_each_positive([&](const Intervention& iv, double pj) {
      auto enc = obs.encoding_dist().find({ctx, iv});
      if (enc == obs.encoding_dist().end()) {
        throw Error(ErrorKind::kInvalidModel, "no encoding distribution for (" + join_key(ctx.values) + ", " +
                                                  intervention_key(model, iv) + ")");
      }
      for (const auto& [prompt, pp] : enc->second) out.add(prompt, pp * pj * pc);
    });
  });
  return out;
}

JointInputLaw joint_input_distribution(const Distribution<TokenSequence>& prompts, const TokenSimulator& sim) {
  if (prompts.empty() || prompts.total() <= 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "prompt distribution is empty; the simulator is never switched on");
  }
  prompts.require_normalized("prompt distribution");
  prompts.for_each_positive([&](const TokenSequence& prompt, double) { sim.check_prompt(prompt); });
  return {prompts, &sim};
}

Distribution<MappedState> tau_push(const Distribution<PaddedOutput>& outputs, const TauMap& tau,
                                   const Vocabulary& vocab) {
  Distribution<MappedState> out;
  for (const auto& [o, p] : outputs) out.add(tau.lookup(depad(o, vocab)), p);
  out.mark_sub(outputs.is_sub());
  return out;
}

}  // namespace casim
