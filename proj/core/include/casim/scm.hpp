#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "casim/distribution.hpp"

namespace casim {

using Symbol = std::string;

enum class Role { kExogenous, kEndogenous };

/// Ordered, duplicate-free set of values a variable may take.
class FiniteRange {
 public:
  FiniteRange() = default;
  explicit FiniteRange(std::vector<Symbol> values);

  const std::vector<Symbol>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool contains(std::string_view v) const;

  bool operator==(const FiniteRange&) const = default;

 private:
  std::vector<Symbol> values_;
};

struct Variable {
  Symbol name;
  FiniteRange range;

  bool operator==(const Variable&) const = default;
};

/// Extensional structural equation: `table` maps each tuple of input values
/// (in `inputs` order) to a value of `target`.
struct StructuralEquation {
  Symbol target;
  std::vector<Symbol> inputs;
  std::map<std::vector<Symbol>, Symbol> table;

  bool operator==(const StructuralEquation&) const = default;
};

/// Assignment of every exogenous variable, in the model's declared order.
struct Context {
  std::vector<Symbol> values;

  auto operator<=>(const Context&) const = default;
};

/// Assignment of every endogenous variable, in the model's declared order.
struct EndogenousSetting {
  std::vector<Symbol> values;

  auto operator<=>(const EndogenousSetting&) const = default;
};

/// Partial assignment of variables; the empty assignment is the null
/// intervention.
struct Intervention {
  std::map<Symbol, Symbol> assignments;

  static Intervention null() { return {}; }
  bool is_null() const { return assignments.empty(); }

  auto operator<=>(const Intervention&) const = default;
};

/// Finite acyclic causal model with extensional structural equations.
///
/// Construction validates every invariant: unique names, non-empty ranges,
/// exactly one total equation per endogenous variable, declared inputs, an
/// acyclic endogenous dependency graph, and in-range allowed interventions.
/// Instances are immutable afterwards.
class CausalModel {
 public:
  CausalModel() = default;
  CausalModel(std::vector<Variable> exogenous, std::vector<Variable> endogenous,
              std::vector<StructuralEquation> equations,
              std::vector<Intervention> allowed_interventions = {});

  const std::vector<Variable>& exogenous() const { return exogenous_; }
  const std::vector<Variable>& endogenous() const { return endogenous_; }
  /// Equations in endogenous declaration order.
  const std::vector<StructuralEquation>& equations() const { return equations_; }
  const std::vector<Intervention>& allowed_interventions() const { return allowed_; }
  /// Exogenous values pinned by applied interventions.
  const std::map<Symbol, Symbol>& exogenous_overrides() const { return overrides_; }
  /// Endogenous indices in an order where every equation's inputs come first.
  const std::vector<std::size_t>& topological_order() const { return topo_; }

  std::optional<Role> role_of(std::string_view name) const;
  const FiniteRange& range_of(std::string_view name) const;
  std::size_t exogenous_index(std::string_view name) const;
  std::size_t endogenous_index(std::string_view name) const;

  bool is_allowed(const Intervention& iv) const;
  bool is_valid_context(const Context& ctx) const;
  bool is_valid_setting(const EndogenousSetting& setting) const;

  /// Every context in the cross product of exogenous ranges, in canonical order.
  std::vector<Context> all_contexts() const;

  bool operator==(const CausalModel&) const = default;

 private:
  friend CausalModel apply_intervention(const CausalModel&, const Intervention&);

  void validate_and_index();

  std::vector<Variable> exogenous_;
  std::vector<Variable> endogenous_;
  std::vector<StructuralEquation> equations_;
  std::vector<Intervention> allowed_;
  std::map<Symbol, Symbol> overrides_;
  std::vector<std::size_t> topo_;
};

/// Solves the structural equations under `context` in topological order.
EndogenousSetting evaluate(const CausalModel& model, const Context& context);

/// Null returns the model unchanged. An exogenous assignment pins that
/// variable for every context; an endogenous assignment replaces its equation
/// with a constant. Non-null interventions must be allowed by the model.
CausalModel apply_intervention(const CausalModel& model, const Intervention& iv);

/// Distribution over endogenous settings induced by a context distribution.
/// Preserves total mass, so sub-distributions stay sub-distributions.
Distribution<EndogenousSetting> push_forward(const CausalModel& model,
                                             const Distribution<Context>& contexts);

/// Canonical "|"-joined key for a value tuple; also the scenario-file key.
std::string join_key(const std::vector<Symbol>& values);
std::vector<Symbol> split_key(std::string_view key);

/// Canonical key for an intervention: "null" or "Var=value|Var=value" with
/// variables in the model's declaration order (exogenous first).
std::string intervention_key(const CausalModel& model, const Intervention& iv);
Intervention parse_intervention_key(const CausalModel& model, std::string_view key);

/// Human-readable "X=H, Y=T" rendering of a setting.
std::string describe(const CausalModel& model, const EndogenousSetting& setting);

}  // namespace casim
