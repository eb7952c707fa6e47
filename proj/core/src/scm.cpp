#include "casim/scm.hpp"

#include <algorithm>
#include <set>

namespace casim {

namespace {

void check_symbol(std::string_view s, std::string_view what) {
  if (s.empty()) throw Error(ErrorKind::kInvalidModel, std::string(what) + " must be non-empty");
  if (s.find('|') != std::string_view::npos) {
    throw Error(ErrorKind::kInvalidModel,
                std::string(what) + " '" + std::string(s) + "' must not contain '|'");
  }
}

const Variable* find_variable(const std::vector<Variable>& vars, std::string_view name) {
  auto it = std::find_if(vars.begin(), vars.end(), [&](const Variable& v) { return v.name == name; });
  return it == vars.end() ? nullptr : &*it;
}

}  // namespace

FiniteRange::FiniteRange(std::vector<Symbol> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorKind::kInvalidModel, "range must be non-empty");
  std::set<std::string_view> seen;
  for (const auto& v : values_) {
    check_symbol(v, "range value");
    if (!seen.insert(v).second) {
      throw Error(ErrorKind::kInvalidModel, "duplicate range value '" + v + "'");
    }
  }
}

bool FiniteRange::contains(std::string_view v) const {
  return std::find(values_.begin(), values_.end(), v) != values_.end();
}

CausalModel::CausalModel(std::vector<Variable> exogenous, std::vector<Variable> endogenous,
                         std::vector<StructuralEquation> equations,
                         std::vector<Intervention> allowed_interventions)
    : exogenous_(std::move(exogenous)),
      endogenous_(std::move(endogenous)),
      equations_(std::move(equations)),
      allowed_(std::move(allowed_interventions)) {
  validate_and_index();
}

std::optional<Role> CausalModel::role_of(std::string_view name) const {
  if (find_variable(exogenous_, name)) return Role::kExogenous;
  if (find_variable(endogenous_, name)) return Role::kEndogenous;
  return std::nullopt;
}

const FiniteRange& CausalModel::range_of(std::string_view name) const {
  if (const auto* v = find_variable(exogenous_, name)) return v->range;
  if (const auto* v = find_variable(endogenous_, name)) return v->range;
  throw Error(ErrorKind::kInvalidArgument, "unknown variable '" + std::string(name) + "'");
}

std::size_t CausalModel::exogenous_index(std::string_view name) const {
  for (std::size_t i = 0; i < exogenous_.size(); ++i) {
    if (exogenous_[i].name == name) return i;
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown exogenous variable '" + std::string(name) + "'");
}

std::size_t CausalModel::endogenous_index(std::string_view name) const {
  for (std::size_t i = 0; i < endogenous_.size(); ++i) {
    if (endogenous_[i].name == name) return i;
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown endogenous variable '" + std::string(name) + "'");
}

void CausalModel::validate_and_index() {
  std::set<std::string_view> names;
  for (const auto* group : {&exogenous_, &endogenous_}) {
    for (const auto& v : *group) {
      check_symbol(v.name, "variable name");
      if (v.name.find('=') != std::string::npos) {
        throw Error(ErrorKind::kInvalidModel, "variable name '" + v.name + "' must not contain '='");
      }
      if (v.range.size() == 0) {
        throw Error(ErrorKind::kInvalidModel, "variable '" + v.name + "' has an empty range");
      }
      if (!names.insert(v.name).second) {
        throw Error(ErrorKind::kInvalidModel, "duplicate variable name '" + v.name + "'");
      }
    }
  }

  // One equation per endogenous variable, reordered to declaration order.
  std::vector<StructuralEquation> ordered(endogenous_.size());
  std::vector<bool> have(endogenous_.size(), false);
  for (auto& eq : equations_) {
    if (role_of(eq.target) != Role::kEndogenous) {
      throw Error(ErrorKind::kInvalidModel,
                  "equation target '" + eq.target + "' is not an endogenous variable");
    }
    const std::size_t idx = endogenous_index(eq.target);
    if (have[idx]) {
      throw Error(ErrorKind::kInvalidModel, "more than one equation for '" + eq.target + "'");
    }
    have[idx] = true;

    std::set<std::string_view> seen_inputs;
    std::size_t cells = 1;
    for (const auto& in : eq.inputs) {
      if (!role_of(in)) {
        throw Error(ErrorKind::kInvalidModel,
                    "equation for '" + eq.target + "' uses undeclared input '" + in + "'");
      }
      if (!seen_inputs.insert(in).second) {
        throw Error(ErrorKind::kInvalidModel,
                    "equation for '" + eq.target + "' lists input '" + in + "' twice");
      }
      cells *= range_of(in).size();
    }
    const auto& target_range = range_of(eq.target);
    for (const auto& [key, out] : eq.table) {
      if (key.size() != eq.inputs.size()) {
        throw Error(ErrorKind::kInvalidModel, "equation for '" + eq.target + "' has a row of arity " +
                                                  std::to_string(key.size()) + ", expected " +
                                                  std::to_string(eq.inputs.size()));
      }
      for (std::size_t i = 0; i < key.size(); ++i) {
        if (!range_of(eq.inputs[i]).contains(key[i])) {
          throw Error(ErrorKind::kInvalidModel, "equation for '" + eq.target + "': value '" + key[i] +
                                                    "' is outside the range of '" + eq.inputs[i] + "'");
        }
      }
      if (!target_range.contains(out)) {
        throw Error(ErrorKind::kInvalidModel, "equation for '" + eq.target + "' outputs '" + out +
                                                  "', which is outside its range");
      }
    }
    if (eq.table.size() != cells) {
      throw Error(ErrorKind::kInvalidModel, "equation for '" + eq.target + "' is not total: " +
                                                std::to_string(eq.table.size()) + " of " +
                                                std::to_string(cells) + " input tuples defined");
    }
    ordered[idx] = std::move(eq);
  }
  for (std::size_t i = 0; i < endogenous_.size(); ++i) {
    if (!have[i]) {
      throw Error(ErrorKind::kInvalidModel, "no equation for endogenous variable '" + endogenous_[i].name + "'");
    }
  }
  equations_ = std::move(ordered);

  // Kahn's algorithm over endogenous-to-endogenous edges; ties resolved by
  // declaration order so the order is canonical.
  const std::size_t n = endogenous_.size();
  std::vector<std::size_t> indegree(n, 0);
  std::vector<std::vector<std::size_t>> dependents(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& in : equations_[i].inputs) {
      if (role_of(in) == Role::kEndogenous) {
        const std::size_t j = endogenous_index(in);
        dependents[j].push_back(i);
        ++indegree[i];
      }
    }
  }
  topo_.clear();
  std::set<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.insert(i);
  }
  while (!ready.empty()) {
    const std::size_t i = *ready.begin();
    ready.erase(ready.begin());
    topo_.push_back(i);
    for (std::size_t d : dependents[i]) {
      if (--indegree[d] == 0) ready.insert(d);
    }
  }
  if (topo_.size() != n) {
    std::string cyclic;
    for (std::size_t i = 0; i < n; ++i) {
      if (indegree[i] > 0) cyclic += (cyclic.empty() ? "" : ", ") + endogenous_[i].name;
    }
    throw Error(ErrorKind::kInvalidModel, "endogenous dependency graph has a cycle through " + cyclic);
  }

  for (const auto& iv : allowed_) {
    if (iv.is_null()) {
      throw Error(ErrorKind::kInvalidModel, "the null intervention is implicit and may not be listed");
    }
    for (const auto& [var, value] : iv.assignments) {
      if (!role_of(var)) {
        throw Error(ErrorKind::kInvalidModel, "allowed intervention assigns undeclared variable '" + var + "'");
      }
      if (!range_of(var).contains(value)) {
        throw Error(ErrorKind::kInvalidModel, "allowed intervention sets '" + var + "' to out-of-range value '" +
                                                  value + "'");
      }
    }
  }
  for (const auto& [var, value] : overrides_) {
    if (role_of(var) != Role::kExogenous || !range_of(var).contains(value)) {
      throw Error(ErrorKind::kInvalidModel, "invalid exogenous override '" + var + "=" + value + "'");
    }
  }
}

bool CausalModel::is_allowed(const Intervention& iv) const {
  return iv.is_null() || std::find(allowed_.begin(), allowed_.end(), iv) != allowed_.end();
}

bool CausalModel::is_valid_context(const Context& ctx) const {
  if (ctx.values.size() != exogenous_.size()) return false;
  for (std::size_t i = 0; i < ctx.values.size(); ++i) {
    if (!exogenous_[i].range.contains(ctx.values[i])) return false;
  }
  return true;
}

bool CausalModel::is_valid_setting(const EndogenousSetting& setting) const {
  if (setting.values.size() != endogenous_.size()) return false;
  for (std::size_t i = 0; i < setting.values.size(); ++i) {
    if (!endogenous_[i].range.contains(setting.values[i])) return false;
  }
  return true;
}

std::vector<Context> CausalModel::all_contexts() const {
  std::vector<Context> out{Context{}};
  for (const auto& v : exogenous_) {
    std::vector<Context> next;
    next.reserve(out.size() * v.range.size());
    for (const auto& partial : out) {
      for (const auto& value : v.range.values()) {
        Context c = partial;
        c.values.push_back(value);
        next.push_back(std::move(c));
      }
    }
    out = std::move(next);
  }
  return out;
}

EndogenousSetting evaluate(const CausalModel& model, const Context& context) {
  const auto& exo = model.exogenous();
  if (context.values.size() != exo.size()) {
    throw Error(ErrorKind::kInvalidArgument, "context assigns " + std::to_string(context.values.size()) +
                                                 " exogenous variables, model declares " +
                                                 std::to_string(exo.size()));
  }
  std::vector<Symbol> exo_values = context.values;
  for (std::size_t i = 0; i < exo.size(); ++i) {
    if (auto it = model.exogenous_overrides().find(exo[i].name); it != model.exogenous_overrides().end()) {
      exo_values[i] = it->second;
    } else if (!exo[i].range.contains(exo_values[i])) {
      throw Error(ErrorKind::kInvalidArgument,
                  "context value '" + exo_values[i] + "' is outside the range of '" + exo[i].name + "'");
    }
  }

  const auto& endo = model.endogenous();
  std::vector<std::optional<Symbol>> endo_values(endo.size());
  std::vector<Symbol> key;
  for (std::size_t idx : model.topological_order()) {
    const auto& eq = model.equations()[idx];
    key.clear();
    for (const auto& in : eq.inputs) {
      if (model.role_of(in) == Role::kExogenous) {
        key.push_back(exo_values[model.exogenous_index(in)]);
      } else {
        key.push_back(*endo_values[model.endogenous_index(in)]);
      }
    }
    auto it = eq.table.find(key);
    if (it == eq.table.end()) {
      throw Error(ErrorKind::kInvalidModel,
                  "equation for '" + eq.target + "' has no row for (" + join_key(key) + ")");
    }
    endo_values[idx] = it->second;
  }

  EndogenousSetting out;
  out.values.reserve(endo.size());
  for (auto& v : endo_values) out.values.push_back(std::move(*v));
  return out;
}

CausalModel apply_intervention(const CausalModel& model, const Intervention& iv) {
  if (iv.is_null()) return model;
  for (const auto& [var, value] : iv.assignments) {
    if (!model.role_of(var)) {
      throw Error(ErrorKind::kInvalidArgument, "intervention assigns undeclared variable '" + var + "'");
    }
    if (!model.range_of(var).contains(value)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "intervention sets '" + var + "' to out-of-range value '" + value + "'");
    }
  }
  if (!model.is_allowed(iv)) {
    throw Error(ErrorKind::kNotAllowed, intervention_key(model, iv) + " is not an allowed intervention");
  }

  CausalModel out = model;
  for (const auto& [var, value] : iv.assignments) {
    if (model.role_of(var) == Role::kExogenous) {
      out.overrides_[var] = value;
    } else {
      auto& eq = out.equations_[model.endogenous_index(var)];
      eq.inputs.clear();
      eq.table = {{{}, value}};
    }
  }
  out.validate_and_index();
  return out;
}

Distribution<EndogenousSetting> push_forward(const CausalModel& model,
                                             const Distribution<Context>& contexts) {
  Distribution<EndogenousSetting> out;
  for (const auto& [ctx, p] : contexts) out.add(evaluate(model, ctx), p);
  out.mark_sub(contexts.is_sub());
  return out;
}

std::string join_key(const std::vector<Symbol>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += '|';
    out += values[i];
  }
  return out;
}

std::vector<Symbol> split_key(std::string_view key) {
  std::vector<Symbol> out;
  std::size_t start = 0;
  while (true) {
    const auto bar = key.find('|', start);
    out.emplace_back(key.substr(start, bar == std::string_view::npos ? std::string_view::npos : bar - start));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  return out;
}

std::string intervention_key(const CausalModel& model, const Intervention& iv) {
  if (iv.is_null()) return "null";
  std::string out;
  auto emit = [&](const std::vector<Variable>& vars) {
    for (const auto& v : vars) {
      if (auto it = iv.assignments.find(v.name); it != iv.assignments.end()) {
        if (!out.empty()) out += '|';
        out += v.name + "=" + it->second;
      }
    }
  };
  emit(model.exogenous());
  emit(model.endogenous());
  // Undeclared names still render so errors can name them.
  for (const auto& [var, value] : iv.assignments) {
    if (!model.role_of(var)) out += (out.empty() ? "" : "|") + var + "=" + value;
  }
  return out;
}

Intervention parse_intervention_key(const CausalModel& model, std::string_view key) {
  if (key == "null") return Intervention::null();
  Intervention iv;
  for (const auto& part : split_key(key)) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kInvalidModel, "intervention key part '" + part + "' is not Var=value");
    }
    Symbol var = part.substr(0, eq);
    Symbol value = part.substr(eq + 1);
    if (!model.role_of(var)) {
      throw Error(ErrorKind::kInvalidModel, "intervention key names undeclared variable '" + var + "'");
    }
    if (!iv.assignments.emplace(std::move(var), std::move(value)).second) {
      throw Error(ErrorKind::kInvalidModel, "intervention key assigns a variable twice");
    }
  }
  return iv;
}

std::string describe(const CausalModel& model, const EndogenousSetting& setting) {
  std::string out;
  for (std::size_t i = 0; i < setting.values.size() && i < model.endogenous().size(); ++i) {
    if (i) out += ", ";
    out += model.endogenous()[i].name + "=" + setting.values[i];
  }
  return out;
}

}  // namespace casim
