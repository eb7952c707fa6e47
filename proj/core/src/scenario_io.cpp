#include "casim/scenario_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace casim {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(ErrorKind kind, const std::string& path, const std::string& msg) {
  throw Error(kind, msg, path.empty() ? "/" : path);
}

std::string child(const std::string& path, std::string_view key) { return path + "/" + std::string(key); }
std::string child(const std::string& path, std::size_t index) { return path + "/" + std::to_string(index); }

template <class F>
auto located(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kParse || e.kind() == ErrorKind::kSchema) throw;
    throw e.nested(path);
  }
}

const char* type_name(const json& j) { return j.type_name(); }

void expect_object(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) fail(ErrorKind::kSchema, path, std::string("expected an object, got ") + type_name(j));
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || a == key;
    if (!known) fail(ErrorKind::kSchema, child(path, key), "unknown key");
  }
}

const json& require(const json& j, std::string_view key, const std::string& path) {
  auto it = j.find(std::string(key));
  if (it == j.end()) fail(ErrorKind::kSchema, child(path, key), "missing required key");
  return *it;
}

const json* optional_key(const json& j, std::string_view key) {
  auto it = j.find(std::string(key));
  return it == j.end() ? nullptr : &*it;
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(ErrorKind::kSchema, path, std::string("expected a string, got ") + type_name(j));
  return j.get<std::string>();
}

std::vector<std::string> as_strings(const json& j, const std::string& path) {
  if (!j.is_array()) fail(ErrorKind::kSchema, path, std::string("expected an array, got ") + type_name(j));
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_string(j[i], child(path, i)));
  return out;
}

const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) fail(ErrorKind::kSchema, path, std::string("expected an array, got ") + type_name(j));
  return j;
}

std::uint64_t as_unsigned(const json& j, const std::string& path) {
  if (!j.is_number_unsigned()) {
    fail(ErrorKind::kSchema, path, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

double as_probability(const json& j, const std::string& path) {
  double p = 0.0;
  if (j.is_number()) {
    p = j.get<double>();
  } else if (j.is_string()) {
    try {
      p = parse_probability(j.get<std::string>());
    } catch (const Error& e) {
      fail(ErrorKind::kSchema, path, e.detail());
    }
  } else {
    fail(ErrorKind::kSchema, path, std::string("expected a probability, got ") + type_name(j));
  }
  if (!std::isfinite(p) || p < 0.0 || p > 1.0 + kTolerance) {
    fail(ErrorKind::kInvalidModel, path, "probability " + format_real(p) + " is outside [0, 1]");
  }
  return p;
}

std::vector<Variable> parse_variables(const json& j, const std::string& path) {
  std::vector<Variable> out;
  const auto& arr = as_array(j, path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto p = child(path, i);
    expect_object(arr[i], p, {"name", "range"});
    Variable v;
    v.name = as_string(require(arr[i], "name", p), child(p, "name"));
    auto values = as_strings(require(arr[i], "range", p), child(p, "range"));
    v.range = located(child(p, "range"), [&] { return FiniteRange(std::move(values)); });
    out.push_back(std::move(v));
  }
  return out;
}

Intervention parse_intervention_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(ErrorKind::kSchema, path, "expected an object of variable assignments");
  Intervention iv;
  for (const auto& [var, value] : j.items()) iv.assignments[var] = as_string(value, child(path, var));
  return iv;
}

CausalModel parse_model(const json& j, const std::string& path) {
  expect_object(j, path, {"exogenous", "endogenous", "equations", "allowedInterventions"});
  auto exo = parse_variables(require(j, "exogenous", path), child(path, "exogenous"));
  auto endo = parse_variables(require(j, "endogenous", path), child(path, "endogenous"));

  std::vector<StructuralEquation> equations;
  const auto eq_path = child(path, "equations");
  const auto& eqs = as_array(require(j, "equations", path), eq_path);
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    const auto p = child(eq_path, i);
    expect_object(eqs[i], p, {"target", "inputs", "table"});
    StructuralEquation eq;
    eq.target = as_string(require(eqs[i], "target", p), child(p, "target"));
    eq.inputs = as_strings(require(eqs[i], "inputs", p), child(p, "inputs"));
    const auto table_path = child(p, "table");
    const auto& rows = as_array(require(eqs[i], "table", p), table_path);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto rp = child(table_path, r);
      expect_object(rows[r], rp, {"in", "out"});
      auto in = as_strings(require(rows[r], "in", rp), child(rp, "in"));
      auto out = as_string(require(rows[r], "out", rp), child(rp, "out"));
      if (!eq.table.emplace(std::move(in), std::move(out)).second) {
        fail(ErrorKind::kInvalidModel, rp, "duplicate input tuple");
      }
    }
    equations.push_back(std::move(eq));
  }

  std::vector<Intervention> allowed;
  if (const auto* ivs = optional_key(j, "allowedInterventions")) {
    const auto p = child(path, "allowedInterventions");
    const auto& arr = as_array(*ivs, p);
    for (std::size_t i = 0; i < arr.size(); ++i) allowed.push_back(parse_intervention_object(arr[i], child(p, i)));
  }
  return located(path, [&] {
    return CausalModel(std::move(exo), std::move(endo), std::move(equations), std::move(allowed));
  });
}

Context parse_context_key(const CausalModel& model, const std::string& key, const std::string& path) {
  Context ctx{split_key(key)};
  if (!model.is_valid_context(ctx)) {
    fail(ErrorKind::kInvalidModel, path, "'" + key + "' is not a valid context of the referent model");
  }
  return ctx;
}

template <class T, class KeyFn>
Distribution<T> parse_keyed_dist(const json& j, const std::string& path, KeyFn&& key_fn) {
  if (!j.is_object()) fail(ErrorKind::kSchema, path, "expected an outcome -> probability object");
  Distribution<T> d;
  for (const auto& [key, value] : j.items()) {
    const auto p = child(path, key);
    d.add(key_fn(key, p), as_probability(value, p));
  }
  located(path, [&] { d.validate(); });
  return d;
}

TauMap parse_tau(const json& j, const CausalModel& model, const std::string& path) {
  std::vector<TauEntry> entries;
  const auto& arr = as_array(j, path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto p = child(path, i);
    expect_object(arr[i], p, {"pattern", "state"});
    TauEntry e;
    e.pattern = as_strings(require(arr[i], "pattern", p), child(p, "pattern"));
    const auto sp = child(p, "state");
    const auto& state = require(arr[i], "state", p);
    if (!state.is_object()) fail(ErrorKind::kSchema, sp, "expected an object of endogenous assignments");
    for (const auto& [var, _] : state.items()) {
      if (model.role_of(var) != Role::kEndogenous) {
        fail(ErrorKind::kInvalidModel, child(sp, var), "not an endogenous variable of the referent model");
      }
    }
    for (const auto& v : model.endogenous()) {
      auto it = state.find(v.name);
      if (it == state.end()) fail(ErrorKind::kInvalidModel, child(sp, v.name), "tau state must assign every endogenous variable");
      auto value = as_string(*it, child(sp, v.name));
      if (!v.range.contains(value)) {
        fail(ErrorKind::kInvalidModel, child(sp, v.name), "'" + value + "' is outside the variable's range");
      }
      e.state.values.push_back(std::move(value));
    }
    entries.push_back(std::move(e));
  }
  return located(path, [&] { return TauMap(std::move(entries)); });
}

Observer parse_observer(const json& j, const std::string& path) {
  expect_object(j, path, {"model", "contextDist", "interventionDist", "encodingDist", "tau"});
  auto model = parse_model(require(j, "model", path), child(path, "model"));

  const auto cpath = child(path, "contextDist");
  auto contexts = parse_keyed_dist<Context>(require(j, "contextDist", path), cpath,
                                            [&](const std::string& key, const std::string& p) {
                                              return parse_context_key(model, key, p);
                                            });

  InterventionDist interventions;
  if (const auto* ivj = optional_key(j, "interventionDist")) {
    const auto ipath = child(path, "interventionDist");
    if (!ivj->is_object()) fail(ErrorKind::kSchema, ipath, "expected a context -> distribution object");
    for (const auto& [ckey, dist] : ivj->items()) {
      const auto p = child(ipath, ckey);
      auto ctx = parse_context_key(model, ckey, p);
      interventions.emplace(std::move(ctx), parse_keyed_dist<Intervention>(
                                                dist, p, [&](const std::string& key, const std::string& kp) {
                                                  return located(kp, [&] { return parse_intervention_key(model, key); });
                                                }));
    }
  } else {
    interventions = never_intervene(model);
  }

  EncodingDist encodings;
  const auto epath = child(path, "encodingDist");
  const auto& ej = require(j, "encodingDist", path);
  if (!ej.is_object()) fail(ErrorKind::kSchema, epath, "expected a context -> intervention -> prompts object");
  for (const auto& [ckey, by_iv] : ej.items()) {
    const auto cp = child(epath, ckey);
    auto ctx = parse_context_key(model, ckey, cp);
    if (!by_iv.is_object()) fail(ErrorKind::kSchema, cp, "expected an intervention -> prompts object");
    for (const auto& [ikey, prompts] : by_iv.items()) {
      const auto ip = child(cp, ikey);
      auto iv = located(ip, [&] { return parse_intervention_key(model, ikey); });
      Distribution<TokenSequence> d;
      const auto& arr = as_array(prompts, ip);
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto pp = child(ip, i);
        expect_object(arr[i], pp, {"prompt", "p"});
        auto prompt = as_strings(require(arr[i], "prompt", pp), child(pp, "prompt"));
        if (d.masses().contains(prompt)) fail(ErrorKind::kInvalidModel, pp, "duplicate prompt");
        d.add(prompt, as_probability(require(arr[i], "p", pp), child(pp, "p")));
      }
      located(ip, [&] { d.validate(); });
      encodings.emplace(std::make_pair(ctx, std::move(iv)), std::move(d));
    }
  }

  auto tau = parse_tau(require(j, "tau", path), model, child(path, "tau"));
  return located(path, [&] {
    return Observer(std::move(model), std::move(contexts), std::move(interventions), std::move(encodings),
                    std::move(tau));
  });
}

Sampler parse_sampler(const json& j, const std::string& path) {
  expect_object(j, path, {"kind", "k", "p"});
  const auto kind = as_string(require(j, "kind", path), child(path, "kind"));
  return located(path, [&] {
    if (kind == "greedy") return Sampler::greedy();
    if (kind == "top-k") return Sampler::top_k(as_unsigned(require(j, "k", path), child(path, "k")));
    if (kind == "top-p") {
      const auto& pj = require(j, "p", path);
      if (!pj.is_number()) fail(ErrorKind::kSchema, child(path, "p"), "expected a number");
      return Sampler::top_p(pj.get<double>());
    }
    fail(ErrorKind::kSchema, child(path, "kind"), "unknown sampler kind '" + kind + "' (greedy, top-k, top-p)");
  });
}

TokenSimulator parse_simulator(const json& j, const std::string& path) {
  expect_object(j, path, {"vocab", "stop", "pad", "maxOutputLen", "contextSize", "sampler", "table"});
  auto tokens = as_strings(require(j, "vocab", path), child(path, "vocab"));
  std::string stop = "STOP";
  std::string pad = "ε";
  if (const auto* s = optional_key(j, "stop")) stop = as_string(*s, child(path, "stop"));
  if (const auto* s = optional_key(j, "pad")) pad = as_string(*s, child(path, "pad"));
  auto vocab = located(child(path, "vocab"), [&] { return Vocabulary(std::move(tokens), stop, pad); });
  const auto l = as_unsigned(require(j, "maxOutputLen", path), child(path, "maxOutputLen"));
  const auto c = as_unsigned(require(j, "contextSize", path), child(path, "contextSize"));
  auto sampler = parse_sampler(require(j, "sampler", path), child(path, "sampler"));

  ConditionalTable table;
  const auto tpath = child(path, "table");
  const auto& rows = as_array(require(j, "table", path), tpath);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto rp = child(tpath, i);
    expect_object(rows[i], rp, {"prefix", "dist"});
    auto prefix = as_strings(require(rows[i], "prefix", rp), child(rp, "prefix"));
    if (table.contains(prefix)) fail(ErrorKind::kInvalidModel, rp, "duplicate prefix [" + render_tokens(prefix) + "]");
    const auto dp = child(rp, "dist");
    const auto& dj = require(rows[i], "dist", rp);
    if (!dj.is_object()) fail(ErrorKind::kSchema, dp, "expected a token -> probability object");
    Distribution<Token> row;
    for (const auto& [tok, value] : dj.items()) row.add(tok, as_probability(value, child(dp, tok)));
    try {
      row.validate();
    } catch (const Error& e) {
      fail(e.kind(), dp, "row [" + render_tokens(prefix) + "]: " + e.detail());
    }
    table.emplace(std::move(prefix), std::move(row));
  }
  return located(path, [&] { return TokenSimulator(std::move(vocab), std::move(table), sampler, l, c); });
}

CheckDefaults parse_check(const json& j, const std::string& path) {
  expect_object(j, path, {"epsilon", "distance", "mode", "samples", "runs", "seed"});
  CheckDefaults c;
  if (const auto* e = optional_key(j, "epsilon")) {
    if (!e->is_number() || !(e->get<double>() > 0.0)) fail(ErrorKind::kSchema, child(path, "epsilon"), "expected a positive number");
    c.epsilon = e->get<double>();
  }
  if (const auto* d = optional_key(j, "distance")) {
    const auto s = as_string(*d, child(path, "distance"));
    if (s == "tvd") c.distance = DistanceKind::kTotalVariation;
    else if (s == "kl") c.distance = DistanceKind::kKLDivergence;
    else fail(ErrorKind::kSchema, child(path, "distance"), "expected 'tvd' or 'kl'");
  }
  if (const auto* m = optional_key(j, "mode")) {
    const auto s = as_string(*m, child(path, "mode"));
    if (s == "exact") c.mode = CheckMode::kExact;
    else if (s == "mc") c.mode = CheckMode::kMonteCarlo;
    else fail(ErrorKind::kSchema, child(path, "mode"), "expected 'exact' or 'mc'");
  }
  if (const auto* s = optional_key(j, "samples")) c.samples = as_unsigned(*s, child(path, "samples"));
  if (const auto* r = optional_key(j, "runs")) c.runs = as_unsigned(*r, child(path, "runs"));
  if (const auto* s = optional_key(j, "seed")) c.seed = as_unsigned(*s, child(path, "seed"));
  if (c.samples < 1) fail(ErrorKind::kSchema, child(path, "samples"), "must be at least 1");
  if (c.runs < 1) fail(ErrorKind::kSchema, child(path, "runs"), "must be at least 1");
  return c;
}

/// Parses with duplicate-key detection; nlohmann silently keeps the last
/// duplicate otherwise.
json parse_strict(std::string_view text) {
  struct Frame {
    bool object;
    std::set<std::string> keys;
    std::string name;
  };
  std::vector<Frame> stack;
  std::string pending;
  auto path_of = [&] {
    std::string p;
    for (const auto& f : stack) {
      if (!f.name.empty()) p += "/" + f.name;
    }
    return p;
  };
  json::parser_callback_t cb = [&](int, json::parse_event_t event, json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start:
      case json::parse_event_t::array_start:
        stack.push_back({event == json::parse_event_t::object_start, {}, pending});
        pending.clear();
        break;
      case json::parse_event_t::key: {
        auto key = parsed.get<std::string>();
        if (!stack.back().keys.insert(key).second) {
          fail(ErrorKind::kSchema, path_of() + "/" + key, "duplicate key");
        }
        pending = key;
        break;
      }
      case json::parse_event_t::object_end:
      case json::parse_event_t::array_end:
        stack.pop_back();
        pending.clear();
        break;
      case json::parse_event_t::value:
        pending.clear();
        break;
    }
    return true;
  };
  try {
    return json::parse(text.begin(), text.end(), cb);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, e.what(), "byte " + std::to_string(e.byte));
  }
}

ordered_json dist_json(const auto& dist, auto&& key_fn) {
  ordered_json o = ordered_json::object();
  for (const auto& [x, p] : dist) o[key_fn(x)] = p;
  return o;
}

ordered_json model_json(const CausalModel& m) {
  auto vars = [](const std::vector<Variable>& vs) {
    ordered_json a = ordered_json::array();
    for (const auto& v : vs) a.push_back({{"name", v.name}, {"range", v.range.values()}});
    return a;
  };
  ordered_json eqs = ordered_json::array();
  for (const auto& eq : m.equations()) {
    ordered_json rows = ordered_json::array();
    for (const auto& [in, out] : eq.table) rows.push_back({{"in", in}, {"out", out}});
    eqs.push_back({{"target", eq.target}, {"inputs", eq.inputs}, {"table", rows}});
  }
  ordered_json allowed = ordered_json::array();
  for (const auto& iv : m.allowed_interventions()) {
    ordered_json o = ordered_json::object();
    for (const auto& [var, value] : iv.assignments) o[var] = value;
    allowed.push_back(o);
  }
  return {{"exogenous", vars(m.exogenous())},
          {"endogenous", vars(m.endogenous())},
          {"equations", eqs},
          {"allowedInterventions", allowed}};
}

std::string real_token(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  return format_real(v);
}

std::string json_string(std::string_view s) { return json(std::string(s)).dump(); }

std::string dist_literal(const Distribution<MappedState>& d) {
  std::string out = "{";
  bool first = true;
  for (const auto& [x, p] : d) {
    out += (first ? "" : ", ") + json_string(outcome_key(x)) + ": " + real_token(p);
    first = false;
  }
  return out + "}";
}

}  // namespace

double parse_probability(std::string_view literal) {
  auto parse_double = [](std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      throw Error(ErrorKind::kSchema, "'" + std::string(s) + "' is not a number");
    }
    return v;
  };
  const auto slash = literal.find('/');
  if (slash == std::string_view::npos) return parse_double(literal);
  const auto num = literal.substr(0, slash);
  const auto den = literal.substr(slash + 1);
  long long a = 0;
  long long b = 0;
  auto ra = std::from_chars(num.data(), num.data() + num.size(), a);
  auto rb = std::from_chars(den.data(), den.data() + den.size(), b);
  if (num.empty() || den.empty() || ra.ec != std::errc() || rb.ec != std::errc() ||
      ra.ptr != num.data() + num.size() || rb.ptr != den.data() + den.size() || a < 0 || b <= 0) {
    throw Error(ErrorKind::kSchema, "'" + std::string(literal) + "' is not a rational a/b with a >= 0, b > 0");
  }
  return static_cast<double>(a) / static_cast<double>(b);
}

std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string outcome_key(const MappedState& state) {
  return state ? join_key(state->values) : std::string(kUnmappedKey);
}

ScenarioDoc load_scenario(std::string_view text) {
  const json root = parse_strict(text);
  const std::string path;
  expect_object(root, path, {"formatVersion", "name", "referent", "observer", "simulator", "check"});
  if (const auto* v = optional_key(root, "formatVersion")) {
    if (!v->is_number_integer() || v->get<int>() != kFormatVersion) {
      fail(ErrorKind::kSchema, "/formatVersion", "unsupported format version; expected 1");
    }
  }
  ScenarioDoc doc;
  doc.name = as_string(require(root, "name", path), "/name");
  if (const auto* r = optional_key(root, "referent")) doc.referent = parse_model(*r, "/referent");
  doc.observer = parse_observer(require(root, "observer", path), "/observer");
  doc.simulator = parse_simulator(require(root, "simulator", path), "/simulator");
  if (const auto* c = optional_key(root, "check")) doc.check = parse_check(*c, "/check");
  return doc;
}

ScenarioDoc load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open scenario file", path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return load_scenario(buf.str());
  } catch (const Error& e) {
    throw e.nested(path.string() + ":");
  }
}

std::string save_scenario(const ScenarioDoc& doc) {
  const auto& obs = doc.observer;
  const auto& model = obs.referent_model();
  auto ctx_key = [](const Context& c) { return join_key(c.values); };

  ordered_json interventions = ordered_json::object();
  for (const auto& [ctx, d] : obs.intervention_dist()) {
    interventions[ctx_key(ctx)] = dist_json(d, [&](const Intervention& iv) { return intervention_key(model, iv); });
  }
  ordered_json encodings = ordered_json::object();
  for (const auto& [key, d] : obs.encoding_dist()) {
    ordered_json prompts = ordered_json::array();
    for (const auto& [prompt, p] : d) prompts.push_back({{"prompt", prompt}, {"p", p}});
    encodings[ctx_key(key.first)][intervention_key(model, key.second)] = prompts;
  }
  ordered_json tau = ordered_json::array();
  for (const auto& e : obs.tau().entries()) {
    ordered_json state = ordered_json::object();
    for (std::size_t i = 0; i < model.endogenous().size(); ++i) state[model.endogenous()[i].name] = e.state.values[i];
    tau.push_back({{"pattern", e.pattern}, {"state", state}});
  }

  const auto& sim = doc.simulator;
  ordered_json sampler = {{"kind", sim.sampler().kind == Sampler::Kind::kGreedy  ? "greedy"
                                   : sim.sampler().kind == Sampler::Kind::kTopK ? "top-k"
                                                                                : "top-p"}};
  if (sim.sampler().kind == Sampler::Kind::kTopK) sampler["k"] = sim.sampler().k;
  if (sim.sampler().kind == Sampler::Kind::kTopP) sampler["p"] = sim.sampler().p;
  ordered_json table = ordered_json::array();
  for (const auto& [prefix, row] : sim.table()) {
    table.push_back({{"prefix", prefix}, {"dist", dist_json(row, [](const Token& t) { return t; })}});
  }

  ordered_json root;
  root["formatVersion"] = kFormatVersion;
  root["name"] = doc.name;
  if (doc.referent) root["referent"] = model_json(*doc.referent);
  root["observer"] = {{"model", model_json(model)},
                      {"contextDist", dist_json(obs.context_dist(), ctx_key)},
                      {"interventionDist", interventions},
                      {"encodingDist", encodings},
                      {"tau", tau}};
  root["simulator"] = {{"vocab", sim.vocab().tokens()},
                       {"stop", sim.vocab().stop()},
                       {"pad", sim.vocab().pad()},
                       {"maxOutputLen", sim.max_output_len()},
                       {"contextSize", sim.context_size()},
                       {"sampler", sampler},
                       {"table", table}};
  root["check"] = {{"epsilon", doc.check.epsilon},
                   {"distance", std::string(to_string(doc.check.distance))},
                   {"mode", doc.check.mode == CheckMode::kExact ? "exact" : "mc"},
                   {"samples", doc.check.samples},
                   {"runs", doc.check.runs},
                   {"seed", doc.check.seed}};
  return root.dump(2) + "\n";
}

std::string report_to_json(const VerificationReport& r, std::string_view scenario_name) {
  std::string out = "{\n";
  if (!scenario_name.empty()) out += "  \"scenario\": " + json_string(scenario_name) + ",\n";
  out += "  \"mode\": " + json_string(to_string(r.mode)) + ",\n";
  out += "  \"distance\": " + json_string(to_string(r.distance_kind)) + ",\n";
  out += "  \"lhs\": " + dist_literal(lift(r.lhs)) + ",\n";
  out += "  \"rhs\": " + dist_literal(r.rhs) + ",\n";
  out += "  \"distanceValue\": " + real_token(r.distance_value) + ",\n";
  out += "  \"epsilon\": " + (r.epsilon ? real_token(*r.epsilon) : std::string("null")) + ",\n";
  out += "  \"verdict\": " + json_string(to_string(r.verdict)) + ",\n";
  out += "  \"unmappedMass\": " + real_token(r.unmapped_mass);
  if (r.mc) {
    const auto& mc = *r.mc;
    out += ",\n  \"mc\": {\n";
    out += "    \"samples\": " + std::to_string(mc.samples) + ",\n";
    out += "    \"runs\": " + std::to_string(mc.runs) + ",\n";
    out += "    \"mean\": " + real_token(mc.mean) + ",\n";
    out += "    \"std\": " + real_token(mc.std_dev) + ",\n";
    out += "    \"seed\": " + std::to_string(mc.seed) + ",\n";
    out += "    \"perRun\": [";
    for (std::size_t i = 0; i < mc.per_run.size(); ++i) {
      out += (i ? ",\n      " : "\n      ");
      out += "{\"distance\": " + real_token(mc.per_run[i].distance) + ", \"rhs\": " + dist_literal(mc.per_run[i].rhs) + "}";
    }
    out += mc.per_run.empty() ? "]\n" : "\n    ]\n";
    out += "  }";
  }
  out += "\n}\n";
  return out;
}

}  // namespace casim
