#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "casim/random.hpp"
#include "casim/scenario_io.hpp"
#include "casim/verify.hpp"
#include "json.hpp"

namespace casim::cli {

namespace {

struct Options {
  std::string scenario;
  std::string mode;
  std::optional<double> epsilon;
  std::string distance;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> runs;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::size_t count = 10;
  std::string output = "text";
  std::string out_path;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ScenarioDoc resolve_scenario(const std::string& ref) {
  const auto names = builtin_names();
  if (std::find(names.begin(), names.end(), ref) != names.end()) return builtin(ref);
  if (!std::filesystem::exists(ref)) {
    std::string known;
    for (const auto& n : names) known += (known.empty() ? "" : ", ") + n;
    throw Error(ErrorKind::kIo, "'" + ref + "' is neither a scenario file nor a builtin (" + known + ")");
  }
  return load_scenario_file(ref);
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("CASIM_SEED");
  if (!raw || !*raw) return std::nullopt;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(raw, &used);
    if (used != std::string(raw).size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("CASIM_SEED must be a non-negative integer, got '") + raw + "'");
  }
}

std::string label(const CausalModel& model, const MappedState& state) {
  return state ? describe(model, *state) : std::string(kUnmappedKey);
}

// Display width for UTF-8 labels; counts code points, not bytes.
std::size_t width(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
}

std::string pad_right(const std::string& s, std::size_t w) {
  const auto n = width(s);
  return n >= w ? s + " " : s + std::string(w - n, ' ');
}

std::string text_report(const VerificationReport& r, const ScenarioDoc& doc) {
  const auto& model = doc.observer.referent_model();
  std::ostringstream out;
  out << "scenario   " << doc.name << "\n";
  out << "mode       " << to_string(r.mode) << "\n";
  out << "distance   " << to_string(r.distance_kind) << "\n";
  out << "epsilon    " << (r.epsilon ? format_real(*r.epsilon) : std::string("none (exact equality)")) << "\n\n";

  std::vector<MappedState> outcomes;
  for (const auto& [x, _] : lift(r.lhs)) outcomes.push_back(x);
  for (const auto& [x, _] : r.rhs) {
    if (std::find(outcomes.begin(), outcomes.end(), x) == outcomes.end()) outcomes.push_back(x);
  }
  std::sort(outcomes.begin(), outcomes.end());
  std::size_t w = width("outcome");
  for (const auto& x : outcomes) w = std::max(w, width(label(model, x)));
  w += 2;
  const auto lifted = lift(r.lhs);
  out << pad_right("outcome", w) << pad_right("referent", 24) << "simulator\n";
  for (const auto& x : outcomes) {
    out << pad_right(label(model, x), w) << pad_right(format_real(lifted[x]), 24) << format_real(r.rhs[x]) << "\n";
  }
  out << "\n";
  out << "distance   " << format_real(r.distance_value) << "\n";
  out << "unmapped   " << format_real(r.unmapped_mass) << "\n";
  if (r.mc) {
    out << "mc         mean " << format_real(r.mc->mean) << " ± " << format_real(r.mc->std_dev) << " over "
        << r.mc->runs << " runs x " << r.mc->samples << " samples (seed " << r.mc->seed << ")\n";
  }
  out << "verdict    " << to_string(r.verdict) << "\n";
  return out.str();
}

void emit(const std::string& text, const Options& opts, std::ostream& out) {
  if (opts.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(opts.out_path, std::ios::binary);
  if (!file) throw Error(ErrorKind::kIo, "cannot write report", opts.out_path);
  file << text;
}

int do_verify(const Options& opts, std::ostream& out) {
  const auto doc = resolve_scenario(opts.scenario);
  const auto mode = opts.mode.empty() ? doc.check.mode : opts.mode == "mc" ? CheckMode::kMonteCarlo : CheckMode::kExact;
  const auto distance = opts.distance.empty() ? doc.check.distance
                        : opts.distance == "kl" ? DistanceKind::kKLDivergence
                                                : DistanceKind::kTotalVariation;

  VerificationReport report;
  if (mode == CheckMode::kExact) {
    if (opts.samples || opts.runs || opts.seed) {
      throw UsageError("--samples, --runs and --seed only apply to --mode mc");
    }
    report = opts.epsilon ? check_approx(doc.observer, doc.simulator, *opts.epsilon, distance)
                          : check_exact(doc.observer, doc.simulator, {}, distance);
  } else {
    McCheckOptions mc;
    mc.samples = opts.samples.value_or(doc.check.samples);
    mc.runs = opts.runs.value_or(doc.check.runs);
    mc.seed = opts.seed ? *opts.seed : env_seed().value_or(doc.check.seed);
    mc.threads = opts.threads;
    report = mc_check(doc.observer, doc.simulator, opts.epsilon.value_or(doc.check.epsilon), mc, distance);
  }

  emit(opts.output == "json" ? report_to_json(report, doc.name) : text_report(report, doc), opts, out);
  return report.verdict == Verdict::kSimulates ? kSimulates : kFails;
}

int do_sample(const Options& opts, std::ostream& out) {
  const auto doc = resolve_scenario(opts.scenario);
  const auto& sim = doc.simulator;
  const auto prompts = joint_input_distribution(prompt_distribution(doc.observer), sim).prompts;
  const std::uint64_t seed = opts.seed ? *opts.seed : env_seed().value_or(doc.check.seed);
  const auto& model = doc.observer.referent_model();

  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  std::ostringstream text;
  for (std::size_t i = 0; i < opts.count; ++i) {
    const auto draws = trial_randoms(seed, i, sim.max_output_len());
    const auto& prompt = select_prompt(prompts, draws[0]);
    const auto output = generate(sim, prompt, std::span<const double>(draws).subspan(1));
    const auto image = doc.observer.tau().lookup(depad(output, sim.vocab()));
    if (opts.output == "json") {
      rows.push_back({{"trial", i},
                      {"seed", seed},
                      {"prompt", prompt},
                      {"output", output.tokens},
                      {"tau", outcome_key(image)}});
    } else {
      text << "#" << i << "  [" << render_tokens(prompt) << "] -> ["
           << render_tokens(output.tokens) << "]  tau: " << label(model, image) << "\n";
    }
  }
  emit(opts.output == "json" ? rows.dump(2) + "\n" : "seed " + std::to_string(seed) + "\n" + text.str(), opts, out);
  return kSimulates;
}

std::string text_summary(const ScenarioDoc& doc) {
  const auto& obs = doc.observer;
  const auto& model = obs.referent_model();
  const auto& sim = doc.simulator;
  std::ostringstream out;
  out << "scenario " << doc.name << "\n\nreferent model (observer)\n";
  for (const auto& v : model.exogenous()) out << "  exogenous  " << v.name << " in {" << join_key(v.range.values()) << "}\n";
  for (const auto& v : model.endogenous()) out << "  endogenous " << v.name << " in {" << join_key(v.range.values()) << "}\n";
  for (const auto& eq : model.equations()) {
    out << "  " << eq.target << " := f(" << join_key(eq.inputs) << ")\n";
    for (const auto& [in, o] : eq.table) out << "    (" << join_key(in) << ") -> " << o << "\n";
  }
  out << "\ncontexts\n";
  for (const auto& [c, p] : obs.context_dist()) out << "  " << pad_right(join_key(c.values), 24) << format_real(p) << "\n";
  out << "\nprompts (marginal)\n";
  for (const auto& [prompt, p] : prompt_distribution(obs)) {
    out << "  " << pad_right("[" + render_tokens(prompt) + "]", 24) << format_real(p) << "\n";
  }
  out << "\ntau\n";
  for (const auto& e : obs.tau().entries()) {
    out << "  [" << render_tokens(e.pattern) << "] -> " << describe(model, e.state) << "\n";
  }
  out << "\nsimulator\n";
  out << "  sampler       " << sim.sampler().name() << "\n";
  out << "  output length " << sim.max_output_len() << "\n";
  out << "  context size  " << sim.context_size() << "\n";
  out << "  vocabulary    " << render_tokens(sim.vocab().tokens()) << "\n";
  for (const auto& [prefix, row] : sim.table()) {
    out << "  [" << render_tokens(prefix) << "]";
    for (const auto& [t, p] : row) out << "  " << t << " " << format_real(p);
    out << "\n";
  }
  return out.str();
}

int do_show(const Options& opts, std::ostream& out) {
  const auto doc = resolve_scenario(opts.scenario);
  emit(opts.output == "json" ? save_scenario(doc) : text_summary(doc), opts, out);
  return kSimulates;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Checks whether a token simulator is a causal abstractive simulation of an observer's referent model",
               "casim"};
  app.require_subcommand(1);
  Options opts;

  auto add_output = [&](CLI::App* cmd) {
    cmd->add_option("--output", opts.output, "Report format")->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--out-path", opts.out_path, "Write the report to this file instead of stdout");
  };

  auto* verify = app.add_subcommand("verify", "Run the simulation check on a scenario");
  verify->add_option("scenario", opts.scenario, "Scenario file or builtin name")->required();
  verify->add_option("--mode", opts.mode, "exact enumeration or Monte Carlo")->check(CLI::IsMember({"exact", "mc"}));
  verify->add_option("--epsilon", opts.epsilon, "Approximation threshold (mc default 0.05)")
      ->check(CLI::PositiveNumber);
  verify->add_option("--distance", opts.distance, "Distance between the two sides")
      ->check(CLI::IsMember({"tvd", "kl"}));
  verify->add_option("--samples", opts.samples, "Monte Carlo samples per run")->check(CLI::PositiveNumber);
  verify->add_option("--runs", opts.runs, "Independent Monte Carlo runs")->check(CLI::PositiveNumber);
  verify->add_option("--seed", opts.seed, "Base seed (falls back to CASIM_SEED)");
  verify->add_option("--threads", opts.threads, "Worker threads per Monte Carlo run")->check(CLI::PositiveNumber);
  add_output(verify);

  auto* sample = app.add_subcommand("sample", "Print generated transcripts with their tau images");
  sample->add_option("scenario", opts.scenario, "Scenario file or builtin name")->required();
  sample->add_option("-n,--count", opts.count, "Number of transcripts")->check(CLI::PositiveNumber);
  sample->add_option("--seed", opts.seed, "Base seed (falls back to CASIM_SEED)");
  add_output(sample);

  auto* list = app.add_subcommand("list-builtins", "List the built-in coin scenarios");

  auto* show = app.add_subcommand("show", "Pretty-print a validated scenario");
  show->add_option("scenario", opts.scenario, "Scenario file or builtin name")->required();
  add_output(show);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "casim: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (verify->parsed()) return do_verify(opts, out);
    if (sample->parsed()) return do_sample(opts, out);
    if (show->parsed()) return do_show(opts, out);
    if (list->parsed()) {
      for (const auto& name : builtin_names()) out << name << "\n";
      return kSimulates;
    }
  } catch (const UsageError& e) {
    err << "casim: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    err << "casim: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace casim::cli
