#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "casim/observer.hpp"
#include "casim/scm.hpp"
#include "casim/token_model.hpp"
#include "casim/verify.hpp"

namespace casim {

inline constexpr int kFormatVersion = 1;

/// Defaults a scenario carries for running its check.
struct CheckDefaults {
  double epsilon = 0.05;
  DistanceKind distance = DistanceKind::kTotalVariation;
  CheckMode mode = CheckMode::kExact;
  std::size_t samples = 10'000;
  std::size_t runs = 10;
  std::uint64_t seed = 0;

  bool operator==(const CheckDefaults&) const = default;
};

struct ScenarioDoc {
  std::string name;
  /// The referent's own model; kept as metadata and never used by checks.
  std::optional<CausalModel> referent;
  Observer observer;
  TokenSimulator simulator;
  CheckDefaults check;

  bool operator==(const ScenarioDoc&) const = default;
};

/// Parses and fully validates a scenario JSON document. Errors carry a
/// document path such as "/simulator/table/3/dist".
ScenarioDoc load_scenario(std::string_view text);
ScenarioDoc load_scenario_file(const std::filesystem::path& path);

/// Canonical JSON rendering; load_scenario(save_scenario(doc)) == doc.
std::string save_scenario(const ScenarioDoc& doc);

/// Parses a probability literal: a decimal ("0.25") or a rational ("1/3").
double parse_probability(std::string_view literal);

/// Reals rendered with 17 significant digits ("inf" for infinity).
std::string format_real(double v);

/// JSON rendering of a report; outcome keys are "|"-joined value tuples and
/// the unmapped outcome is "⊥".
std::string report_to_json(const VerificationReport& report, std::string_view scenario_name = {});

inline constexpr std::string_view kUnmappedKey = "⊥";
std::string outcome_key(const MappedState& state);

// Built-in coin scenarios.

std::vector<std::string> builtin_names();
ScenarioDoc builtin(std::string_view name);
/// Scenario document text for a built-in.
std::string builtin_text(std::string_view name);

/// Named conditional tables of the coin examples: P1, P2.1, P2.2, P3.1,
/// P3.2 and P4.
ConditionalTable coin_table(std::string_view name);
/// The coin observer with either the Heads/Tails map or the four-entry map
/// that also accepts H and T.
Observer coin_observer(bool accept_short_tokens = false);
Vocabulary coin_vocabulary();

}  // namespace casim
