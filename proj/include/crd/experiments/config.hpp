#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "crd/sequences/sequence.hpp"

namespace crd {

/// Error tied to a config source location ("file:line: key: message").
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered key=value pairs with the line each came from (0 for command-line overrides).
struct KeyValues {
  struct Entry {
    std::string value;
    std::string source;
    int line = 0;
  };
  std::map<std::string, Entry> entries;

  void set(const std::string& key, std::string value, std::string source = "command line", int line = 0);
  [[nodiscard]] bool has(const std::string& key) const { return entries.count(key) != 0; }
};

/// Parses "key = value" lines; '#' starts a comment, blank lines are ignored.
KeyValues parse_key_values(const std::string& text, const std::string& source);
KeyValues load_key_values(const std::string& path);

enum class ExperimentKind { spectrum, singvals, success, phase, mse, verify, delta };

std::string kind_name(ExperimentKind kind);
ExperimentKind parse_kind(const std::string& name);

/// "rademacher", "rcs:D" or "mrs:D:K" (K may be "inf").
SequenceFamily parse_family(const std::string& text);
std::string family_token(const SequenceFamily& family);

enum class ToneChoice { uniform, matched };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::spectrum;
  std::uint64_t seed = 1;
  double scale = 1.0;   ///< multiplies every trial count
  unsigned threads = 0;  ///< 0 = hardware concurrency

  std::vector<SequenceFamily> families{SequenceFamily::mrs(1, 20)};
  /// Optional switch probabilities for MRS chains (k - d values); empty = maxentropic.
  std::vector<double> mrs_switch_probs;
  double xi = 1e-3;

  std::vector<std::size_t> W_list{512};
  std::vector<std::size_t> R_list{64};
  std::vector<std::size_t> S_list{10};
  /// Phase/MSE grids: S/R fractions (S = ceil(frac * R)).
  std::vector<double> sr_list;
  std::size_t trials = 200;

  /// Phase/MSE presets, e.g. "rd-uniform", "crd-matched"; each names a family and a prior.
  std::vector<std::string> presets;
  ToneChoice tones = ToneChoice::uniform;
  /// Family whose spectrum defines the matched prior.
  SequenceFamily matched_family = SequenceFamily::mrs(1, 20);
  std::optional<double> snr_db;
  bool leakage = false;
  std::size_t leakage_factor = 16;

  double solver_tol = 1e-8;
  int solver_max_iter = 10000;

  // Verification sizes.
  std::size_t entry_W = 512;
  std::size_t entry_R = 64;
  std::size_t entry_trials = 1000;
  std::size_t gram_W = 64;
  std::size_t gram_R = 8;
  std::size_t gram_draws = 10000;
  std::size_t independence_samples = 100000;

  /// Echo of every resolved setting, in key order, for manifests.
  [[nodiscard]] std::map<std::string, std::string> echo() const;
  /// Trial count after the scale multiplier (at least 1).
  [[nodiscard]] std::size_t scaled(std::size_t count) const;
  /// Throws ConfigError when any grid cell violates S <= R <= W, R | W or trials >= 1.
  void validate() const;
};

/// Desk-scale defaults for a kind.
ExperimentConfig default_config(ExperimentKind kind);

/// Resolves key/value pairs on top of the defaults for `kind` (the "kind" key, if present,
/// must agree). Unknown keys and malformed values throw ConfigError naming the line.
ExperimentConfig make_config(ExperimentKind kind, const KeyValues& kv);

/// Every key make_config understands.
const std::vector<std::string>& config_keys();

/// Phase/MSE preset: "rd-uniform" | "rd-matched" | "crd-uniform" | "crd-matched".
struct Preset {
  std::string name;
  SequenceFamily family;
  ToneChoice tones;
};
Preset parse_preset(const std::string& name);

}  // namespace crd
