#include "crd/experiments/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "crd/experiments/csv.hpp"

namespace crd {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void fail(const KeyValues::Entry& e, const std::string& key, const std::string& msg) {
  if (e.line > 0) throw ConfigError(fmt::format("{}:{}: {}: {}", e.source, e.line, key, msg));
  throw ConfigError(fmt::format("{}: {}: {}", e.source, key, msg));
}

template <class T>
T parse_number(const KeyValues::Entry& e, const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) fail(e, key, fmt::format("'{}' is not a valid number", text));
  return value;
}

bool parse_bool(const KeyValues::Entry& e, const std::string& key) {
  const std::string& v = e.value;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(e, key, fmt::format("'{}' is not a boolean", v));
}

template <class T>
std::vector<T> parse_list(const KeyValues::Entry& e, const std::string& key) {
  std::vector<T> out;
  for (const auto& item : split(e.value, ',')) out.push_back(parse_number<T>(e, key, item));
  if (out.empty()) fail(e, key, "empty list");
  return out;
}

// "a:b" or "a:b:step" expands to an inclusive integer range.
std::vector<std::size_t> parse_size_list(const KeyValues::Entry& e, const std::string& key) {
  if (e.value.find(':') != std::string::npos) {
    const auto parts = split(e.value, ':');
    if (parts.size() < 2 || parts.size() > 3) fail(e, key, "range must be first:last[:step]");
    const auto first = parse_number<std::size_t>(e, key, parts[0]);
    const auto last = parse_number<std::size_t>(e, key, parts[1]);
    const std::size_t step = parts.size() == 3 ? parse_number<std::size_t>(e, key, parts[2]) : 1;
    if (step == 0 || last < first) fail(e, key, "empty range");
    std::vector<std::size_t> out;
    for (std::size_t v = first; v <= last; v += step) out.push_back(v);
    return out;
  }
  return parse_list<std::size_t>(e, key);
}

std::string join_sizes(const std::vector<std::size_t>& v) {
  return fmt::format("{}", fmt::join(v, ","));
}

std::string join_doubles(const std::vector<double>& v) {
  std::vector<std::string> parts;
  for (double x : v) parts.push_back(fmt::format("{:.17g}", x));
  return fmt::format("{}", fmt::join(parts, ","));
}

}  // namespace

void KeyValues::set(const std::string& key, std::string value, std::string source, int line) {
  entries[key] = Entry{std::move(value), std::move(source), line};
}

KeyValues parse_key_values(const std::string& text, const std::string& source) {
  KeyValues kv;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("{}:{}: expected key = value", source, line));
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) throw ConfigError(fmt::format("{}:{}: empty key", source, line));
    if (kv.has(key)) throw ConfigError(fmt::format("{}:{}: {}: duplicate key", source, line, key));
    kv.set(key, trim(body.substr(eq + 1)), source, line);
  }
  return kv;
}

KeyValues load_key_values(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("{}: cannot read config file", path));
  }
  return parse_key_values(text, path);
}

std::string kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::spectrum:
      return "spectrum";
    case ExperimentKind::singvals:
      return "singvals";
    case ExperimentKind::success:
      return "success";
    case ExperimentKind::phase:
      return "phase";
    case ExperimentKind::mse:
      return "mse";
    case ExperimentKind::verify:
      return "verify";
    case ExperimentKind::delta:
      return "delta";
  }
  return "unknown";
}

ExperimentKind parse_kind(const std::string& name) {
  for (auto k : {ExperimentKind::spectrum, ExperimentKind::singvals, ExperimentKind::success, ExperimentKind::phase,
                 ExperimentKind::mse, ExperimentKind::verify, ExperimentKind::delta}) {
    if (kind_name(k) == name) return k;
  }
  throw ConfigError(fmt::format("unknown experiment kind '{}'", name));
}

SequenceFamily parse_family(const std::string& text) {
  const auto parts = split(text, ':');
  auto number = [&](const std::string& s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError(fmt::format("bad family parameter in '{}'", text));
    return v;
  };
  if (parts.size() == 1 && parts[0] == "rademacher") return SequenceFamily::rademacher();
  if (parts.size() == 2 && parts[0] == "rcs") return SequenceFamily::rcs(number(parts[1]));
  if (parts.size() == 3 && parts[0] == "mrs") {
    const int k = parts[2] == "inf" ? kUnboundedK : number(parts[2]);
    return SequenceFamily::mrs(number(parts[1]), k);
  }
  throw ConfigError(fmt::format("unknown family '{}' (use rademacher, rcs:D or mrs:D:K)", text));
}

std::string family_token(const SequenceFamily& family) {
  switch (family.kind) {
    case FamilyKind::rademacher:
      return "rademacher";
    case FamilyKind::rcs:
      return fmt::format("rcs:{}", family.d);
    case FamilyKind::mrs:
      return family.k == kUnboundedK ? fmt::format("mrs:{}:inf", family.d) : fmt::format("mrs:{}:{}", family.d, family.k);
  }
  return "unknown";
}

Preset parse_preset(const std::string& name) {
  if (name == "rd-uniform") return {name, SequenceFamily::rademacher(), ToneChoice::uniform};
  if (name == "rd-matched") return {name, SequenceFamily::rademacher(), ToneChoice::matched};
  if (name == "crd-uniform") return {name, SequenceFamily::mrs(1, 20), ToneChoice::uniform};
  if (name == "crd-matched") return {name, SequenceFamily::mrs(1, 20), ToneChoice::matched};
  throw ConfigError(fmt::format("unknown preset '{}' (rd-uniform, rd-matched, crd-uniform, crd-matched)", name));
}

std::size_t ExperimentConfig::scaled(std::size_t count) const {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(count) * scale)));
}

std::map<std::string, std::string> ExperimentConfig::echo() const {
  std::map<std::string, std::string> m;
  std::vector<std::string> fams;
  for (const auto& f : families) fams.push_back(family_token(f));
  m["kind"] = kind_name(kind);
  m["seed"] = std::to_string(seed);
  m["scale"] = fmt::format("{:.17g}", scale);
  m["threads"] = std::to_string(threads);
  m["families"] = fmt::format("{}", fmt::join(fams, ","));
  m["mrs_switch_probs"] = join_doubles(mrs_switch_probs);
  m["xi"] = fmt::format("{:.17g}", xi);
  m["W"] = join_sizes(W_list);
  m["R"] = join_sizes(R_list);
  m["S"] = join_sizes(S_list);
  m["sr"] = join_doubles(sr_list);
  m["trials"] = std::to_string(trials);
  m["presets"] = fmt::format("{}", fmt::join(presets, ","));
  m["tones"] = tones == ToneChoice::matched ? "matched" : "uniform";
  m["matched_family"] = family_token(matched_family);
  m["snr_db"] = snr_db ? fmt::format("{:.17g}", *snr_db) : "none";
  m["leakage"] = leakage ? "true" : "false";
  m["leakage_factor"] = std::to_string(leakage_factor);
  m["solver_tol"] = fmt::format("{:.17g}", solver_tol);
  m["solver_max_iter"] = std::to_string(solver_max_iter);
  m["entry_W"] = std::to_string(entry_W);
  m["entry_R"] = std::to_string(entry_R);
  m["entry_trials"] = std::to_string(entry_trials);
  m["gram_W"] = std::to_string(gram_W);
  m["gram_R"] = std::to_string(gram_R);
  m["gram_draws"] = std::to_string(gram_draws);
  m["independence_samples"] = std::to_string(independence_samples);
  return m;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "kind",   "seed",    "scale",          "threads",        "families",   "family",       "d",
      "k",      "mrs_switch_probs", "xi",    "W",              "R",          "S",            "sr",
      "trials", "presets", "preset",         "tones",          "matched_family", "snr_db",   "leakage",
      "leakage_factor", "solver_tol", "solver_max_iter", "entry_W", "entry_R", "entry_trials", "gram_W",
      "gram_R", "gram_draws", "independence_samples"};
  return keys;
}

void ExperimentConfig::validate() const {
  if (trials == 0) throw ConfigError("trials must be >= 1");
  if (!(scale > 0.0)) throw ConfigError("scale must be positive");
  if (families.empty() && presets.empty()) throw ConfigError("no sequence family selected");
  auto check_cell = [](std::size_t S, std::size_t R, std::size_t W) {
    if (W == 0 || R == 0) throw ConfigError("W and R must be positive");
    if (W % R != 0) throw ConfigError(fmt::format("R = {} does not divide W = {}", R, W));
    if (S > R) throw ConfigError(fmt::format("S = {} exceeds R = {}", S, R));
  };
  auto check_family_fits = [this](std::size_t W) {
    for (const auto& f : families) {
      if (f.kind == FamilyKind::rcs && W % static_cast<std::size_t>(f.d + 1) != 0) {
        throw ConfigError(fmt::format("rcs:{} needs d+1 to divide W = {}", f.d, W));
      }
    }
  };
  switch (kind) {
    case ExperimentKind::spectrum:
      for (auto W : W_list) {
        if (W == 0) throw ConfigError("W must be positive");
      }
      break;
    case ExperimentKind::singvals:
    case ExperimentKind::success:
    case ExperimentKind::delta:
      for (auto W : W_list) {
        check_family_fits(W);
        for (auto R : R_list) {
          for (auto S : S_list) check_cell(S, R, W);
        }
      }
      break;
    case ExperimentKind::phase:
    case ExperimentKind::mse: {
      if (sr_list.empty()) throw ConfigError("sr list is empty");
      for (double f : sr_list) {
        if (!(f > 0.0) || f > 1.0) throw ConfigError(fmt::format("S/R fraction {} is outside (0, 1]", f));
      }
      if (presets.empty()) throw ConfigError("no presets selected");
      for (const auto& p : presets) parse_preset(p);
      if (kind == ExperimentKind::mse && !snr_db) throw ConfigError("mse grids need snr_db");
      for (auto W : W_list) {
        for (auto R : R_list) check_cell(0, R, W);
      }
      break;
    }
    case ExperimentKind::verify:
      check_family_fits(entry_W);
      check_family_fits(gram_W);
      check_cell(0, entry_R, entry_W);
      check_cell(0, gram_R, gram_W);
      break;
  }
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  switch (kind) {
    case ExperimentKind::spectrum:
      c.families = {SequenceFamily::mrs(1, 20)};
      c.W_list = {512};
      break;
    case ExperimentKind::singvals:
      c.families = {SequenceFamily::rcs(1), SequenceFamily::mrs(1, 20)};
      c.W_list = {1024};
      c.R_list = {16, 32, 64, 128, 256, 512};
      c.S_list = {10};
      c.trials = 200;
      break;
    case ExperimentKind::success:
      c.families = {SequenceFamily::rademacher(), SequenceFamily::rcs(1), SequenceFamily::mrs(1, 20)};
      c.W_list = {100, 150, 200, 250, 300};
      c.R_list = {50};
      c.S_list.clear();
      for (std::size_t s = 1; s <= 25; ++s) c.S_list.push_back(s);
      c.trials = 100;
      break;
    case ExperimentKind::phase:
    case ExperimentKind::mse:
      // 12 divisors of 480 give the R/W axis; 512 has only powers of two as divisors.
      c.W_list = {480};
      c.R_list = {24, 30, 32, 40, 48, 60, 80, 96, 120, 160, 240, 480};
      for (int i = 1; i <= 12; ++i) c.sr_list.push_back(i / 12.0);
      c.presets = {"rd-uniform", "rd-matched", "crd-uniform", "crd-matched"};
      c.families.clear();
      c.trials = 200;
      // Success is decided by an exact certificate or a 1e-6 error test, so a looser
      // stationarity stop only shortens the failing solves.
      c.solver_tol = 1e-6;
      if (kind == ExperimentKind::mse) c.snr_db = 40.0;
      break;
    case ExperimentKind::verify:
      c.families = {SequenceFamily::rademacher(), SequenceFamily::rcs(1), SequenceFamily::mrs(1, 20)};
      break;
    case ExperimentKind::delta:
      c.families = {SequenceFamily::rademacher(), SequenceFamily::rcs(1), SequenceFamily::mrs(1, 20)};
      c.W_list = {1024};
      c.R_list = {16};
      c.S_list = {10};
      c.trials = 20;
      break;
  }
  return c;
}

ExperimentConfig make_config(ExperimentKind kind, const KeyValues& kv) {
  ExperimentConfig c = default_config(kind);
  const auto& known = config_keys();
  std::optional<SequenceFamily> single;
  int d = -1;
  std::optional<int> k;
  for (const auto& [key, e] : kv.entries) {
    if (std::find(known.begin(), known.end(), key) == known.end()) fail(e, key, "unknown key");
    try {
      if (key == "kind") {
        if (parse_kind(e.value) != kind) fail(e, key, fmt::format("config is for '{}', not '{}'", e.value, kind_name(kind)));
      } else if (key == "seed") {
        c.seed = parse_number<std::uint64_t>(e, key, e.value);
      } else if (key == "scale") {
        c.scale = parse_number<double>(e, key, e.value);
      } else if (key == "threads") {
        c.threads = parse_number<unsigned>(e, key, e.value);
      } else if (key == "families") {
        c.families.clear();
        for (const auto& f : split(e.value, ',')) c.families.push_back(parse_family(f));
      } else if (key == "family") {
        // Bare "rcs" / "mrs" take their parameters from the d and k keys.
        if (e.value == "mrs") {
          single = SequenceFamily::mrs(1, 20);
        } else if (e.value == "rcs") {
          single = SequenceFamily::rcs(1);
        } else {
          single = parse_family(e.value);
        }
      } else if (key == "d") {
        d = parse_number<int>(e, key, e.value);
      } else if (key == "k") {
        k = e.value == "inf" ? kUnboundedK : parse_number<int>(e, key, e.value);
      } else if (key == "mrs_switch_probs") {
        c.mrs_switch_probs = parse_list<double>(e, key);
      } else if (key == "xi") {
        c.xi = parse_number<double>(e, key, e.value);
      } else if (key == "W") {
        c.W_list = parse_size_list(e, key);
      } else if (key == "R") {
        c.R_list = parse_size_list(e, key);
      } else if (key == "S") {
        c.S_list = parse_size_list(e, key);
      } else if (key == "sr") {
        c.sr_list = parse_list<double>(e, key);
      } else if (key == "trials") {
        c.trials = parse_number<std::size_t>(e, key, e.value);
      } else if (key == "presets" || key == "preset") {
        c.presets = split(e.value, ',');
        for (const auto& p : c.presets) parse_preset(p);
      } else if (key == "tones") {
        if (e.value == "uniform") {
          c.tones = ToneChoice::uniform;
        } else if (e.value == "matched") {
          c.tones = ToneChoice::matched;
        } else {
          fail(e, key, "expected uniform or matched");
        }
      } else if (key == "matched_family") {
        c.matched_family = parse_family(e.value);
      } else if (key == "snr_db") {
        if (e.value == "none") {
          c.snr_db.reset();
        } else {
          c.snr_db = parse_number<double>(e, key, e.value);
        }
      } else if (key == "leakage") {
        c.leakage = parse_bool(e, key);
      } else if (key == "leakage_factor") {
        c.leakage_factor = parse_number<std::size_t>(e, key, e.value);
      } else if (key == "solver_tol") {
        c.solver_tol = parse_number<double>(e, key, e.value);
      } else if (key == "solver_max_iter") {
        c.solver_max_iter = parse_number<int>(e, key, e.value);
      } else if (key == "entry_W") {
        c.entry_W = parse_number<std::size_t>(e, key, e.value);
      } else if (key == "entry_R") {
        c.entry_R = parse_number<std::size_t>(e, key, e.value);
      } else if (key == "entry_trials") {
        c.entry_trials = parse_number<std::size_t>(e, key, e.value);
      } else if (key == "gram_W") {
        c.gram_W = parse_number<std::size_t>(e, key, e.value);
      } else if (key == "gram_R") {
        c.gram_R = parse_number<std::size_t>(e, key, e.value);
      } else if (key == "gram_draws") {
        c.gram_draws = parse_number<std::size_t>(e, key, e.value);
      } else if (key == "independence_samples") {
        c.independence_samples = parse_number<std::size_t>(e, key, e.value);
      }
    } catch (const ConfigError& err) {
      const std::string what = err.what();
      if (what.rfind(e.source, 0) == 0) throw;
      fail(e, key, what);
    }
  }
  if (single || d >= 0 || k) {
    SequenceFamily f = single.value_or(c.families.empty() ? SequenceFamily::mrs(1, 20) : c.families.front());
    if (d >= 0) f.d = d;
    if (k) f.k = *k;
    c.families = {f};
  }
  // verify has one (W, R) pair; the generic W and R keys address the entry-bound check.
  if (kind == ExperimentKind::verify) {
    for (const char* key : {"W", "R"}) {
      if (!kv.has(key)) continue;
      const auto& e = kv.entries.at(key);
      const auto& list = key[0] == 'W' ? c.W_list : c.R_list;
      if (list.size() != 1) fail(e, key, "verify takes a single value");
      (key[0] == 'W' ? c.entry_W : c.entry_R) = list.front();
    }
  }
  if (!c.mrs_switch_probs.empty()) {
    for (const auto& f : c.families) {
      if (f.kind == FamilyKind::mrs && f.k != kUnboundedK &&
          c.mrs_switch_probs.size() != static_cast<std::size_t>(f.k - f.d)) {
        throw ConfigError(fmt::format("mrs_switch_probs needs k - d = {} values for {}", f.k - f.d, f.label()));
      }
    }
  }
  c.validate();
  return c;
}

}  // namespace crd
