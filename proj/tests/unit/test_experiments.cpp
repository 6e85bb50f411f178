#include <doctest.h>

#include <filesystem>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "crd/experiments/config.hpp"
#include "crd/experiments/csv.hpp"
#include "crd/experiments/grid.hpp"
#include "crd/experiments/studies.hpp"
#include "crd/experiments/verification.hpp"
#include "crd/sequences/markov_chain.hpp"
#include "crd/sequences/statistics.hpp"

using namespace crd;
namespace fs = std::filesystem;

namespace {

// Splits one CSV record, honouring double-quoted fields.
std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(field);
      field.clear();
    } else {
      field += c;
    }
  }
  out.push_back(field);
  return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) rows.push_back(split_record(line));
  return rows;
}

ExperimentConfig config_from(ExperimentKind kind, const std::string& text) {
  return make_config(kind, parse_key_values(text, "test.cfg"));
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("crd_unit_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("csv escaping and tables") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("mrs(1,20)") == "\"mrs(1,20)\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CsvTable t({"a", "b"});
    t.add_row({"1", "x,y"});
    CHECK(t.rows() == 1);
    CHECK(t.str() == "a,b\n1,\"x,y\"\n");
    CHECK_THROWS(t.add_row({"only one"}));
    CHECK(split_record("1,\"x,y\"") == std::vector<std::string>{"1", "x,y"});
  }

  TEST_CASE("atomic writes create directories and leave no temporary") {
    const fs::path dir = scratch_dir("atomic");
    const fs::path file = dir / "nested" / "out.csv";
    write_file_atomic(file, "a,b\n1,2\n");
    CHECK(read_file(file) == "a,b\n1,2\n");
    write_file_atomic(file, "replaced\n");
    CHECK(read_file(file) == "replaced\n");
    for (const auto& e : fs::directory_iterator(dir / "nested")) CHECK(e.path().extension() != ".tmp");
    CHECK_THROWS(read_file(dir / "missing.csv"));
    fs::remove_all(dir);
  }

  TEST_CASE("key-value parsing reports the offending line") {
    const auto kv = parse_key_values("# comment\n\nseed = 5  # trailing\nW=64\n", "a.cfg");
    CHECK(kv.entries.at("seed").value == "5");
    CHECK(kv.entries.at("seed").line == 3);
    CHECK(kv.entries.at("W").value == "64");
    auto message = [](const std::string& text) {
      try {
        parse_key_values(text, "a.cfg");
      } catch (const ConfigError& e) {
        return std::string(e.what());
      }
      return std::string();
    };
    CHECK(message("seed = 1\nnonsense\n").find("a.cfg:2") != std::string::npos);
    CHECK(message("seed = 1\nseed = 2\n").find("a.cfg:2: seed: duplicate") != std::string::npos);
    CHECK(message("= 3\n").find("a.cfg:1") != std::string::npos);
    CHECK_THROWS_AS(load_key_values("/nonexistent/dir/x.cfg"), ConfigError);
  }

  TEST_CASE("config resolution: keys, ranges, families and errors") {
    const auto c = config_from(ExperimentKind::success, "seed = 9\nW = 100:300:50\nR = 50\nS = 1:4\nfamilies = rademacher, rcs:1, mrs:1:inf\n");
    CHECK(c.seed == 9);
    CHECK(c.W_list == std::vector<std::size_t>{100, 150, 200, 250, 300});
    CHECK(c.S_list == std::vector<std::size_t>{1, 2, 3, 4});
    REQUIRE(c.families.size() == 3);
    CHECK(c.families[1] == SequenceFamily::rcs(1));
    CHECK(c.families[2].k == kUnboundedK);
    CHECK(family_token(c.families[2]) == "mrs:1:inf");
    CHECK(parse_family(family_token(SequenceFamily::mrs(2, 9))) == SequenceFamily::mrs(2, 9));
    CHECK_THROWS_AS(parse_family("mrs:x:3"), ConfigError);
    CHECK_THROWS_AS(parse_family("gold"), ConfigError);

    const auto single = config_from(ExperimentKind::spectrum, "family = mrs\nd = 2\nk = 7\n");
    REQUIRE(single.families.size() == 1);
    CHECK(single.families[0] == SequenceFamily::mrs(2, 7));

    auto error = [](ExperimentKind kind, const std::string& text) {
      try {
        config_from(kind, text).validate();
      } catch (const ConfigError& e) {
        return std::string(e.what());
      }
      return std::string();
    };
    CHECK(error(ExperimentKind::success, "seed = 1\nbogus = 3\n").find("test.cfg:2: bogus: unknown key") != std::string::npos);
    CHECK(error(ExperimentKind::success, "trials = many\n").find("test.cfg:1: trials") != std::string::npos);
    CHECK(error(ExperimentKind::success, "W = 100\nR = 30\n").find("does not divide") != std::string::npos);
    CHECK(error(ExperimentKind::success, "W = 100\nR = 10\nS = 11\n").find("exceeds") != std::string::npos);
    CHECK(error(ExperimentKind::success, "kind = phase\n").find("not 'success'") != std::string::npos);
    CHECK(error(ExperimentKind::phase, "preset = crd-fancy\n").find("unknown preset") != std::string::npos);
    CHECK(error(ExperimentKind::success, "W = 9:3\n").find("empty range") != std::string::npos);
    CHECK(error(ExperimentKind::success, "families = rcs:2\nW = 100\nR = 10\nS = 2\n").find("rcs:2") != std::string::npos);
  }

  TEST_CASE("defaults validate for every kind and echo every setting") {
    for (auto kind : {ExperimentKind::spectrum, ExperimentKind::singvals, ExperimentKind::success, ExperimentKind::phase,
                      ExperimentKind::mse, ExperimentKind::verify, ExperimentKind::delta}) {
      CAPTURE(kind_name(kind));
      const auto c = default_config(kind);
      CHECK_NOTHROW(c.validate());
      CHECK(parse_kind(kind_name(kind)) == kind);
      CHECK(c.echo().count("seed") == 1);
    }
    CHECK_THROWS_AS(parse_kind("nope"), ConfigError);
    const auto phase = default_config(ExperimentKind::phase);
    CHECK(phase.R_list.size() == 12);
    CHECK(phase.sr_list.size() == 12);
    for (auto R : phase.R_list) CHECK(480 % R == 0);
    CHECK(parse_preset("crd-matched").family == SequenceFamily::mrs(1, 20));
    CHECK(parse_preset("rd-uniform").tones == ToneChoice::uniform);
    ExperimentConfig scaled = default_config(ExperimentKind::success);
    scaled.scale = 0.001;
    CHECK(scaled.scaled(100) == 1);
    scaled.scale = 0.5;
    CHECK(scaled.scaled(100) == 50);
  }

  TEST_CASE("sparsity from S/R fractions") {
    CHECK(sparsity_for(1.0 / 12.0, 24) == 2);
    CHECK(sparsity_for(0.25, 24) == 6);
    CHECK(sparsity_for(7.0 / 12.0, 48) == 28);
    CHECK(sparsity_for(1.0 / 12.0, 30) == 3);
    CHECK(sparsity_for(1.0, 480) == 480);
  }

  TEST_CASE("grid CSV layout and lookups") {
    ExperimentGrid g;
    g.kind = "demo";
    g.key_names = {"family", "W"};
    g.value_names = {"x", "y"};
    g.cells.push_back({{"mrs(1,20)", "64"}, 10, 77, {0.1, 1.0 / 3.0}});
    CHECK(g.csv() == "family,W,trials,seed,x,y\n\"mrs(1,20)\",64,10,77,0.10000000000000001,0.33333333333333331\n");
    CHECK(g.value_index("y") == 1);
    CHECK(g.value(g.find({"mrs(1,20)", "64"}), "x") == 0.1);
    CHECK_THROWS(g.find({"rcs(1)", "64"}));
    CHECK_THROWS(g.value_index("z"));
  }

  TEST_CASE("spectrum study reproduces the analytic statistics") {
    auto c = config_from(ExperimentKind::spectrum, "families = rademacher, rcs:1, mrs:1:20\nW = 64\n");
    const auto g = run_spectrum(c);
    CHECK(g.cells.size() == 3 * 64);
    const auto chain = MarkovChain::maxentropic(1, 20);
    const auto st = compute_stats(SequenceFamily::mrs(1, 20), 64, &chain);
    for (std::size_t w = 0; w < 64; w += 9) {
      const auto& cell = g.find({"mrs:1:20", "64", std::to_string(w)});
      CHECK(g.value(cell, "reduced_spectrum") == doctest::Approx(st.reduced_spectrum[w]).epsilon(1e-14));
    }
    CHECK(g.notes.count("mrs:1:20.W64.max_reduced") == 1);
    CHECK(g.extra_tables.count("spectrum_autocorr") == 1);
  }

  TEST_CASE("monte-carlo studies are reproducible and thread-count independent") {
    auto c = config_from(ExperimentKind::success, "families = rademacher, mrs:1:4\nW = 64\nR = 16\nS = 2,6\ntrials = 6\nseed = 3\n");
    c.threads = 1;
    const auto a = run_success_probability(c);
    c.threads = 3;
    const auto b = run_success_probability(c);
    CHECK(a.csv() == b.csv());
    CHECK(a.cells.size() == 4);
    c.seed = 4;
    CHECK(run_success_probability(c).csv() != a.csv());
    const double easy = a.value(a.find({"rademacher", "64", "16", "2"}), "success_rate");
    CHECK(easy == 1.0);
  }

  TEST_CASE("lattice studies cover the preset grid") {
    auto c = default_config(ExperimentKind::phase);
    c.R_list = {240, 480};
    c.sr_list = {0.05, 0.1};
    c.presets = {"rd-uniform", "crd-matched"};
    c.trials = 2;
    const auto g = run_phase_transition(c);
    CHECK(g.cells.size() == 8);
    CHECK(g.value(g.find({"rd-uniform", "480", "480", "0.100000", "48"}), "success_rate") == 1.0);

    auto m = default_config(ExperimentKind::mse);
    m.R_list = {240};
    m.sr_list = {0.25};
    m.presets = {"rd-uniform"};
    m.trials = 2;
    const auto plain = run_mse_grid(m);
    CHECK(plain.cells.front().keys.back() == "60");
    CHECK(plain.value(plain.cells.front(), "mse_db") < plain.value(plain.cells.front(), "baseline_db"));
    m.leakage = true;
    const auto leaky = run_mse_grid(m);
    CHECK(leaky.cells.front().keys.back() == "4");
  }

  TEST_CASE("verification checks on small cases") {
    const auto rad = SequenceSource::make(SequenceFamily::rademacher());
    const auto lem = entry_bound_check(rad, 128, 16, 1, 50, RngStream(1));
    CHECK(lem.threshold == doctest::Approx(std::sqrt(10.0 * std::log(128.0) / 16.0)));
    CHECK(lem.violation_fraction <= 0.1);
    CHECK(lem.max_entry_mean <= lem.max_entry_max);
    const auto ind = independence_check(rad, 1, 20000, RngStream(2));
    CHECK(ind.max_deviation() < 0.03);
    const auto rcs = SequenceSource::make(SequenceFamily::rcs(1));
    const auto dependent = independence_check(rcs, 1, 20000, RngStream(3));
    CHECK(dependent.max_deviation() > 0.1);
    const auto delta = compute_delta(CorrelationModel::rcs(1), 16, 4);
    const auto gram = gram_expectation_check(rcs, delta, 400, RngStream(4));
    CHECK(gram.draws == 400);
    CHECK(gram.tolerance == doctest::Approx(0.25));
    CHECK(gram.max_deviation < gram.tolerance);
    CHECK(gram.max_deviation_from_identity > 0.5);
  }

  TEST_CASE("outputs: csv, manifest, plot script and extra tables") {
    auto c = config_from(ExperimentKind::spectrum, "families = mrs:1:20\nW = 32\nseed = 12\n");
    const auto g = run_experiment(c);
    const fs::path dir = scratch_dir("outputs");
    const auto files = write_outputs(g, dir, 0.25);
    REQUIRE(fs::exists(files.csv));
    REQUIRE(fs::exists(files.manifest));
    REQUIRE(fs::exists(files.plot_script));
    CHECK(fs::exists(dir / "spectrum_autocorr.csv"));
    const auto rows = parse_csv(read_file(files.csv));
    REQUIRE(rows.size() == 33);
    for (const auto& r : rows) CHECK(r.size() == rows.front().size());
    CHECK(rows[1][0] == "mrs:1:20");
    const auto manifest = nlohmann::json::parse(read_file(files.manifest));
    CHECK(manifest["kind"] == "spectrum");
    CHECK(manifest["seed"] == 12);
    CHECK(manifest["version"] == kVersion);
    CHECK(manifest["config"]["W"] == "32");
    CHECK(manifest["wall_seconds"] == 0.25);
    CHECK(manifest["columns"]["values"].size() == g.value_names.size());
    const std::string script = read_file(files.plot_script);
    CHECK(script.find("csv.DictReader") != std::string::npos);
    CHECK(script.find("reduced_spectrum") != std::string::npos);
    for (const char* kind : {"singvals", "success", "phase", "mse", "verify", "delta"}) {
      CHECK(plot_script(kind).find("savefig") != std::string::npos);
    }
    fs::remove_all(dir);
  }
}
