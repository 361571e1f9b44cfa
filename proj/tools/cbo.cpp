// Command-line front end: tune, grid, random, noise-study, report.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cbo/errors.hpp"
#include "cbo/harness.hpp"

namespace {

using json = nlohmann::json;

enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kEvaluation = 3, kNumerical = 4 };

int fail(ExitCode code, const std::string& kind, const std::string& message, const std::string& field = {}) {
  json j = {{"error", kind}, {"exit_code", int(code)}, {"message", message}};
  if (!field.empty()) j["field"] = field;
  std::cerr << j.dump() << "\n";
  return code;
}

struct CommonFlags {
  std::string config_path;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold, tolerance, time_scale, timeout;
  std::optional<int> budget, n_init, values_per_dim, final_measurements;
  std::optional<std::string> command, full_set, subset;
  std::optional<long> full_words, subset_words;
  bool no_overhead = false;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config_path, "JSON experiment config");
    app->add_option("-o,--output-dir", output_dir, "directory for trace, summary and plot data");
    app->add_option("--seed", seed, "random seed");
    app->add_option("-t,--threshold", threshold, "minimum speed in words per minute");
    app->add_option("--tolerance", tolerance, "feasibility tolerance delta");
    app->add_option("--budget", budget, "evaluation budget");
    app->add_option("--n-init", n_init, "initial random design size");
    app->add_option("--final-measurements", final_measurements, "fresh decodes at the final setting");
    app->add_option("--time-scale", time_scale, "simulator duration multiplier");
    app->add_option("--command", command, "external decoder command template with {d} {s} {n} {sentences}");
    app->add_option("--full-set", full_set, "sentences file for full decodes");
    app->add_option("--subset", subset, "sentences file for speed-only decodes");
    app->add_option("--full-words", full_words, "word count of the full set");
    app->add_option("--subset-words", subset_words, "word count of the subset");
    app->add_option("--timeout", timeout, "external command timeout in seconds");
    app->add_flag("--no-overhead", no_overhead, "record zero BO overhead (byte-identical traces)");
  }

  json load() const {
    json j = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw cbo::ConfigError("config", "cannot open config file " + config_path);
      try {
        j = json::parse(in);
      } catch (const json::parse_error& e) {
        throw cbo::ConfigError("config", std::string("invalid JSON: ") + e.what());
      }
    }
    if (output_dir) j["output_dir"] = *output_dir;
    if (seed) j["seed"] = *seed;
    if (threshold) j["constraint"]["threshold_wpm"] = *threshold;
    if (tolerance) j["constraint"]["tolerance"] = *tolerance;
    if (budget) j["budget"] = *budget;
    if (n_init) j["n_init"] = *n_init;
    if (values_per_dim) j["values_per_dim"] = *values_per_dim;
    if (final_measurements) j["final_measurements"] = *final_measurements;
    if (no_overhead) j["measure_overhead"] = false;
    if (command) {
      auto& e = j["evaluator"];
      if (!e.is_object() || e.value("type", std::string()) != "external") e = json{{"type", "external"}};
      e["command"] = *command;
    }
    if (j.contains("evaluator") && j["evaluator"].is_object() && j["evaluator"].value("type", std::string()) == "external") {
      auto& e = j["evaluator"];
      if (full_set) e["full_set_path"] = *full_set;
      if (subset) e["subset_path"] = *subset;
      if (full_words) e["full_set_words"] = *full_words;
      if (subset_words) e["subset_words"] = *subset_words;
      if (timeout) e["timeout_seconds"] = *timeout;
    } else if (time_scale) {
      if (!j.contains("evaluator")) j["evaluator"] = json{{"type", "simulator"}};
      j["evaluator"]["time_scale"] = *time_scale;
    }
    return j;
  }
};

cbo::RawPoint parse_theta(const std::string& text) {
  cbo::RawPoint x;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      x.push_back(std::stoi(part));
    } catch (const std::exception&) {
      throw cbo::ConfigError("theta", "bad setting '" + text + "', expected comma-separated integers");
    }
  }
  return x;
}

void print_summary(const cbo::ExperimentOutcome& out) {
  std::cout << out.summary.dump(2) << "\n";
  std::cout << "trace:   " << out.trace_path.string() << "\n"
            << "summary: " << out.summary_path.string() << "\n"
            << "plot:    " << out.plot_path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained Bayesian optimization of decoder settings under a speed constraint"};
  app.require_subcommand(1);

  CommonFlags tune_flags, grid_flags, random_flags, noise_flags;
  std::string mode = "bo-s";
  auto* tune = app.add_subcommand("tune", "Bayesian optimization (coupled bo-s or decoupled bo-d)");
  tune_flags.attach(tune);
  tune->add_option("--mode", mode, "bo-s or bo-d")->check(CLI::IsMember({"bo-s", "bo-d"}));

  auto* grid = app.add_subcommand("grid", "grid search baseline");
  grid_flags.attach(grid);
  grid->add_option("--values-per-dim", grid_flags.values_per_dim, "grid values per parameter");

  auto* random = app.add_subcommand("random", "random search baseline");
  random_flags.attach(random);

  auto* noise = app.add_subcommand("noise-study", "repeated decodes at a slow and a fast setting");
  noise_flags.attach(noise);
  int repeats = 100, bins = 20;
  std::string slow = "5,100,100", fast = "0,1,1";
  noise->add_option("--repeats", repeats, "decodes per setting");
  noise->add_option("--bins", bins, "histogram bins");
  noise->add_option("--slow", slow, "slow setting, e.g. 5,100,100");
  noise->add_option("--fast", fast, "fast setting, e.g. 0,1,1");

  auto* report = app.add_subcommand("report", "compare trace files");
  std::vector<std::string> traces;
  double epsilon = 0.1;
  std::string report_out;
  report->add_option("traces", traces, "trace.csv files")->required();
  report->add_option("--epsilon", epsilon, "reach tolerance on the objective");
  report->add_option("-o,--output", report_out, "write comparison.csv and comparison.txt here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail(kConfig, "usage", e.what());
  }

  try {
    if (*tune || *grid || *random) {
      const CommonFlags& flags = *tune ? tune_flags : *grid ? grid_flags : random_flags;
      auto j = flags.load();
      j["method"] = *tune ? mode : *grid ? "grid" : "random";
      print_summary(cbo::run_experiment(cbo::ExperimentConfig::from_json(j)));
    } else if (*noise) {
      const auto config = cbo::ExperimentConfig::from_json(noise_flags.load());
      config.validate();
      auto evaluator = config.make_evaluator();
      const auto result =
          cbo::noise_study(*evaluator, parse_theta(slow), parse_theta(fast), repeats, config.seed, bins);
      std::filesystem::create_directories(config.output_dir);
      std::ofstream(config.output_dir / "noise_study.json") << result.to_json().dump(2) << "\n";
      std::ofstream(config.output_dir / "noise_histogram.csv") << result.histogram_csv();
      std::cout << result.table();
    } else if (*report) {
      std::vector<cbo::Trace> loaded;
      for (const auto& path : traces) loaded.push_back(cbo::read_trace(path));
      std::vector<std::string> labels;
      for (std::size_t i = 0; i < traces.size(); ++i) labels.push_back(loaded[i].meta.method + ":" + traces[i]);
      const auto result = cbo::compare_report(loaded, labels, epsilon);
      std::cout << result.table();
      if (!report_out.empty()) {
        std::filesystem::create_directories(report_out);
        std::ofstream(std::filesystem::path(report_out) / "comparison.csv") << result.plot_csv;
        std::ofstream(std::filesystem::path(report_out) / "comparison.txt") << result.table();
      }
    }
  } catch (const cbo::ConfigError& e) {
    return fail(kConfig, "config", e.what(), e.field());
  } catch (const cbo::BoundsError& e) {
    return fail(kConfig, "bounds", e.what(), e.dimension());
  } catch (const cbo::ParameterError& e) {
    return fail(kConfig, "parameter", e.what());
  } catch (const cbo::EvaluationError& e) {
    return fail(kEvaluation, "evaluation", e.what());
  } catch (const cbo::MeasurementError& e) {
    return fail(kEvaluation, "measurement", e.what());
  } catch (const cbo::NumericalError& e) {
    return fail(kNumerical, "numerical", e.what());
  } catch (const std::exception& e) {
    return fail(kOther, "internal", e.what());
  }
  return kOk;
}
