#include "cbo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "cbo/baselines.hpp"
#include "cbo/errors.hpp"

namespace cbo {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string method_name(Method m) {
  switch (m) {
    case Method::BoStandard:
      return "bo-s";
    case Method::BoDecoupled:
      return "bo-d";
    case Method::Grid:
      return "grid";
    case Method::Random:
      return "random";
  }
  return "bo-s";
}

Method method_from_name(const std::string& name) {
  if (name == "bo-s") return Method::BoStandard;
  if (name == "bo-d") return Method::BoDecoupled;
  if (name == "grid") return Method::Grid;
  if (name == "random") return Method::Random;
  throw ConfigError("method", "unknown method '" + name + "' (expected bo-s, bo-d, grid or random)");
}

namespace {

template <class T>
T field(const json& j, const std::string& key, const std::string& path) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path, "field '" + path + "': " + e.what());
  }
}

template <class T>
void maybe(const json& j, const std::string& key, const std::string& path, T& out) {
  if (j.contains(key)) out = field<T>(j, key, path);
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& prefix) {
  if (!j.is_object()) throw ConfigError(prefix.empty() ? "config" : prefix, "expected a JSON object");
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ConfigError(prefix + key, "unknown field '" + prefix + key + "'");
}

SimulatorConfig parse_simulator(const json& j) {
  reject_unknown(j, {"type", "W0", "alpha", "beta", "gamma", "sigma_log", "B_star", "A_d", "A_s", "A_n", "tau_d",
                     "tau_s", "tau_n", "sigma_B", "full_set_words", "subset_words", "time_scale"},
                 "evaluator.");
  SimulatorConfig c;
  bool gamma_given = j.contains("gamma");
  for (auto [key, ptr] : std::initializer_list<std::pair<const char*, double*>>{
           {"W0", &c.W0}, {"alpha", &c.alpha}, {"beta", &c.beta}, {"gamma", &c.gamma}, {"sigma_log", &c.sigma_log},
           {"B_star", &c.B_star}, {"A_d", &c.A_d}, {"A_s", &c.A_s}, {"A_n", &c.A_n}, {"tau_d", &c.tau_d},
           {"tau_s", &c.tau_s}, {"tau_n", &c.tau_n}, {"sigma_B", &c.sigma_B}, {"time_scale", &c.time_scale}})
    maybe(j, key, std::string("evaluator.") + key, *ptr);
  maybe(j, "full_set_words", "evaluator.full_set_words", c.full_set_words);
  maybe(j, "subset_words", "evaluator.subset_words", c.subset_words);
  if (!gamma_given) c.gamma = SimulatorConfig::anchored_gamma(c.W0, c.alpha, c.beta);
  return c;
}

ExternalCommandSpec parse_external(const json& j) {
  reject_unknown(j, {"type", "command", "full_set_path", "subset_path", "full_set_words", "subset_words",
                     "timeout_seconds"},
                 "evaluator.");
  ExternalCommandSpec s;
  s.command_template = field<std::string>(j, "command", "evaluator.command");
  maybe(j, "full_set_path", "evaluator.full_set_path", s.full_set_path);
  maybe(j, "subset_path", "evaluator.subset_path", s.subset_path);
  s.full_set_words = field<long>(j, "full_set_words", "evaluator.full_set_words");
  s.subset_words = field<long>(j, "subset_words", "evaluator.subset_words");
  maybe(j, "timeout_seconds", "evaluator.timeout_seconds", s.timeout_seconds);
  return s;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  reject_unknown(j, {"method", "search_space", "constraint", "budget", "n_init", "values_per_dim",
                     "max_consecutive_constraint", "seed", "evaluator", "output_dir", "measure_overhead",
                     "final_measurements"},
                 "");
  ExperimentConfig c;
  if (j.contains("method")) c.method = method_from_name(field<std::string>(j, "method", "method"));
  if (c.method == Method::BoDecoupled) {
    c.constraint.tolerance = 0.05;
    c.budget = 250;
  }
  if (j.contains("search_space")) {
    const auto& arr = j.at("search_space");
    if (!arr.is_array()) throw ConfigError("search_space", "search_space must be an array");
    c.params.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = "search_space[" + std::to_string(i) + "]";
      reject_unknown(arr[i], {"name", "lower", "upper", "scale"}, path + ".");
      ParamSpec p;
      p.name = field<std::string>(arr[i], "name", path + ".name");
      p.lower = field<int>(arr[i], "lower", path + ".lower");
      p.upper = field<int>(arr[i], "upper", path + ".upper");
      const auto scale = arr[i].value("scale", std::string("linear"));
      if (scale != "linear" && scale != "log") throw ConfigError(path + ".scale", "scale must be linear or log");
      p.scale = scale == "log" ? Scale::Log : Scale::Linear;
      c.params.push_back(p);
    }
  }
  if (j.contains("constraint")) {
    const auto& cj = j.at("constraint");
    reject_unknown(cj, {"threshold_wpm", "tolerance"}, "constraint.");
    maybe(cj, "threshold_wpm", "constraint.threshold_wpm", c.constraint.threshold_wpm);
    maybe(cj, "tolerance", "constraint.tolerance", c.constraint.tolerance);
  }
  maybe(j, "budget", "budget", c.budget);
  maybe(j, "n_init", "n_init", c.n_init);
  maybe(j, "values_per_dim", "values_per_dim", c.values_per_dim);
  maybe(j, "max_consecutive_constraint", "max_consecutive_constraint", c.max_consecutive_constraint);
  maybe(j, "seed", "seed", c.seed);
  maybe(j, "measure_overhead", "measure_overhead", c.measure_overhead);
  maybe(j, "final_measurements", "final_measurements", c.final_measurements);
  if (j.contains("output_dir")) c.output_dir = field<std::string>(j, "output_dir", "output_dir");
  if (j.contains("evaluator")) {
    const auto& ej = j.at("evaluator");
    const auto type = ej.is_object() ? ej.value("type", std::string("simulator")) : std::string();
    if (type == "simulator") {
      c.simulator = parse_simulator(ej);
      c.external.reset();
    } else if (type == "external") {
      c.external = parse_external(ej);
      c.simulator.reset();
    } else {
      throw ConfigError("evaluator.type", "evaluator.type must be simulator or external");
    }
  }
  return c;
}

ojson ExperimentConfig::to_json() const {
  ojson j;
  j["method"] = method_name(method);
  auto space = ojson::array();
  for (const auto& p : params)
    space.push_back({{"name", p.name}, {"lower", p.lower}, {"upper", p.upper},
                     {"scale", p.scale == Scale::Log ? "log" : "linear"}});
  j["search_space"] = space;
  j["constraint"] = {{"threshold_wpm", constraint.threshold_wpm}, {"tolerance", constraint.tolerance}};
  j["budget"] = budget;
  j["n_init"] = n_init;
  j["values_per_dim"] = values_per_dim;
  j["max_consecutive_constraint"] = max_consecutive_constraint;
  j["seed"] = seed;
  if (simulator) {
    const auto& s = *simulator;
    j["evaluator"] = {{"type", "simulator"}, {"W0", s.W0}, {"alpha", s.alpha}, {"beta", s.beta},
                      {"gamma", s.resolved_gamma()}, {"sigma_log", s.sigma_log}, {"B_star", s.B_star},
                      {"A_d", s.A_d}, {"A_s", s.A_s}, {"A_n", s.A_n}, {"tau_d", s.tau_d}, {"tau_s", s.tau_s},
                      {"tau_n", s.tau_n}, {"sigma_B", s.sigma_B}, {"full_set_words", s.full_set_words},
                      {"subset_words", s.subset_words}, {"time_scale", s.time_scale}};
  } else if (external) {
    const auto& e = *external;
    j["evaluator"] = {{"type", "external"}, {"command", e.command_template}, {"full_set_path", e.full_set_path},
                      {"subset_path", e.subset_path}, {"full_set_words", e.full_set_words},
                      {"subset_words", e.subset_words}, {"timeout_seconds", e.timeout_seconds}};
  }
  j["output_dir"] = output_dir.string();
  j["measure_overhead"] = measure_overhead;
  j["final_measurements"] = final_measurements;
  return j;
}

void ExperimentConfig::validate() const {
  try {
    SearchSpace{params};
  } catch (const ParameterError& e) {
    throw ConfigError("search_space", e.what());
  }
  if (!(constraint.threshold_wpm > 0.0)) throw ConfigError("constraint.threshold_wpm", "threshold must be positive");
  if (!(constraint.tolerance > 0.0 && constraint.tolerance < 1.0))
    throw ConfigError("constraint.tolerance", "tolerance must lie in (0, 1)");
  if (budget < 1) throw ConfigError("budget", "budget must be positive");
  if (n_init < 1) throw ConfigError("n_init", "n_init must be positive");
  if ((method == Method::BoStandard || method == Method::BoDecoupled) && budget < n_init)
    throw ConfigError("budget", "budget must be at least n_init");
  if (values_per_dim < 2) throw ConfigError("values_per_dim", "values_per_dim must be at least 2");
  if (max_consecutive_constraint < 1)
    throw ConfigError("max_consecutive_constraint", "max_consecutive_constraint must be positive");
  if (final_measurements < 0) throw ConfigError("final_measurements", "final_measurements must be >= 0");
  if (bool(simulator) == bool(external)) throw ConfigError("evaluator", "configure exactly one evaluator");
  try {
    if (simulator) {
      simulator->validate();
      if (params.size() != 3) throw ParameterError("the simulator models exactly three parameters (d, s, n)");
    }
    if (external) external->validate();
  } catch (const ParameterError& e) {
    throw ConfigError("evaluator", e.what());
  }
  if (output_dir.empty()) throw ConfigError("output_dir", "output_dir must not be empty");
}

std::unique_ptr<Evaluator> ExperimentConfig::make_evaluator() const {
  if (simulator) return std::make_unique<SimulatedDecoder>(*simulator);
  return std::make_unique<ExternalDecoder>(*external);
}

namespace {

ojson theta_json(const std::vector<ParamSpec>& params, const RawPoint& x) {
  ojson j;
  for (std::size_t d = 0; d < params.size(); ++d) j[params[d].name] = x[d];
  return j;
}

ojson hyperparams_json(const Surrogate& s) {
  const auto& hp = s.hyperparams();
  return {{"amplitude", hp.amplitude}, {"lengthscales", hp.lengthscales}, {"noise_variance", hp.noise_variance},
          {"target_offset", s.offset()}, {"target_scale", s.scale()}, {"observations", s.size()}};
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()); }

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / double(v.size() - 1));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("output_dir", "cannot write " + path.string());
  out << text;
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) throw ConfigError("output_dir", "cannot create " + config.output_dir.string() + ": " + ec.message());

  const SearchSpace space(config.params);
  auto evaluator = config.make_evaluator();
  TraceMeta meta{method_name(config.method), config.constraint.threshold_wpm, config.constraint.tolerance, config.seed,
                 config.params};
  ExperimentOutcome outcome;
  outcome.trace_path = config.output_dir / "trace.csv";
  outcome.summary_path = config.output_dir / "summary.json";
  outcome.plot_path = config.output_dir / "best_so_far.csv";
  TraceWriter writer(outcome.trace_path.string(), meta);

  std::string plot = "iteration,cumulative_decode_seconds,cumulative_total_seconds,best_objective\n";
  double cumulative = 0.0, overhead = 0.0;
  auto record = [&](TraceRow row) {
    cumulative += row.wall_seconds;
    overhead += row.bo_overhead_seconds;
    row.cumulative_decode_seconds = cumulative;
    writer.append(row);
    if (row.incumbent_trusted && row.incumbent_objective)
      plot += std::to_string(row.iteration) + "," + format_number(cumulative) + "," +
              format_number(cumulative + overhead) + "," + format_number(*row.incumbent_objective) + "\n";
  };
  auto base_row = [](const Observation& o) {
    TraceRow r;
    r.iteration = o.iteration_index;
    r.task = o.task;
    r.theta = o.x;
    r.objective = o.objective_value;
    r.speed_wpm = o.constraint_value_raw;
    r.wall_seconds = o.duration_seconds;
    r.bo_overhead_seconds = o.overhead_seconds;
    r.failed = o.failed;
    return r;
  };

  ojson summary;
  summary["method"] = meta.method;
  summary["threshold_wpm"] = config.constraint.threshold_wpm;
  summary["tolerance"] = config.constraint.tolerance;
  summary["seed"] = config.seed;
  std::optional<RawPoint> final_theta;
  int evaluations = 0;

  if (config.method == Method::BoStandard || config.method == Method::BoDecoupled) {
    OptimizerSettings settings;
    settings.mode = config.method == Method::BoStandard ? Mode::Coupled : Mode::Decoupled;
    settings.constraint = config.constraint;
    settings.budget = config.budget;
    settings.n_init = config.n_init;
    settings.seed = config.seed;
    settings.max_consecutive_constraint = config.max_consecutive_constraint;
    settings.measure_overhead = config.measure_overhead;
    ConstrainedOptimizer opt(space, *evaluator, settings);
    opt.set_callback([&](const Observation& o, const std::optional<Recommendation>& inc) {
      TraceRow row = base_row(o);
      if (inc) {
        row.incumbent_objective = inc->posterior_objective_mean;
        row.incumbent_observed = inc->observed_objective;
        row.incumbent_pof = inc->prob_feasible;
        row.incumbent_theta = inc->x;
        row.incumbent_trusted = inc->feasible_under_model;
      }
      record(std::move(row));
    });
    opt.initialize();
    while (!opt.exhausted()) opt.step();
    const auto rec = opt.recommend();
    final_theta = rec.x;
    evaluations = opt.history().iterations();
    summary["theta"] = theta_json(config.params, rec.x);
    summary["posterior_objective_mean"] = rec.posterior_objective_mean;
    summary["prob_feasible"] = rec.prob_feasible;
    summary["feasible_under_model"] = rec.feasible_under_model;
    summary["fallback_used"] = rec.fallback_used;
    summary["objective_evaluations"] = opt.history().objective_evaluations();
    summary["constraint_evaluations"] = opt.history().constraint_evaluations();
    summary["objective_model"] = hyperparams_json(opt.objective_model());
    summary["constraint_model"] = hyperparams_json(opt.constraint_model().gp());
  } else {
    const auto callback = [&](const Observation& o, const BaselineResult& so_far) {
      TraceRow row = base_row(o);
      if (so_far.best) {
        row.incumbent_objective = so_far.best_objective;
        row.incumbent_observed = so_far.best_objective;
        row.incumbent_theta = so_far.best;
        row.incumbent_trusted = true;
      }
      record(std::move(row));
    };
    const auto result = config.method == Method::Grid
                            ? grid_search(space, *evaluator, config.constraint, config.values_per_dim, config.seed,
                                          callback)
                            : random_search(space, *evaluator, config.constraint, config.budget, config.seed, callback);
    final_theta = result.best;
    evaluations = result.history.iterations();
    summary["theta"] = result.best ? theta_json(config.params, *result.best) : ojson(nullptr);
    summary["best_measured_objective"] = result.best_objective ? ojson(*result.best_objective) : ojson(nullptr);
    summary["best_measured_speed_wpm"] = result.best_speed_wpm ? ojson(*result.best_speed_wpm) : ojson(nullptr);
    summary["objective_evaluations"] = evaluations;
  }
  summary["evaluations"] = evaluations;
  summary["total_decode_seconds"] = cumulative;
  summary["total_bo_overhead_seconds"] = overhead;

  if (final_theta && config.final_measurements > 0) {
    std::vector<double> objectives, speeds;
    try {
      for (int k = 0; k < config.final_measurements; ++k) {
        const auto r = evaluator->evaluate({*final_theta, TaskKind::Both, mix_seed(config.seed, 0xf1a1, std::uint64_t(k))});
        if (r.objective) objectives.push_back(*r.objective);
        if (r.speed_wpm) speeds.push_back(*r.speed_wpm);
      }
      summary["final_measurements"] = config.final_measurements;
      summary["tuning_objective"] = objectives.empty() ? ojson(nullptr) : ojson(mean_of(objectives));
      summary["measured_speed_wpm"] = speeds.empty() ? ojson(nullptr) : ojson(mean_of(speeds));
    } catch (const EvaluationError& e) {
      summary["final_measurement_error"] = e.what();
    }
  }
  summary["config"] = config.to_json();
  outcome.summary = summary;
  write_text(outcome.summary_path, summary.dump(2) + "\n");
  write_text(outcome.plot_path, plot);
  return outcome;
}

namespace {

SpeedStats speed_stats(Evaluator& evaluator, const RawPoint& theta, int repeats, std::uint64_t seed, int bins) {
  SpeedStats s;
  s.theta = theta;
  std::vector<double> logs;
  for (int i = 0; i < repeats; ++i) {
    const auto r = evaluator.evaluate({theta, TaskKind::Both, mix_seed(seed, std::uint64_t(i))});
    if (!r.speed_wpm || !(*r.speed_wpm > 0.0)) throw EvaluationError("noise study evaluation returned no speed");
    s.speeds.push_back(*r.speed_wpm);
    logs.push_back(std::log(*r.speed_wpm));
  }
  s.mean = mean_of(s.speeds);
  s.std = sample_std(s.speeds);
  s.log_mean = mean_of(logs);
  s.log_std = sample_std(logs);
  const auto [lo_it, hi_it] = std::minmax_element(s.speeds.begin(), s.speeds.end());
  const double lo = *lo_it, hi = *hi_it > *lo_it ? *hi_it : *lo_it + 1.0;
  s.bin_counts.assign(std::size_t(bins), 0);
  for (int b = 0; b <= bins; ++b) s.bin_edges.push_back(lo + (hi - lo) * b / bins);
  for (double v : s.speeds)
    ++s.bin_counts[std::min<std::size_t>(std::size_t((v - lo) / (hi - lo) * bins), std::size_t(bins - 1))];
  return s;
}

ojson stats_json(const SpeedStats& s) {
  return {{"theta", s.theta},         {"repeats", s.speeds.size()}, {"mean", s.mean},
          {"std", s.std},             {"log_mean", s.log_mean},     {"log_std", s.log_std},
          {"bin_edges", s.bin_edges}, {"bin_counts", s.bin_counts}};
}

}  // namespace

NoiseStudyReport noise_study(Evaluator& evaluator, const RawPoint& slow, const RawPoint& fast, int repeats,
                             std::uint64_t seed, int bins) {
  if (repeats < 2) throw ParameterError("noise study needs at least 2 repeats");
  if (bins < 1) throw ParameterError("noise study needs at least 1 histogram bin");
  return {speed_stats(evaluator, slow, repeats, mix_seed(seed, 1), bins),
          speed_stats(evaluator, fast, repeats, mix_seed(seed, 2), bins)};
}

std::string NoiseStudyReport::table() const {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%-10s | %12s %12s | %12s %12s\n"
                "%-10s | %12.2f %12.2f | %12.2f %12.2f\n"
                "%-10s | %12.4f %12.4f | %12.4f %12.4f\n",
                "", "slow mean", "slow std", "fast mean", "fast std", "speed", slow.mean, slow.std, fast.mean,
                fast.std, "log speed", slow.log_mean, slow.log_std, fast.log_mean, fast.log_std);
  return buf;
}

std::string NoiseStudyReport::histogram_csv() const {
  std::string out = "setting,bin_lower,bin_upper,count\n";
  for (const auto* s : {&slow, &fast}) {
    const char* name = s == &slow ? "slow" : "fast";
    for (std::size_t b = 0; b < s->bin_counts.size(); ++b)
      out += std::string(name) + "," + format_number(s->bin_edges[b]) + "," + format_number(s->bin_edges[b + 1]) +
             "," + std::to_string(s->bin_counts[b]) + "\n";
  }
  return out;
}

ojson NoiseStudyReport::to_json() const { return {{"slow", stats_json(slow)}, {"fast", stats_json(fast)}}; }

namespace {

bool is_bo(const std::string& method) { return method == "bo-s" || method == "bo-d"; }

/// Per-row feasibility flags for one trace.
std::vector<bool> feasible_rows(const Trace& trace) {
  std::vector<bool> ok(trace.rows.size(), false);
  if (!is_bo(trace.meta.method)) {
    for (std::size_t i = 0; i < trace.rows.size(); ++i) {
      const auto& r = trace.rows[i];
      ok[i] = !r.failed && r.objective && r.speed_wpm && *r.speed_wpm > trace.meta.threshold_wpm;
    }
    return ok;
  }
  const SearchSpace space(trace.meta.params);
  ConstraintModel model({trace.meta.threshold_wpm, trace.meta.tolerance}, space.dim());
  for (const auto& r : trace.rows)
    if (!r.failed && r.speed_wpm && *r.speed_wpm > 0.0) model.append(space.to_unit(r.theta), *r.speed_wpm);
  model.refit(trace.meta.seed);
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    const auto& r = trace.rows[i];
    ok[i] = !r.failed && r.objective && model.is_trusted(space.to_unit(r.theta));
  }
  return ok;
}

}  // namespace

ComparisonReport compare_report(const std::vector<Trace>& traces, const std::vector<std::string>& labels,
                                double epsilon) {
  if (traces.empty()) throw ParameterError("compare_report needs at least one trace");
  if (epsilon < 0.0) throw ParameterError("epsilon must be non-negative");
  ComparisonReport report;
  report.epsilon = epsilon;

  std::vector<std::vector<std::optional<double>>> running(traces.size());
  std::optional<double> overall;
  for (std::size_t t = 0; t < traces.size(); ++t) {
    const auto ok = feasible_rows(traces[t]);
    std::optional<double> best;
    for (std::size_t i = 0; i < traces[t].rows.size(); ++i) {
      if (ok[i] && (!best || *traces[t].rows[i].objective > *best)) best = traces[t].rows[i].objective;
      running[t].push_back(best);
    }
    if (best && (!overall || *best > *overall)) overall = best;
  }
  report.overall_best = overall.value_or(0.0);

  report.plot_csv = "method,cumulative_decode_seconds,cumulative_total_seconds,best_feasible_objective\n";
  for (std::size_t t = 0; t < traces.size(); ++t) {
    const auto& trace = traces[t];
    MethodSummary row;
    row.method = trace.meta.method;
    row.label = t < labels.size() ? labels[t] : trace.meta.method;
    double overhead = 0.0;
    for (std::size_t i = 0; i < trace.rows.size(); ++i) {
      const auto& r = trace.rows[i];
      overhead += r.bo_overhead_seconds;
      row.total_decode_seconds = r.cumulative_decode_seconds;
      if (running[t][i])
        report.plot_csv += row.label + "," + format_number(r.cumulative_decode_seconds) + "," +
                           format_number(r.cumulative_decode_seconds + overhead) + "," +
                           format_number(*running[t][i]) + "\n";
      if (!row.decode_seconds_to_reach && overall && running[t][i] && *running[t][i] >= *overall - epsilon) {
        row.decode_seconds_to_reach = r.cumulative_decode_seconds;
        row.total_seconds_to_reach = r.cumulative_decode_seconds + overhead;
        row.evaluations_to_reach = int(i) + 1;
      }
    }
    row.total_overhead_seconds = overhead;
    row.best_feasible_objective = running[t].empty() ? std::nullopt : running[t].back();
    if (!trace.rows.empty()) row.final_theta = trace.rows.back().incumbent_theta;
    report.rows.push_back(std::move(row));
  }
  std::stable_sort(report.rows.begin(), report.rows.end(), [](const MethodSummary& a, const MethodSummary& b) {
    if (bool(a.total_seconds_to_reach) != bool(b.total_seconds_to_reach)) return bool(a.total_seconds_to_reach);
    if (a.total_seconds_to_reach && *a.total_seconds_to_reach != *b.total_seconds_to_reach)
      return *a.total_seconds_to_reach < *b.total_seconds_to_reach;
    return a.best_feasible_objective.value_or(-1e300) > b.best_feasible_objective.value_or(-1e300);
  });
  return report;
}

std::string ComparisonReport::table() const {
  std::ostringstream out;
  out << "overall best feasible objective: " << format_number(overall_best) << " (epsilon " << format_number(epsilon)
      << ")\n";
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-28s %10s %14s %14s %8s %12s %12s  %s\n", "run", "best", "decode_s@best",
                "total_s@best", "evals", "decode_s", "bo_s", "final_theta");
  out << buf;
  for (const auto& r : rows) {
    auto o = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string("-"); };
    std::string theta = "-";
    if (r.final_theta) {
      theta.clear();
      for (std::size_t d = 0; d < r.final_theta->size(); ++d) theta += (d ? "," : "") + std::to_string((*r.final_theta)[d]);
    }
    std::snprintf(buf, sizeof buf, "%-28s %10s %14s %14s %8s %12s %12s  %s\n", r.label.c_str(),
                  o(r.best_feasible_objective).c_str(), o(r.decode_seconds_to_reach).c_str(),
                  o(r.total_seconds_to_reach).c_str(),
                  r.evaluations_to_reach ? std::to_string(*r.evaluations_to_reach).c_str() : "-",
                  format_number(r.total_decode_seconds).c_str(), format_number(r.total_overhead_seconds).c_str(),
                  theta.c_str());
    out << buf;
  }
  return out.str();
}

}  // namespace cbo
