#include "cbo/trace.hpp"

#include <cstdio>
#include <sstream>

#include "cbo/errors.hpp"

namespace cbo {

namespace {

std::string scale_name(Scale s) { return s == Scale::Log ? "log" : "linear"; }

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

nlohmann::ordered_json TraceMeta::to_json() const {
  nlohmann::ordered_json j;
  j["method"] = method;
  j["threshold_wpm"] = threshold_wpm;
  j["tolerance"] = tolerance;
  j["seed"] = seed;
  auto space = nlohmann::ordered_json::array();
  for (const auto& p : params)
    space.push_back({{"name", p.name}, {"lower", p.lower}, {"upper", p.upper}, {"scale", scale_name(p.scale)}});
  j["search_space"] = space;
  return j;
}

TraceMeta TraceMeta::from_json(const nlohmann::json& j) {
  TraceMeta m;
  m.method = j.at("method").get<std::string>();
  m.threshold_wpm = j.at("threshold_wpm").get<double>();
  m.tolerance = j.at("tolerance").get<double>();
  m.seed = j.value("seed", std::uint64_t{0});
  for (const auto& p : j.at("search_space"))
    m.params.push_back({p.at("name").get<std::string>(), p.at("lower").get<int>(), p.at("upper").get<int>(),
                        p.at("scale").get<std::string>() == "log" ? Scale::Log : Scale::Linear});
  return m;
}

std::string trace_header(const TraceMeta& meta) {
  std::string h = "# " + meta.to_json().dump() + "\niteration,task";
  for (const auto& p : meta.params) h += "," + p.name;
  h += ",objective,speed_wpm,wall_seconds,cumulative_decode_seconds,bo_overhead_seconds,incumbent_objective,"
       "incumbent_observed,incumbent_pof,incumbent_trusted";
  for (const auto& p : meta.params) h += ",incumbent_" + p.name;
  return h + ",failed";
}

std::string format_trace_row(const TraceRow& r) {
  std::ostringstream out;
  out << r.iteration << ',' << to_string(r.task);
  for (int v : r.theta) out << ',' << v;
  out << ',' << opt(r.objective) << ',' << opt(r.speed_wpm) << ',' << format_number(r.wall_seconds) << ','
      << format_number(r.cumulative_decode_seconds) << ',' << format_number(r.bo_overhead_seconds) << ','
      << opt(r.incumbent_objective) << ',' << opt(r.incumbent_observed) << ',' << opt(r.incumbent_pof) << ','
      << (r.incumbent_trusted ? 1 : 0);
  for (std::size_t d = 0; d < r.theta.size(); ++d) {
    out << ',';
    if (r.incumbent_theta) out << (*r.incumbent_theta)[d];
  }
  out << ',' << (r.failed ? 1 : 0);
  return out.str();
}

TraceWriter::TraceWriter(const std::string& path, const TraceMeta& meta) : out_(path), dim_(meta.params.size()) {
  if (!out_) throw ConfigError("output_dir", "cannot open trace file " + path);
  out_ << trace_header(meta) << '\n' << std::flush;
}

void TraceWriter::append(const TraceRow& row) {
  if (row.theta.size() != dim_) throw ParameterError("trace row dimension mismatch");
  out_ << format_trace_row(row) << '\n' << std::flush;
}

Trace read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("trace", "cannot open trace file " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw ConfigError("trace", path + ": missing metadata line");
  Trace trace;
  try {
    trace.meta = TraceMeta::from_json(nlohmann::json::parse(line.substr(2)));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("trace", path + ": bad metadata: " + e.what());
  }
  const std::size_t dim = trace.meta.params.size();
  const std::size_t expected = 2 + dim + 9 + dim + 1;
  std::getline(in, line);  // column names
  int lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != expected)
      throw ConfigError("trace", path + ":" + std::to_string(lineno) + ": expected " + std::to_string(expected) +
                                     " fields, got " + std::to_string(f.size()));
    try {
      TraceRow r;
      std::size_t i = 0;
      r.iteration = std::stoi(f[i++]);
      r.task = task_from_string(f[i++]);
      for (std::size_t d = 0; d < dim; ++d) r.theta.push_back(std::stoi(f[i++]));
      r.objective = parse_opt(f[i++]);
      r.speed_wpm = parse_opt(f[i++]);
      r.wall_seconds = std::stod(f[i++]);
      r.cumulative_decode_seconds = std::stod(f[i++]);
      r.bo_overhead_seconds = std::stod(f[i++]);
      r.incumbent_objective = parse_opt(f[i++]);
      r.incumbent_observed = parse_opt(f[i++]);
      r.incumbent_pof = parse_opt(f[i++]);
      r.incumbent_trusted = f[i++] == "1";
      RawPoint inc;
      for (std::size_t d = 0; d < dim; ++d, ++i)
        if (!f[i].empty()) inc.push_back(std::stoi(f[i]));
      if (inc.size() == dim) r.incumbent_theta = inc;
      r.failed = f[i] == "1";
      trace.rows.push_back(std::move(r));
    } catch (const std::logic_error& e) {
      throw ConfigError("trace", path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return trace;
}

}  // namespace cbo
