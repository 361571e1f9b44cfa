#include "cbo/evaluator.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "cbo/errors.hpp"

namespace cbo {

double SimulatorConfig::anchored_gamma(double W0, double alpha, double beta) {
  return (std::log(W0 / kSlowAnchorWpm) - alpha * std::log(6.0)) / std::log(100.0) - beta;
}

SimulatorConfig SimulatorConfig::calibrated() {
  SimulatorConfig cfg;
  cfg.gamma = anchored_gamma(cfg.W0, cfg.alpha, cfg.beta);
  return cfg;
}

void SimulatorConfig::validate() const {
  if (!(W0 > 0.0)) throw ParameterError("simulator W0 must be positive");
  if (!(alpha > 0.0) || !(beta > 0.0) || !(resolved_gamma() > 0.0))
    throw ParameterError("simulator speed exponents must be positive");
  if (sigma_log < 0.0 || sigma_B < 0.0) throw ParameterError("simulator noise levels must be non-negative");
  if (A_d < 0.0 || A_s < 0.0 || A_n < 0.0) throw ParameterError("simulator score amplitudes must be non-negative");
  if (!(tau_d > 0.0) || !(tau_s > 0.0) || !(tau_n > 0.0))
    throw ParameterError("simulator decay scales must be positive");
  if (full_set_words <= 0 || subset_words <= 0) throw ParameterError("simulator word counts must be positive");
  if (!(time_scale > 0.0)) throw ParameterError("simulator time_scale must be positive");
}

namespace {

void check_decoder_point(const RawPoint& x) {
  if (x.size() != 3) throw ParameterError("simulator expects (d, s, n)");
  if (x[0] < 0) throw BoundsError("d", "simulator needs d >= 0");
  if (x[1] < 1) throw BoundsError("s", "simulator needs s >= 1");
  if (x[2] < 1) throw BoundsError("n", "simulator needs n >= 1");
}

}  // namespace

double SimulatorConfig::noiseless_speed(const RawPoint& x) const {
  check_decoder_point(x);
  return W0 * std::pow(1.0 + x[0], -alpha) * std::pow(double(x[1]), -beta) * std::pow(double(x[2]), -resolved_gamma());
}

double SimulatorConfig::noiseless_score(const RawPoint& x) const {
  check_decoder_point(x);
  return B_star - A_d * std::exp(-x[0] / tau_d) - A_s * std::exp(-std::log(double(x[1])) / tau_s) -
         A_n * std::exp(-std::log(double(x[2])) / tau_n);
}

EvaluationResult simulate(const SimulatorConfig& cfg, const EvaluationRequest& request) {
  std::mt19937_64 rng(request.seed);
  std::normal_distribution<double> standard(0.0, 1.0);
  const double speed_noise = standard(rng);
  const double score_noise = standard(rng);

  const double speed = cfg.noiseless_speed(request.x) * std::exp(cfg.sigma_log * speed_noise);
  const double score = std::clamp(cfg.noiseless_score(request.x) + cfg.sigma_B * score_noise, 0.0, 100.0);
  const long words = request.task == TaskKind::ConstraintOnly ? cfg.subset_words : cfg.full_set_words;

  EvaluationResult r;
  if (request.task != TaskKind::ConstraintOnly) r.objective = score;
  if (request.task != TaskKind::ObjectiveOnly) r.speed_wpm = speed;
  r.words_translated = words;
  r.wall_seconds = cfg.time_scale * double(words) / (speed / 60.0);
  return r;
}

SimulatedDecoder::SimulatedDecoder(SimulatorConfig cfg) : cfg_(cfg) {
  if (cfg_.gamma <= 0.0) cfg_.gamma = cfg_.resolved_gamma();
  cfg_.validate();
}

void ExternalCommandSpec::validate() const {
  for (const char* key : {"{d}", "{s}", "{n}"})
    if (command_template.find(key) == std::string::npos)
      throw ParameterError(std::string("command template is missing placeholder ") + key);
  if (full_set_words <= 0 || subset_words <= 0) throw ParameterError("external word counts must be positive");
  if (!(timeout_seconds > 0.0)) throw ParameterError("external timeout must be positive");
}

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  return out + "'";
}

void replace_all(std::string& text, const std::string& key, const std::string& value) {
  for (std::size_t pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos + value.size()))
    text.replace(pos, key.size(), value);
}

struct ProcessOutcome {
  int status = 0;
  bool timed_out = false;
  std::string output;
  double seconds = 0.0;
};

ProcessOutcome run_shell(const std::string& command, double timeout_seconds) {
  int fds[2];
  if (pipe(fds) != 0) throw EvaluationError(std::string("pipe failed: ") + std::strerror(errno));
  const auto start = std::chrono::steady_clock::now();
  const pid_t pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    throw EvaluationError(std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid == 0) {
    setpgid(0, 0);
    dup2(fds[1], STDOUT_FILENO);
    dup2(fds[1], STDERR_FILENO);
    close(fds[0]);
    close(fds[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(fds[1]);

  ProcessOutcome out;
  std::array<char, 4096> buffer{};
  const auto deadline = start + std::chrono::duration<double>(timeout_seconds);
  while (true) {
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      out.timed_out = true;
      kill(-pid, SIGKILL);
      break;
    }
    const int wait_ms = int(std::min<double>(
        1000.0, std::chrono::duration<double, std::milli>(deadline - now).count() + 1.0));
    pollfd pfd{fds[0], POLLIN, 0};
    const int ready = poll(&pfd, 1, wait_ms);
    if (ready < 0 && errno == EINTR) continue;
    if (ready <= 0) continue;
    const ssize_t got = read(fds[0], buffer.data(), buffer.size());
    if (got <= 0) break;  // EOF: the child closed its output
    out.output.append(buffer.data(), std::size_t(got));
  }
  close(fds[0]);
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.status = status;
  return out;
}

}  // namespace

std::string render_command(const ExternalCommandSpec& spec, const EvaluationRequest& request) {
  if (request.x.size() != 3) throw ParameterError("external decoder expects (d, s, n)");
  std::string cmd = spec.command_template;
  replace_all(cmd, "{d}", std::to_string(request.x[0]));
  replace_all(cmd, "{s}", std::to_string(request.x[1]));
  replace_all(cmd, "{n}", std::to_string(request.x[2]));
  const auto& path = request.task == TaskKind::ConstraintOnly ? spec.subset_path : spec.full_set_path;
  replace_all(cmd, "{sentences}", shell_quote(path));
  return cmd;
}

double words_per_minute(long words, double seconds) {
  if (!(seconds > 0.0)) throw MeasurementError("decode time must be positive");
  return 60.0 * double(words) / seconds;
}

std::optional<double> parse_score(const std::string& output) {
  std::optional<double> score;
  std::istringstream lines(output);
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    std::string tag;
    double value = 0.0;
    if (fields >> tag && tag == "SCORE" && fields >> value && std::isfinite(value)) score = value;
  }
  return score;
}

EvaluationResult run_external(const ExternalCommandSpec& spec, const EvaluationRequest& request) {
  spec.validate();
  const std::string cmd = render_command(spec, request);
  const auto outcome = run_shell(cmd, spec.timeout_seconds);
  if (outcome.timed_out)
    throw EvaluationError("decoder timed out after " + std::to_string(spec.timeout_seconds) + " s: " + cmd,
                          outcome.output);
  if (!WIFEXITED(outcome.status) || WEXITSTATUS(outcome.status) != 0)
    throw EvaluationError("decoder exited abnormally (status " + std::to_string(outcome.status) + "): " + cmd,
                          outcome.output);

  EvaluationResult r;
  r.words_translated = request.task == TaskKind::ConstraintOnly ? spec.subset_words : spec.full_set_words;
  r.wall_seconds = outcome.seconds;
  if (request.task != TaskKind::ConstraintOnly) {
    r.objective = parse_score(outcome.output);
    if (!r.objective) throw EvaluationError("decoder output has no SCORE line: " + cmd, outcome.output);
  }
  if (request.task != TaskKind::ObjectiveOnly)
    r.speed_wpm = words_per_minute(r.words_translated, std::max(outcome.seconds, 1e-9));
  return r;
}

ExternalDecoder::ExternalDecoder(ExternalCommandSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

double measure_speed_subset(Evaluator& evaluator, const RawPoint& x, std::uint64_t seed) {
  const auto r = evaluator.evaluate({x, TaskKind::ConstraintOnly, seed});
  if (!r.speed_wpm) throw EvaluationError("subset evaluation returned no speed");
  return *r.speed_wpm;
}

}  // namespace cbo
