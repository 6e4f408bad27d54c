// fcsd: change detection with repeated forward confidence sequences.
//
//   fcsd detect   --input data.csv [detector flags] [--diagnostics steps.csv]
//   fcsd simulate --pre SPEC [--post SPEC --change-at N] [detector flags]
//   fcsd arl      --pre SPEC [detector flags]
//   fcsd delay    --pre SPEC --post SPEC --change-at N [detector flags]
//   fcsd klinf    --dist SPEC (--theta R [--delta R] | --theta0-lo R --theta0-hi R)
//   fcsd validate [--trials N] [--seed N]
//
// Every subcommand prints one JSON document on stdout.
// `fcsd --config FILE.toml SUBCOMMAND` reads a [subcommand] section keyed by the long flags.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fcsd/fcsd.hpp"
#include "fcsd/json.hpp"

using nlohmann::json;

namespace {

enum class LogLevel { Quiet, Info, Debug };

LogLevel g_log = LogLevel::Info;

void log_info(const std::string& msg) {
  if (g_log != LogLevel::Quiet) std::cerr << "[fcsd] " << msg << '\n';
}

void log_debug(const std::string& msg) {
  if (g_log == LogLevel::Debug) std::cerr << "[fcsd:debug] " << msg << '\n';
}

LogLevel parse_log_level() {
  const char* env = std::getenv("SCD_LOG");
  if (!env || !*env) return LogLevel::Info;
  const std::string v = env;
  if (v == "quiet") return LogLevel::Quiet;
  if (v == "info") return LogLevel::Info;
  if (v == "debug") return LogLevel::Debug;
  throw CLI::ValidationError("SCD_LOG", "expected quiet|info|debug, got '" + v + "'");
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------- detector flags ----------

struct DetectorFlags {
  double alpha = 0.05;
  std::string cs = "betting";
  int grid = 101;
  std::string strategy = "mixture";
  int bets = 5;
  double lambda0 = 0.5;
  std::string mode = "non-partitioned";
  std::optional<double> theta0_lo;
  std::optional<double> theta0_hi;
  std::string schedule = "every";
  std::string prune = "off";
  std::optional<std::uint64_t> censor;
};

void add_detector_flags(CLI::App* sub, DetectorFlags& f) {
  sub->add_option("--alpha", f.alpha, "Error level in (0,1)")->capture_default_str();
  sub->add_option("--cs", f.cs, "Confidence sequence family")
      ->check(CLI::IsMember({"betting", "hoeffding"}))
      ->capture_default_str();
  sub->add_option("--grid", f.grid, "Number of candidate means for the betting CS")->capture_default_str();
  sub->add_option("--strategy", f.strategy, "Betting strategy")
      ->check(CLI::IsMember({"mixture", "newton"}))
      ->capture_default_str();
  sub->add_option("--bets", f.bets, "Mixture components per candidate mean")->capture_default_str();
  sub->add_option("--lambda0", f.lambda0, "Hoeffding bet size")->capture_default_str();
  sub->add_option("--mode", f.mode, "Detector mode")
      ->check(CLI::IsMember({"non-partitioned", "partitioned"}))
      ->capture_default_str();
  sub->add_option("--theta0-lo", f.theta0_lo, "Lower end of the pre-change set (partitioned mode)");
  sub->add_option("--theta0-hi", f.theta0_hi, "Upper end of the pre-change set (partitioned mode)");
  sub->add_option("--schedule", f.schedule, "every | geometric:R")->capture_default_str();
  sub->add_option("--prune", f.prune, "Drop dominated confidence sequences")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  sub->add_option("--censor", f.censor, "Maximum number of observations");
}

fcsd::SpawnSchedule parse_schedule(const std::string& s) {
  if (s == "every") return fcsd::EveryStep{};
  if (s == "geometric") return fcsd::Geometric{};
  const std::string prefix = "geometric:";
  if (s.rfind(prefix, 0) == 0) {
    const std::string body = s.substr(prefix.size());
    std::size_t used = 0;
    double r = 0.0;
    try {
      r = std::stod(body, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == body.size() && used > 0) return fcsd::Geometric{r};
  }
  throw UsageError("--schedule expects every or geometric:R, got '" + s + "'");
}

fcsd::DetectorConfig build_detector(const DetectorFlags& f) {
  fcsd::DetectorConfig c;
  c.cs.alpha = f.alpha;
  c.cs.family = f.cs == "hoeffding" ? fcsd::CsFamily::Hoeffding : fcsd::CsFamily::Betting;
  if (f.grid < 0) throw UsageError("--grid must be positive");
  c.cs.grid_size = static_cast<std::size_t>(f.grid);
  if (f.strategy == "newton") c.cs.strategy = fcsd::AdaptiveNewton{};
  else c.cs.strategy = fcsd::GridMixture{f.bets};
  c.cs.hoeffding_lambda0 = f.lambda0;
  const bool has_lo = f.theta0_lo.has_value();
  const bool has_hi = f.theta0_hi.has_value();
  if (f.mode == "partitioned") {
    if (!has_lo || !has_hi) throw UsageError("partitioned mode needs --theta0-lo and --theta0-hi");
    if (*f.theta0_lo > *f.theta0_hi) throw UsageError("--theta0-lo exceeds --theta0-hi");
    c.mode = fcsd::Partitioned{{*f.theta0_lo, *f.theta0_hi}};
  } else if (has_lo || has_hi) {
    throw UsageError("--theta0-lo/--theta0-hi are only valid with --mode partitioned");
  }
  c.schedule = parse_schedule(f.schedule);
  c.pruning = f.prune == "on" ? fcsd::Pruning::DominatedInterval : fcsd::Pruning::Off;
  if (f.censor && *f.censor < 1) throw UsageError("--censor must be at least 1");
  c.validate();
  return c;
}

void echo_detector(json& cfg, const DetectorFlags& f) {
  cfg["alpha"] = f.alpha;
  cfg["cs"] = f.cs;
  cfg["grid"] = f.grid;
  cfg["strategy"] = f.strategy;
  cfg["bets"] = f.bets;
  cfg["lambda0"] = f.lambda0;
  cfg["mode"] = f.mode;
  if (f.theta0_lo) cfg["theta0-lo"] = *f.theta0_lo;
  if (f.theta0_hi) cfg["theta0-hi"] = *f.theta0_hi;
  cfg["schedule"] = f.schedule;
  cfg["prune"] = f.prune;
}

// ---------- input ----------

struct Stream {
  std::vector<double> values;
  std::string format;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double checked_value(double v, std::size_t line) {
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
    std::ostringstream os;
    os << "line " << line << ": value " << v << " lies outside [0,1]";
    throw UsageError(os.str());
  }
  return v;
}

Stream read_stream(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open input file '" + path + "'");
  Stream s;
  const bool jsonl = path.size() >= 6 && path.compare(path.size() - 6, 6, ".jsonl") == 0;
  s.format = jsonl ? "jsonl" : "csv";
  std::string raw;
  std::size_t line = 0;
  bool first_content = true;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(raw);
    if (text.empty()) continue;
    if (s.format == "jsonl" || (first_content && text.front() == '{')) {
      s.format = "jsonl";
      json j;
      try {
        j = json::parse(text);
      } catch (const json::parse_error&) {
        throw UsageError("line " + std::to_string(line) + ": malformed JSON record");
      }
      if (!j.is_object() || !j.contains("x") || !j["x"].is_number()) {
        throw UsageError("line " + std::to_string(line) + ": record needs a numeric field \"x\"");
      }
      s.values.push_back(checked_value(j["x"].get<double>(), line));
    } else {
      if (first_content && text == "x") {
        first_content = false;
        continue;
      }
      double v = 0.0;
      std::size_t used = 0;
      try {
        v = std::stod(text, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != text.size() || used == 0) {
        throw UsageError("line " + std::to_string(line) + ": non-numeric value '" + text + "'");
      }
      s.values.push_back(checked_value(v, line));
    }
    first_content = false;
  }
  return s;
}

json input_digest(const std::string& path, const Stream& s) {
  json d{{"path", path}, {"format", s.format}, {"length", s.values.size()}};
  if (s.values.empty()) {
    d["min"] = nullptr;
    d["max"] = nullptr;
  } else {
    const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
    d["min"] = *lo;
    d["max"] = *hi;
  }
  return d;
}

// ---------- manifest ----------

using Clock = std::chrono::steady_clock;

void emit(const std::string& sub, json config, json input, json result, Clock::time_point start) {
  const double wall = std::chrono::duration<double>(Clock::now() - start).count();
  json m{{"subcommand", sub}, {"version", FCSD_VERSION}, {"config", std::move(config)},
         {"input", std::move(input)}, {"result", std::move(result)}, {"wall_time_s", wall}};
  std::cout << m.dump(2) << '\n';
}

// ---------- detect ----------

struct DetectFlags {
  std::string input;
  std::string diagnostics;
  std::optional<double> theta0_ref;
};

int cmd_detect(const DetectorFlags& df, const DetectFlags& f) {
  const auto start = Clock::now();
  const auto config = build_detector(df);
  const Stream stream = read_stream(f.input);
  log_info("detect: " + std::to_string(stream.values.size()) + " observations from " + f.input);
  const std::uint64_t censor = df.censor.value_or(std::max<std::uint64_t>(1, stream.values.size()));

  std::optional<double> ref = f.theta0_ref;
  if (!ref) {
    if (const auto* p = std::get_if<fcsd::Partitioned>(&config.mode)) {
      ref = 0.5 * (p->theta0_set.lower + p->theta0_set.upper);
    }
  }
  if (ref) fcsd::require_unit(*ref, "--theta0-ref");

  std::ofstream diag;
  if (!f.diagnostics.empty()) {
    diag.open(f.diagnostics);
    if (!diag) throw UsageError("cannot write diagnostics file '" + f.diagnostics + "'");
    diag << "n,lower,upper,active,m_n\n";
  }
  const auto fmt = fcsd::detail::format_number;
  const auto report = fcsd::run_stream(config, stream.values, censor, false, [&](const fcsd::Detector& det) {
    const auto g = det.global();
    if (diag.is_open()) {
      diag << det.steps() << ',' << fmt(g.lower) << ',' << fmt(g.upper) << ',' << det.active().size() << ',';
      if (ref) {
        std::size_t misses = 0;
        for (const auto& cs : det.active()) misses += !cs.interval().contains(*ref);
        diag << fmt(static_cast<double>(misses) / config.cs.alpha);
      }
      diag << '\n';
    }
    log_debug("n=" + std::to_string(det.steps()) + " global=[" + std::to_string(g.lower) + "," +
              std::to_string(g.upper) + "] active=" + std::to_string(det.active().size()));
  });
  if (report.tau) log_info("detected change at tau=" + std::to_string(*report.tau));
  else log_info("no change detected; censored at " + std::to_string(*report.censored_at));

  json cfg{{"input", f.input}};
  echo_detector(cfg, df);
  cfg["censor"] = censor;
  if (!f.diagnostics.empty()) cfg["diagnostics"] = f.diagnostics;
  if (f.theta0_ref) cfg["theta0-ref"] = *f.theta0_ref;
  json result = fcsd::to_json(report);
  result["theta0_ref"] = ref ? json(*ref) : json(nullptr);
  emit("detect", std::move(cfg), input_digest(f.input, stream), std::move(result), start);
  return 0;
}

// ---------- simulate / arl / delay ----------

struct SimFlags {
  std::string pre;
  std::string post;
  std::string change_at = "inf";
  std::uint64_t trials = 100;
  std::uint64_t seed = 1;
  unsigned parallel = 0;
  std::string out;
};

void add_sim_flags(CLI::App* sub, SimFlags& f, bool needs_post) {
  sub->add_option("--pre", f.pre, std::string("Pre-change law: ") + std::string(fcsd::kDistGrammar))->required();
  auto* post = sub->add_option("--post", f.post, "Post-change law (defaults to --pre)");
  if (needs_post) post->required();
  auto* change = sub->add_option("--change-at", f.change_at, "Changepoint T (N or inf)");
  if (needs_post) change->required();
  else change->capture_default_str();
  sub->add_option("--trials", f.trials, "Number of Monte-Carlo trials")->capture_default_str();
  sub->add_option("--seed", f.seed, "Base seed")->capture_default_str();
  sub->add_option("--parallel", f.parallel, "Worker threads (0 = all cores)")->capture_default_str();
  sub->add_option("--out", f.out, "Write per-trial records to this CSV file");
}

std::optional<std::uint64_t> parse_change_at(const std::string& s) {
  if (s == "inf") return std::nullopt;
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || used == 0 || v < 1 || s.front() == '-') {
    throw UsageError("--change-at expects a positive integer or inf, got '" + s + "'");
  }
  return v;
}

fcsd::DistSpec parse_spec(const std::string& flag, const std::string& s) {
  try {
    return fcsd::parse_dist(s);
  } catch (const fcsd::DomainError& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

void write_trials(const std::string& path, const fcsd::SimReport& rep) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write per-trial file '" + path + "'");
  out << "trial,tau,run_length,delay,good_event,domination_ok,e_detector_monotone\n";
  for (const auto& r : rep.per_trial) {
    out << r.trial << ',';
    if (r.tau) out << *r.tau;
    out << ',' << r.run_length << ',';
    if (r.delay) out << *r.delay;
    out << ',';
    if (r.good_event) out << (*r.good_event ? 1 : 0);
    out << ',' << (r.domination_ok ? 1 : 0) << ',' << (r.e_detector_monotone ? 1 : 0) << '\n';
  }
}

enum class SimKind { Any, Arl, Delay };

int cmd_sim(const std::string& name, SimKind kind, const DetectorFlags& df, const SimFlags& f) {
  const auto start = Clock::now();
  fcsd::SimConfig cfg;
  cfg.detector = build_detector(df);
  cfg.model.pre = parse_spec("--pre", f.pre);
  cfg.model.post = f.post.empty() ? cfg.model.pre : parse_spec("--post", f.post);
  cfg.model.change_at = parse_change_at(f.change_at);
  cfg.model.seed = f.seed;
  if (kind == SimKind::Arl && cfg.model.change_at) throw UsageError("arl needs --change-at inf");
  if (kind == SimKind::Delay && !cfg.model.change_at) throw UsageError("delay needs a finite --change-at");
  if (f.trials < 1) throw UsageError("--trials must be at least 1");
  cfg.trials = f.trials;
  cfg.censor = df.censor;
  cfg.parallelism = f.parallel;
  cfg.keep_trials = !f.out.empty();
  const std::uint64_t censor = fcsd::resolved_censor(cfg);
  log_info(name + ": " + std::to_string(cfg.trials) + " trials, censor " + std::to_string(censor));

  const auto rep = fcsd::simulate(cfg);
  if (!f.out.empty()) write_trials(f.out, rep);

  json c;
  echo_detector(c, df);
  c["censor"] = censor;
  c["pre"] = fcsd::to_string(cfg.model.pre);
  c["post"] = fcsd::to_string(cfg.model.post);
  c["change-at"] = cfg.model.change_at ? std::to_string(*cfg.model.change_at) : std::string("inf");
  c["trials"] = cfg.trials;
  c["seed"] = cfg.model.seed;
  c["parallel"] = f.parallel;
  if (!f.out.empty()) c["out"] = f.out;
  json input{{"theta0", cfg.model.theta0()}, {"theta1", cfg.model.theta1()}};
  emit(name, std::move(c), std::move(input), fcsd::to_json(rep), start);
  return 0;
}

// ---------- klinf ----------

struct KlinfFlags {
  std::string dist;
  std::optional<double> theta;
  std::optional<double> delta;
  std::optional<double> theta0_lo;
  std::optional<double> theta0_hi;
};

int cmd_klinf(const KlinfFlags& f) {
  const auto start = Clock::now();
  const auto spec = parse_spec("--dist", f.dist);
  const auto dist = fcsd::discretize(spec);
  json c{{"dist", fcsd::to_string(spec)}};
  json result;
  const bool set_mode = f.theta0_lo || f.theta0_hi;
  if (set_mode) {
    if (!f.theta0_lo || !f.theta0_hi) throw UsageError("K2 needs both --theta0-lo and --theta0-hi");
    if (f.theta || f.delta) throw UsageError("--theta/--delta cannot be combined with --theta0-lo/--theta0-hi");
    if (*f.theta0_lo > *f.theta0_hi) throw UsageError("--theta0-lo exceeds --theta0-hi");
    fcsd::require_unit(*f.theta0_lo, "--theta0-lo");
    fcsd::require_unit(*f.theta0_hi, "--theta0-hi");
    const auto best = fcsd::detail::min_klinf_over(dist, *f.theta0_lo, *f.theta0_hi);
    const double theta = std::clamp(best.theta, fcsd::kEndpointInset, 1.0 - fcsd::kEndpointInset);
    const auto k = fcsd::klinf_dual_solve(dist, theta);
    c["theta0-lo"] = *f.theta0_lo;
    c["theta0-hi"] = *f.theta0_hi;
    result = {{"quantity", "K2"}, {"K", best.value}, {"theta", best.theta}, {"lambda", k.lambda}};
  } else {
    if (!f.theta) throw UsageError("klinf needs --theta or --theta0-lo/--theta0-hi");
    c["theta"] = *f.theta;
    if (f.delta) {
      if (!(*f.delta > 0.0)) throw UsageError("--delta must be positive");
      const double lo = std::max(0.0, *f.theta - *f.delta / 2.0);
      const double hi = std::min(1.0, *f.theta + *f.delta / 2.0);
      const auto best = fcsd::detail::min_klinf_over(dist, lo, hi);
      const double theta = std::clamp(best.theta, fcsd::kEndpointInset, 1.0 - fcsd::kEndpointInset);
      const auto k = fcsd::klinf_dual_solve(dist, theta);
      c["delta"] = *f.delta;
      result = {{"quantity", "K1"}, {"K", best.value}, {"theta", best.theta}, {"lambda", k.lambda}};
    } else {
      const auto k = fcsd::klinf_dual_solve(dist, *f.theta);
      result = {{"quantity", "KL-inf"}, {"K", k.value}, {"theta", *f.theta}, {"lambda", k.lambda}};
    }
  }
  result["units"] = "nats";
  result["approximate"] = dist.approximate;
  log_info("K = " + std::to_string(result["K"].get<double>()) + " nats");
  emit("klinf", std::move(c), json{{"support_size", dist.support.size()}, {"mean", dist.mean()}},
       std::move(result), start);
  return 0;
}

// ---------- validate ----------

struct ValidateFlags {
  std::uint64_t trials = 200;
  std::uint64_t seed = 20240;
  bool inject_off_by_one = false;
};

struct Suite {
  std::string name;
  std::uint64_t runs = 0;
  std::vector<std::uint64_t> failing_seeds;

  json to_json() const {
    return {{"name", name}, {"runs", runs}, {"failures", failing_seeds.size()}, {"failing_seeds", failing_seeds},
            {"passed", failing_seeds.empty()}};
  }
};

struct LordenCase {
  std::vector<double> stream;
  fcsd::DetectorConfig config;
};

LordenCase lorden_case(std::uint64_t seed, bool singleton) {
  fcsd::DrawEngine eng(seed, 0, 0);
  fcsd::DataGenModel m;
  m.pre = fcsd::Bernoulli{eng.uniform()};
  m.post = fcsd::Bernoulli{eng.uniform()};
  const auto len = 10 + static_cast<std::uint64_t>(eng.uniform() * 41.0);
  m.change_at = 1 + static_cast<std::uint64_t>(eng.uniform() * static_cast<double>(len));
  m.seed = seed;
  double a = eng.uniform();
  double b = singleton ? a : eng.uniform();
  if (a > b) std::swap(a, b);
  LordenCase c;
  c.stream = fcsd::gen_stream(m, 1, std::min<std::uint64_t>(len, 50));
  c.config.cs.alpha = seed % 2 ? 0.1 : 0.25;
  c.config.mode = fcsd::Partitioned{{a, b}};
  return c;
}

int cmd_validate(const ValidateFlags& f) {
  const auto start = Clock::now();
  if (f.trials < 1) throw UsageError("--trials must be at least 1");
  const std::uint64_t shift = f.inject_off_by_one ? 1 : 0;

  Suite dom{"stop_domination", 0, {}};
  {
    fcsd::DataGenModel m;
    m.pre = fcsd::Bernoulli{0.5};
    m.seed = f.seed;
    fcsd::DetectorConfig c;
    c.cs.alpha = 0.2;
    for (std::uint64_t t = 0; t < f.trials; ++t) {
      const auto xs = fcsd::gen_stream(m, t, 100);
      auto trace = fcsd::trace_run(c, xs, 0.5, 100);
      if (trace.tau) trace.tau = *trace.tau + shift;
      ++dom.runs;
      if (!fcsd::check_stop_domination(trace) || !fcsd::e_detector_nondecreasing(trace)) {
        dom.failing_seeds.push_back(f.seed + t);
      }
    }
  }

  Suite single{"lorden_equality_singleton", 0, {}};
  Suite order{"lorden_ordering", 0, {}};
  for (std::uint64_t t = 0; t < f.trials; ++t) {
    const std::uint64_t seed = f.seed + t;
    for (const bool singleton : {true, false}) {
      const auto lc = lorden_case(seed, singleton);
      auto det = fcsd::run_stream(lc.config, lc.stream, lc.stream.size()).tau;
      if (det) det = *det + shift;
      const auto lor = fcsd::lorden_tau(lc.config, lc.stream, lc.stream.size());
      if (singleton) {
        ++single.runs;
        if (det != lor) single.failing_seeds.push_back(seed);
      } else {
        ++order.runs;
        if (lor && (!det || *det > *lor)) order.failing_seeds.push_back(seed);
      }
    }
  }

  const std::vector<Suite> suites{dom, single, order};
  bool ok = true;
  json list = json::array();
  for (const auto& s : suites) {
    ok = ok && s.failing_seeds.empty();
    list.push_back(s.to_json());
    log_info(s.name + ": " + std::to_string(s.runs - s.failing_seeds.size()) + "/" + std::to_string(s.runs) +
             " passed");
    for (auto seed : s.failing_seeds) std::cerr << "[fcsd] " << s.name << " failed for seed " << seed << '\n';
  }
  json c{{"trials", f.trials}, {"seed", f.seed}};
  if (f.inject_off_by_one) c["inject-off-by-one"] = true;
  emit("validate", std::move(c), json{{"builtin", true}}, json{{"passed", ok}, {"suites", list}}, start);
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Change detection with repeated forward confidence sequences", "fcsd"};
  app.set_version_flag("--version", std::string(FCSD_VERSION));
  app.set_config("--config", "", "TOML file whose [subcommand] section mirrors the long flags");
  app.require_subcommand(1);
  app.allow_config_extras(CLI::config_extras_mode::error);

  DetectorFlags det_flags;
  DetectFlags detect_flags;
  auto* detect = app.add_subcommand("detect", "Run the detector over a data file");
  detect->add_option("--input", detect_flags.input, "CSV (one value per line, optional header x) or JSONL with field x")
      ->required();
  add_detector_flags(detect, det_flags);
  detect->add_option("--diagnostics", detect_flags.diagnostics, "Per-step CSV: n,lower,upper,active,m_n");
  detect->add_option("--theta0-ref", detect_flags.theta0_ref,
                     "Reference mean for the m_n column (defaults to the middle of the pre-change set)");

  SimFlags sim_flags;
  auto* simulate = app.add_subcommand("simulate", "ARL run without a changepoint, delay run with one");
  add_detector_flags(simulate, det_flags);
  add_sim_flags(simulate, sim_flags, false);
  auto* arl = app.add_subcommand("arl", "Average run length on no-change streams");
  add_detector_flags(arl, det_flags);
  add_sim_flags(arl, sim_flags, false);
  auto* delay = app.add_subcommand("delay", "Detection delay after a changepoint");
  add_detector_flags(delay, det_flags);
  add_sim_flags(delay, sim_flags, true);

  KlinfFlags kl_flags;
  auto* klinf = app.add_subcommand("klinf", "KL-inf information projection in nats");
  klinf->add_option("--dist", kl_flags.dist, std::string("Law: ") + std::string(fcsd::kDistGrammar))->required();
  klinf->add_option("--theta", kl_flags.theta, "Target mean in (0,1)");
  klinf->add_option("--delta", kl_flags.delta, "Minimize over means within delta/2 of --theta");
  klinf->add_option("--theta0-lo", kl_flags.theta0_lo, "Minimize over means in [lo, hi]");
  klinf->add_option("--theta0-hi", kl_flags.theta0_hi, "Minimize over means in [lo, hi]");

  ValidateFlags val_flags;
  auto* validate = app.add_subcommand("validate", "Built-in e-detector and Lorden oracle suites");
  validate->add_option("--trials", val_flags.trials, "Streams per suite")->capture_default_str();
  validate->add_option("--seed", val_flags.seed, "Base seed")->capture_default_str();
  validate->add_flag("--inject-off-by-one", val_flags.inject_off_by_one)->group("");

  try {
    g_log = parse_log_level();
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (detect->parsed()) return cmd_detect(det_flags, detect_flags);
    if (simulate->parsed()) return cmd_sim("simulate", SimKind::Any, det_flags, sim_flags);
    if (arl->parsed()) return cmd_sim("arl", SimKind::Arl, det_flags, sim_flags);
    if (delay->parsed()) return cmd_sim("delay", SimKind::Delay, det_flags, sim_flags);
    if (klinf->parsed()) return cmd_klinf(kl_flags);
    if (validate->parsed()) return cmd_validate(val_flags);
  } catch (const UsageError& e) {
    std::cerr << "fcsd: error: " << e.what() << '\n';
    return 1;
  } catch (const fcsd::Error& e) {
    std::cerr << "fcsd: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
