#pragma once

// Monte-Carlo harness: synthetic streams, ARL and detection-delay estimation, and the
// theoretical delay quantities (u, 3u/(1-alpha), K1, K2) the estimates are compared with.
//
// Bias directions of the censored estimators:
//   * arl_censored_mean averages min(tau, censor), so it underestimates E[tau] under no change;
//   * delay_mean_unconditional counts a censored run as (censor - T), an underestimate of its delay;
//   * delay_mean_conditional only averages runs that detected and satisfied the good event.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fcsd/confseq.hpp"
#include "fcsd/detector.hpp"
#include "fcsd/distributions.hpp"
#include "fcsd/edetector.hpp"
#include "fcsd/errors.hpp"
#include "fcsd/klinf.hpp"
#include "fcsd/parallel.hpp"
#include "fcsd/philox.hpp"

namespace fcsd {

struct DataGenModel {
  DistSpec pre = Bernoulli{0.5};
  DistSpec post = Bernoulli{0.5};
  /// Last pre-change index T; X_1..X_T follow `pre`. nullopt means no change.
  std::optional<std::uint64_t> change_at;
  std::uint64_t seed = 1;

  double theta0() const { return mean(pre); }
  double theta1() const { return mean(post); }
};

/// X_1..X_horizon for one trial; draw i depends only on (seed, trial, i).
inline std::vector<double> gen_stream(const DataGenModel& model, std::uint64_t trial, std::uint64_t horizon) {
  validate(model.pre);
  validate(model.post);
  std::vector<double> xs(horizon);
  for (std::uint64_t i = 0; i < horizon; ++i) {
    DrawEngine eng(model.seed, trial, static_cast<std::uint32_t>(i));
    const bool before = !model.change_at || i < *model.change_at;
    xs[i] = sample(before ? model.pre : model.post, eng);
  }
  return xs;
}

struct SimConfig {
  DataGenModel model;
  DetectorConfig detector;
  std::uint64_t trials = 100;
  /// nullopt selects the default censoring policy (see default_censor).
  std::optional<std::uint64_t> censor;
  unsigned parallelism = 0;
  bool keep_trials = false;
};

inline std::uint64_t inverse_alpha_ceil(double alpha) {
  return static_cast<std::uint64_t>(std::ceil(1.0 / alpha - 1e-12));
}

/// 20 ceil(1/alpha) for ARL runs, max(50 ceil(1/alpha), 10 T) for delay runs.
inline std::uint64_t default_censor(const SimConfig& cfg) {
  const std::uint64_t inv = inverse_alpha_ceil(cfg.detector.cs.alpha);
  if (!cfg.model.change_at) return 20 * inv;
  return std::max(50 * inv, 10 * *cfg.model.change_at);
}

inline std::uint64_t resolved_censor(const SimConfig& cfg) {
  const std::uint64_t c = cfg.censor.value_or(default_censor(cfg));
  if (c < 1) throw ConfigError("censor must be at least 1");
  return c;
}

struct DelayBound {
  std::uint64_t u = 0;
  double bound = 0.0;
};

inline constexpr std::uint64_t kMaxDelayScan = 100'000'000;

/// u = min{ n >= 1 : w(T) + w(n) < gap } (w(T) omitted when T is not given) and 3u/(1-alpha).
inline DelayBound theoretical_delay_bound(const CsConfig& cs, double d_gap, std::optional<std::uint64_t> T) {
  cs.validate();
  if (!(d_gap > 0.0)) throw DomainError("delay bound needs a positive parameter gap");
  const double offset = T ? width_envelope(cs, *T) : 0.0;
  if (T && offset >= d_gap) {
    throw ConfigError("changepoint too early: envelope width at T=" + std::to_string(*T) + " (" +
                      std::to_string(offset) + ") is not below the gap " + std::to_string(d_gap));
  }
  if (cs.family == CsFamily::Hoeffding) {
    // The fixed-lambda radius tends to lambda0/8, so the envelope never drops below lambda0/4.
    if (d_gap - offset <= cs.hoeffding_lambda0 / 4.0) {
      throw ConfigError("gap is below the width floor of the fixed-lambda Hoeffding CS");
    }
  }
  for (std::uint64_t n = 1; n <= kMaxDelayScan; ++n) {
    if (offset + width_envelope(cs, n) < d_gap) {
      return {n, 3.0 * static_cast<double>(n) / (1.0 - cs.alpha)};
    }
  }
  throw ConfigError("no n below " + std::to_string(kMaxDelayScan) + " satisfies the width condition");
}

struct KConstants {
  double k1 = std::numeric_limits<double>::quiet_NaN();
  double k1_theta = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> k2;
  std::optional<double> k2_theta;
  bool approximate = false;
};

inline constexpr int kKGridPoints = 101;

namespace detail {

struct GridMin {
  double value;
  double theta;
};

inline GridMin min_klinf_over(const DiscreteDist& dist, double lo, double hi) {
  GridMin best{std::numeric_limits<double>::infinity(), lo};
  for (int i = 0; i < kKGridPoints; ++i) {
    const double raw = lo + (hi - lo) * i / (kKGridPoints - 1);
    const double theta = std::clamp(raw, kEndpointInset, 1.0 - kEndpointInset);
    const double k = klinf_dual(dist, theta);
    if (k < best.value) best = {k, raw};
  }
  return best;
}

}  // namespace detail

/// K1 = min over theta within delta/2 of the pre-change mean, K2 = min over theta in Θ0,
/// of KL-inf(post, theta). Both use 101-point theta grids.
inline KConstants k_constants(const DataGenModel& model, std::optional<ParamInterval> theta0_set, double delta) {
  const DiscreteDist post = discretize(model.post);
  KConstants out;
  out.approximate = post.approximate;
  const double theta0 = model.theta0();
  const double lo = std::max(0.0, theta0 - delta / 2.0);
  const double hi = std::min(1.0, theta0 + delta / 2.0);
  const auto k1 = detail::min_klinf_over(post, lo, hi);
  out.k1 = k1.value;
  out.k1_theta = k1.theta;
  if (theta0_set) {
    if (theta0_set->is_empty()) throw ConfigError("theta0 set must be nonempty");
    const auto k2 = detail::min_klinf_over(post, theta0_set->lower, theta0_set->upper);
    out.k2 = k2.value;
    out.k2_theta = k2.theta;
  }
  return out;
}

/// Distance from theta to the closest point of `set`.
inline double distance_to(const ParamInterval& set, double theta) {
  if (set.contains(theta)) return 0.0;
  return theta < set.lower ? set.lower - theta : theta - set.upper;
}

struct TheoryValues {
  double gap = 0.0;
  std::optional<std::uint64_t> u;
  std::optional<double> delay_bound;
  std::optional<double> k1;
  std::optional<double> k2;
  bool k_approximate = false;
  std::string note;
};

struct TrialRecord {
  std::uint64_t trial = 0;
  std::optional<std::uint64_t> tau;
  /// min(tau, censor)
  std::uint64_t run_length = 0;
  /// (tau - T)^+, or censor - T for censored delay runs
  std::optional<std::uint64_t> delay;
  std::optional<bool> good_event;
  bool domination_ok = true;
  bool e_detector_monotone = true;
};

struct SimReport {
  std::string kind;
  std::uint64_t trials = 0;
  std::uint64_t censor = 0;
  double arl_censored_mean = std::numeric_limits<double>::quiet_NaN();
  double arl_censored_fraction = std::numeric_limits<double>::quiet_NaN();
  double delay_mean_conditional = std::numeric_limits<double>::quiet_NaN();
  double delay_mean_unconditional = std::numeric_limits<double>::quiet_NaN();
  double good_event_rate = std::numeric_limits<double>::quiet_NaN();
  double detection_rate = std::numeric_limits<double>::quiet_NaN();
  bool degenerate_delta = false;
  std::optional<TheoryValues> theory;
  bool domination_checked = false;
  std::uint64_t domination_violations = 0;
  std::uint64_t monotonicity_violations = 0;
  /// Names of fields left NaN because no trial fell in their category.
  std::vector<std::string> empty_categories;
  std::vector<TrialRecord> per_trial;
};

namespace detail {

inline TrialRecord run_trial(const SimConfig& cfg, std::uint64_t trial, std::uint64_t censor) {
  const auto& model = cfg.model;
  const std::uint64_t horizon = model.change_at ? std::max(censor, *model.change_at) : censor;
  const auto xs = gen_stream(model, trial, horizon);
  const double theta0 = model.theta0();
  const double alpha = cfg.detector.cs.alpha;
  const bool track = cfg.detector.exact();

  TrialRecord rec;
  rec.trial = trial;
  Detector det(cfg.detector);
  std::uint64_t prev_misses = 0;
  for (std::uint64_t i = 0; i < censor; ++i) {
    const auto out = det.step(xs[i]);
    if (track) {
      std::uint64_t misses = 0;
      for (const auto& cs : det.active()) {
        misses += e_process_value(cs.start_index(), out.n, cs.interval(), theta0, alpha) > 0.0;
      }
      if (misses < prev_misses) rec.e_detector_monotone = false;
      prev_misses = misses;
      const double m_n = static_cast<double>(misses) * (1.0 / alpha);
      if (out.detected && m_n < 1.0 / alpha) rec.domination_ok = false;
    }
    if (model.change_at && out.n == *model.change_at) {
      rec.good_event = det.first_cs()->interval().contains(theta0);
    }
    if (out.detected) {
      rec.tau = out.n;
      break;
    }
  }
  rec.run_length = rec.tau.value_or(censor);

  if (model.change_at) {
    const std::uint64_t T = *model.change_at;
    if (!rec.good_event) {
      // Stopped (or censored) before T: continue the first CS alone up to T.
      ConfidenceSequence first = *det.first_cs();
      for (std::uint64_t i = det.steps(); i < T; ++i) first.update(xs[i]);
      rec.good_event = first.interval().contains(theta0);
    }
    if (rec.tau) rec.delay = *rec.tau > T ? *rec.tau - T : 0;
    else rec.delay = censor > T ? censor - T : 0;
  }
  return rec;
}

inline std::vector<TrialRecord> run_trials(const SimConfig& cfg, std::uint64_t censor) {
  if (cfg.trials < 1) throw ConfigError("trials must be at least 1");
  cfg.detector.validate();
  std::vector<TrialRecord> records(cfg.trials);
  parallel_for(cfg.trials, cfg.parallelism, [&](std::size_t i) { records[i] = run_trial(cfg, i, censor); });
  return records;
}

inline void summarize_run_lengths(SimReport& rep, const std::vector<TrialRecord>& records) {
  double sum = 0.0;
  std::uint64_t censored = 0;
  std::uint64_t bad_dom = 0;
  std::uint64_t bad_mono = 0;
  for (const auto& r : records) {
    sum += static_cast<double>(r.run_length);
    censored += !r.tau;
    bad_dom += !r.domination_ok;
    bad_mono += !r.e_detector_monotone;
  }
  const double n = static_cast<double>(records.size());
  rep.arl_censored_mean = sum / n;
  rep.arl_censored_fraction = static_cast<double>(censored) / n;
  rep.detection_rate = 1.0 - rep.arl_censored_fraction;
  rep.domination_violations = bad_dom;
  rep.monotonicity_violations = bad_mono;
}

}  // namespace detail

/// No-change runs: mean of min(tau, censor), a lower bound on the ARL.
inline SimReport estimate_arl(const SimConfig& cfg) {
  if (cfg.model.change_at) throw ConfigError("estimate_arl needs a model without a changepoint");
  const std::uint64_t censor = resolved_censor(cfg);
  auto records = detail::run_trials(cfg, censor);

  SimReport rep;
  rep.kind = "arl";
  rep.trials = cfg.trials;
  rep.censor = censor;
  rep.domination_checked = cfg.detector.exact();
  detail::summarize_run_lengths(rep, records);
  rep.empty_categories = {"delay_mean_conditional", "delay_mean_unconditional", "good_event_rate"};
  if (cfg.keep_trials) rep.per_trial = std::move(records);
  return rep;
}

/// Theory values for a delay scenario; failures to meet a bound's precondition end up in `note`.
inline TheoryValues delay_theory(const SimConfig& cfg) {
  const auto& model = cfg.model;
  const auto& det = cfg.detector;
  TheoryValues th;
  const double theta0 = model.theta0();
  const double theta1 = model.theta1();
  std::optional<ParamInterval> theta0_set;
  if (const auto* p = std::get_if<Partitioned>(&det.mode)) theta0_set = p->theta0_set;
  th.gap = theta0_set ? distance_to(*theta0_set, theta1) : std::abs(theta1 - theta0);
  try {
    const auto b = theoretical_delay_bound(det.cs, th.gap, theta0_set ? std::nullopt : model.change_at);
    th.u = b.u;
    th.delay_bound = b.bound;
  } catch (const Error& e) {
    th.note = e.what();
  }
  const auto k = k_constants(model, theta0_set, std::abs(theta1 - theta0));
  th.k1 = k.k1;
  th.k2 = k.k2;
  th.k_approximate = k.approximate;
  return th;
}

inline SimReport estimate_delay(const SimConfig& cfg) {
  if (!cfg.model.change_at) throw ConfigError("estimate_delay needs a finite changepoint");
  const std::uint64_t censor = resolved_censor(cfg);
  auto records = detail::run_trials(cfg, censor);

  SimReport rep;
  rep.kind = "delay";
  rep.trials = cfg.trials;
  rep.censor = censor;
  rep.domination_checked = cfg.detector.exact();
  detail::summarize_run_lengths(rep, records);
  rep.degenerate_delta = cfg.model.theta0() == cfg.model.theta1();

  double cond_sum = 0.0, all_sum = 0.0;
  std::uint64_t cond_n = 0, good = 0;
  for (const auto& r : records) {
    all_sum += static_cast<double>(*r.delay);
    good += *r.good_event;
    if (*r.good_event && r.tau) {
      cond_sum += static_cast<double>(*r.delay);
      ++cond_n;
    }
  }
  const double n = static_cast<double>(records.size());
  rep.delay_mean_unconditional = all_sum / n;
  rep.good_event_rate = static_cast<double>(good) / n;
  if (cond_n > 0) rep.delay_mean_conditional = cond_sum / static_cast<double>(cond_n);
  else rep.empty_categories.push_back("delay_mean_conditional");

  if (!rep.degenerate_delta) rep.theory = delay_theory(cfg);
  if (cfg.keep_trials) rep.per_trial = std::move(records);
  return rep;
}

/// ARL estimate for no-change models, delay estimate otherwise.
inline SimReport simulate(const SimConfig& cfg) {
  return cfg.model.change_at ? estimate_delay(cfg) : estimate_arl(cfg);
}

}  // namespace fcsd
