#pragma once

// Repeated forward-CS change detector.
//
// At step n a fresh CS is started (if the schedule admits n) before X_n is consumed,
// every active CS is updated with X_n, and a change is declared once the intersection
// of all active CS intervals (and of Θ0 in partitioned mode) is empty. Every CS is
// nested, so the intersection of the latest intervals is the full stopping criterion.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fcsd/confseq.hpp"
#include "fcsd/errors.hpp"
#include "fcsd/interval.hpp"

namespace fcsd {

struct NonPartitioned {};

/// Changes are declared relative to a known pre-change parameter set Θ0.
struct Partitioned {
  ParamInterval theta0_set;
};

using DetectorMode = std::variant<NonPartitioned, Partitioned>;

struct EveryStep {};

/// Spawn CSs only at steps ceil(ratio^k), k = 0, 1, ... (duplicates collapsed).
struct Geometric {
  double ratio = 1.5;
};

using SpawnSchedule = std::variant<EveryStep, Geometric>;

enum class Pruning { Off, DominatedInterval };

struct DetectorConfig {
  CsConfig cs;
  DetectorMode mode = NonPartitioned{};
  SpawnSchedule schedule = EveryStep{};
  Pruning pruning = Pruning::Off;

  void validate() const {
    cs.validate();
    if (const auto* p = std::get_if<Partitioned>(&mode)) {
      const auto& t = p->theta0_set;
      if (t.is_empty()) throw ConfigError("partitioned mode needs a nonempty theta0 set");
      if (t.lower < 0.0 || t.upper > 1.0) throw ConfigError("theta0 set must lie inside [0,1]");
    }
    if (const auto* g = std::get_if<Geometric>(&schedule); g && !(g->ratio > 1.0)) {
      throw ConfigError("geometric schedule ratio must exceed 1");
    }
  }

  /// C^(0): the whole parameter space, or Θ0 in partitioned mode.
  ParamInterval base_constraint() const {
    if (const auto* p = std::get_if<Partitioned>(&mode)) return p->theta0_set;
    return ParamInterval::full();
  }

  bool partitioned() const { return std::holds_alternative<Partitioned>(mode); }

  /// EveryStep without pruning: the unoptimized scheme all guarantees are stated for.
  bool exact() const { return std::holds_alternative<EveryStep>(schedule) && pruning == Pruning::Off; }
};

struct StepOutcome {
  bool detected = false;
  std::uint64_t n = 0;
};

/// Intersection of `base` with every interval in `intervals`.
inline ParamInterval global_intersection(const ParamInterval& base, std::span<const ParamInterval> intervals) {
  ParamInterval g = base;
  for (const auto& iv : intervals) g = intersect(g, iv);
  return g;
}

/// Marks intervals that can be removed one after another without changing the intersection
/// with `base`. Entry 0 (the oldest CS) is never marked.
inline std::vector<bool> dominated_mask(const ParamInterval& base, std::span<const ParamInterval> intervals) {
  std::vector<bool> drop(intervals.size(), false);
  const ParamInterval g = global_intersection(base, intervals);
  if (intervals.size() < 2 || g.is_empty()) return drop;
  const double lo = g.lower;
  const double hi = g.upper;
  std::size_t at_lo = base.lower == lo ? 1 : 0;
  std::size_t at_hi = base.upper == hi ? 1 : 0;
  for (const auto& iv : intervals) {
    at_lo += iv.lower == lo;
    at_hi += iv.upper == hi;
  }
  for (std::size_t i = 1; i < intervals.size(); ++i) {
    const auto& iv = intervals[i];
    const bool loose_lo = iv.lower < lo || at_lo >= 2;
    const bool loose_hi = iv.upper > hi || at_hi >= 2;
    if (!(loose_lo && loose_hi)) continue;
    at_lo -= iv.lower == lo;
    at_hi -= iv.upper == hi;
    drop[i] = true;
  }
  return drop;
}

class Detector {
 public:
  explicit Detector(DetectorConfig config)
      : config_((config.validate(), std::move(config))),
        factory_(config_.cs),
        base_(config_.base_constraint()),
        global_(base_) {}

  StepOutcome step(double x) {
    if (tau_) throw StateError("detector already stopped at n=" + std::to_string(*tau_));
    require_unit(x, "observation");
    ++n_;
    if (n_ == next_spawn_) {
      active_.push_back(factory_.make(n_));
      ++spawned_;
      advance_schedule();
    }
    factory_.prepare(x, cache_);
    for (auto& cs : active_) cs.update(x, cache_);
    active_max_ = std::max(active_max_, active_.size());

    ParamInterval g = base_;
    for (const auto& cs : active_) g = intersect(g, cs.interval());
    global_ = g;
    if (global_.is_empty()) {
      tau_ = n_;
      return {true, n_};
    }
    if (config_.pruning == Pruning::DominatedInterval) prune_dominated();
    return {false, n_};
  }

  /// Drops every CS (other than the oldest) whose interval contains the intersection of all
  /// other constraints. Removal leaves the global interval unchanged at this step.
  void prune_dominated() {
    if (active_.size() < 2 || global_.is_empty()) return;
    std::vector<ParamInterval> ivs;
    ivs.reserve(active_.size());
    for (const auto& cs : active_) ivs.push_back(cs.interval());
    const auto drop = dominated_mask(base_, ivs);
    std::size_t i = 0;
    std::erase_if(active_, [&](const ConfidenceSequence&) { return drop[i++]; });
  }

  /// Recomputes the global interval from scratch and compares with the incremental value.
  bool verify_invariants() const {
    ParamInterval g = base_;
    for (const auto& cs : active_) g = intersect(g, cs.interval());
    if (g.is_empty() != global_.is_empty()) return false;
    if (!g.is_empty() && !(g == global_)) return false;
    for (const auto& cs : active_) {
      if (cs.count() != n_ - cs.start_index() + 1) return false;
    }
    return true;
  }

  const DetectorConfig& config() const { return config_; }
  std::uint64_t steps() const { return n_; }
  ParamInterval global() const { return global_; }
  std::optional<std::uint64_t> stopped_at() const { return tau_; }
  bool stopped() const { return tau_.has_value(); }
  const std::vector<ConfidenceSequence>& active() const { return active_; }
  std::uint64_t spawned() const { return spawned_; }
  std::size_t active_max() const { return active_max_; }

  /// The CS started at m = 1, or null before the first step (or if the schedule skipped it).
  const ConfidenceSequence* first_cs() const {
    if (active_.empty() || active_.front().start_index() != 1) return nullptr;
    return &active_.front();
  }

 private:
  void advance_schedule() {
    if (std::holds_alternative<EveryStep>(config_.schedule)) {
      next_spawn_ = n_ + 1;
      return;
    }
    const double r = std::get<Geometric>(config_.schedule).ratio;
    while (next_spawn_ <= n_) {
      ++exponent_;
      next_spawn_ = static_cast<std::uint64_t>(std::ceil(std::pow(r, static_cast<double>(exponent_))));
    }
  }

  DetectorConfig config_;
  CsFactory factory_;
  ParamInterval base_;
  ParamInterval global_;
  std::vector<ConfidenceSequence> active_;
  StepCache cache_;
  std::uint64_t n_ = 0;
  std::uint64_t next_spawn_ = 1;
  std::uint64_t exponent_ = 0;
  std::uint64_t spawned_ = 0;
  std::size_t active_max_ = 0;
  std::optional<std::uint64_t> tau_;
};

inline Detector init_detector(const DetectorConfig& config) { return Detector(config); }

inline void prune_dominated(Detector& state) { state.prune_dominated(); }

struct TraceRecord {
  std::uint64_t n;
  double lower;
  double upper;
  std::size_t active;
};

/// Outcome of one run: exactly one of tau / censored_at is set.
struct DetectionReport {
  std::optional<std::uint64_t> tau;
  std::optional<std::uint64_t> censored_at;
  std::uint64_t n_cs_spawned = 0;
  std::size_t n_cs_active_max = 0;
  std::vector<TraceRecord> trace;
};

/// Feeds `stream` through a fresh detector until detection or `censor` observations.
/// A stream shorter than `censor` is censored at its length.
template <class OnStep>
DetectionReport run_stream(const DetectorConfig& config, std::span<const double> stream,
                           std::uint64_t censor, bool keep_trace, OnStep&& on_step) {
  if (censor < 1) throw ConfigError("censor must be at least 1");
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (!(stream[i] >= 0.0 && stream[i] <= 1.0)) {
      throw DomainError("stream value at index " + std::to_string(i) + " lies outside [0,1]");
    }
  }
  Detector det(config);
  DetectionReport report;
  const std::uint64_t horizon = std::min<std::uint64_t>(censor, stream.size());
  for (std::uint64_t i = 0; i < horizon; ++i) {
    const auto out = det.step(stream[i]);
    on_step(std::as_const(det));
    if (keep_trace) {
      const auto g = det.global();
      report.trace.push_back({out.n, g.lower, g.upper, det.active().size()});
    }
    if (out.detected) {
      report.tau = out.n;
      break;
    }
  }
  if (!report.tau) report.censored_at = horizon;
  report.n_cs_spawned = det.spawned();
  report.n_cs_active_max = det.active_max();
  return report;
}

inline DetectionReport run_stream(const DetectorConfig& config, std::span<const double> stream,
                                  std::uint64_t censor, bool keep_trace = false) {
  return run_stream(config, stream, censor, keep_trace, [](const Detector&) {});
}

}  // namespace fcsd
