#pragma once

// Validation oracles built from the ARL argument for the repeated-CS detector.
//
// Every CS started at m carries the e-process E_n^(m) = (1/alpha) 1{n >= m, theta0 not in C_n^(m)};
// their sum M_n is an e-detector. Whenever the detector has stopped (tau <= n), some CS must
// miss theta0, so M_n >= 1/alpha. These functions need the true pre-change mean theta0 and
// therefore only make sense on simulated data.
//
// lorden_tau is the repeated sequential test N*(alpha) = min_m { N^(m)(alpha) + m - 1 }, computed
// from independently built per-start CSs.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fcsd/confseq.hpp"
#include "fcsd/detector.hpp"
#include "fcsd/errors.hpp"
#include "fcsd/interval.hpp"

namespace fcsd {

inline double e_process_value(std::uint64_t m, std::uint64_t n, const ParamInterval& cs_interval,
                              double theta0, double alpha) {
  if (n < m) return 0.0;
  return cs_interval.contains(theta0) ? 0.0 : 1.0 / alpha;
}

inline double e_detector_value(const std::map<std::uint64_t, ParamInterval>& intervals, double theta0,
                               double alpha, std::uint64_t n) {
  std::uint64_t misses = 0;
  for (const auto& [m, iv] : intervals) {
    if (m > n) throw PreconditionError("e_detector_value: CS start index exceeds n");
    misses += e_process_value(m, n, iv, theta0, alpha) > 0.0;
  }
  return static_cast<double>(misses) * (1.0 / alpha);
}

struct EStep {
  std::uint64_t n = 0;
  double m_n = 0.0;
  /// (m, E_n^(m)) for every spawned CS; filled only when requested.
  std::vector<std::pair<std::uint64_t, double>> e_values;
};

struct EDetectorTrace {
  double theta0 = 0.0;
  double alpha = 0.05;
  bool exact = true;
  std::optional<std::uint64_t> tau;
  std::vector<EStep> steps;
};

/// Records M_n after every detector step.
class EDetectorRecorder {
 public:
  EDetectorRecorder(double theta0, const DetectorConfig& config, bool keep_e_values = false)
      : keep_(keep_e_values) {
    trace_.theta0 = theta0;
    trace_.alpha = config.cs.alpha;
    trace_.exact = config.exact();
  }

  void observe(const Detector& det) {
    EStep step;
    step.n = det.steps();
    std::uint64_t misses = 0;
    for (const auto& cs : det.active()) {
      const double e = e_process_value(cs.start_index(), step.n, cs.interval(), trace_.theta0, trace_.alpha);
      misses += e > 0.0;
      if (keep_) step.e_values.emplace_back(cs.start_index(), e);
    }
    step.m_n = static_cast<double>(misses) * (1.0 / trace_.alpha);
    trace_.steps.push_back(std::move(step));
    trace_.tau = det.stopped_at();
  }

  const EDetectorTrace& trace() const { return trace_; }
  EDetectorTrace take() { return std::move(trace_); }

 private:
  EDetectorTrace trace_;
  bool keep_;
};

inline EDetectorTrace trace_run(const DetectorConfig& config, std::span<const double> stream, double theta0,
                                std::uint64_t censor, bool keep_e_values = false) {
  EDetectorRecorder rec(theta0, config, keep_e_values);
  run_stream(config, stream, censor, false, [&](const Detector& d) { rec.observe(d); });
  return rec.take();
}

/// True iff M_n >= 1/alpha at every recorded step with tau <= n.
inline bool check_stop_domination(const EDetectorTrace& trace) {
  if (!trace.exact) {
    throw PreconditionError("stop domination is only established for the exact (every-step, unpruned) scheme");
  }
  if (!trace.tau) return true;
  const double threshold = 1.0 / trace.alpha;
  return std::all_of(trace.steps.begin(), trace.steps.end(),
                     [&](const EStep& s) { return s.n < *trace.tau || s.m_n >= threshold; });
}

/// M_n never decreases along an exact-mode trace (nested CSs that miss theta0 keep missing it).
inline bool e_detector_nondecreasing(const EDetectorTrace& trace) {
  for (std::size_t i = 1; i < trace.steps.size(); ++i) {
    if (trace.steps[i].m_n < trace.steps[i - 1].m_n) return false;
  }
  return true;
}

/// Local stopping time N^(m): first t >= 1 at which the CS on X_m, X_{m+1}, ... is disjoint
/// from Θ0, looking at most `max_local` observations ahead.
inline std::optional<std::uint64_t> local_rejection_time(const CsFactory& factory, std::span<const double> tail,
                                                         const ParamInterval& theta0_set, std::uint64_t start,
                                                         std::uint64_t max_local) {
  auto cs = factory.make(start);
  const std::uint64_t len = std::min<std::uint64_t>(max_local, tail.size());
  for (std::uint64_t t = 1; t <= len; ++t) {
    cs.update(tail[t - 1]);
    if (!cs.interval().intersects(theta0_set)) return t;
  }
  return std::nullopt;
}

/// min over m of N^(m) + m - 1, restricted to global times <= min(censor, stream length).
inline std::optional<std::uint64_t> lorden_tau(const DetectorConfig& config, std::span<const double> stream,
                                               std::uint64_t censor) {
  config.validate();
  const auto* part = std::get_if<Partitioned>(&config.mode);
  if (!part || !config.exact()) {
    throw PreconditionError("lorden_tau needs a partitioned, every-step, unpruned configuration");
  }
  for (double x : stream) require_unit(x, "stream value");
  const CsFactory factory(config.cs);
  const std::uint64_t horizon = std::min<std::uint64_t>(censor, stream.size());
  std::optional<std::uint64_t> best;
  for (std::uint64_t m = 1; m <= horizon; ++m) {
    if (best && m > *best) break;
    const auto local = local_rejection_time(factory, stream.subspan(m - 1), part->theta0_set, m, horizon - m + 1);
    if (local) {
      const std::uint64_t global_time = *local + m - 1;
      if (!best || global_time < *best) best = global_time;
    }
  }
  return best;
}

}  // namespace fcsd
