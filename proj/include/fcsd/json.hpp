#pragma once

// JSON encoding of detection and simulation reports. NaN fields encode as null.

#include <cmath>
#include <optional>

#include <json.hpp>

#include "fcsd/detector.hpp"
#include "fcsd/simharness.hpp"

namespace fcsd {

namespace detail {

template <class T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline nlohmann::json number_or_null(double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); }

}  // namespace detail

inline nlohmann::json to_json(const DetectionReport& r) {
  nlohmann::json j{
      {"tau", detail::optional_json(r.tau)},
      {"censored_at", detail::optional_json(r.censored_at)},
      {"n_cs_spawned", r.n_cs_spawned},
      {"n_cs_active_max", r.n_cs_active_max},
  };
  if (!r.trace.empty()) {
    auto& trace = j["trace"] = nlohmann::json::array();
    for (const auto& t : r.trace) {
      trace.push_back({{"n", t.n}, {"global_lower", t.lower}, {"global_upper", t.upper}, {"active", t.active}});
    }
  }
  return j;
}

inline nlohmann::json to_json(const TheoryValues& t) {
  nlohmann::json j{
      {"gap", t.gap},
      {"u", detail::optional_json(t.u)},
      {"delay_bound", detail::optional_json(t.delay_bound)},
      {"K1", detail::optional_json(t.k1)},
      {"K2", detail::optional_json(t.k2)},
      {"K_approximate", t.k_approximate},
  };
  if (!t.note.empty()) j["note"] = t.note;
  return j;
}

inline nlohmann::json to_json(const SimReport& r) {
  using detail::number_or_null;
  return {
      {"kind", r.kind},
      {"trials", r.trials},
      {"censor", r.censor},
      {"arl_censored_mean", number_or_null(r.arl_censored_mean)},
      {"arl_censored_fraction", number_or_null(r.arl_censored_fraction)},
      {"delay_mean_conditional", number_or_null(r.delay_mean_conditional)},
      {"delay_mean_unconditional", number_or_null(r.delay_mean_unconditional)},
      {"good_event_rate", number_or_null(r.good_event_rate)},
      {"detection_rate", number_or_null(r.detection_rate)},
      {"degenerate_delta", r.degenerate_delta},
      {"theory", r.theory ? to_json(*r.theory) : nlohmann::json(nullptr)},
      {"domination_checked", r.domination_checked},
      {"domination_violations", r.domination_violations},
      {"monotonicity_violations", r.monotonicity_violations},
      {"empty_categories", r.empty_categories},
  };
}

}  // namespace fcsd
