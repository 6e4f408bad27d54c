#pragma once

// Confidence sequences for the mean of [0,1]-valued observations.
//
// Two families are provided:
//   * the betting CS: C_n = { s : W_n(s) < 1/alpha } with W_n(s) the wealth of
//     a gambler betting against mean s, evaluated on a uniform grid of s;
//   * a fixed-lambda Hoeffding CS with a closed-form radius.
//
// Every state reports its running intersection, so reported intervals are nested.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "fcsd/errors.hpp"
#include "fcsd/golden_section.hpp"
#include "fcsd/interval.hpp"

namespace fcsd {

enum class CsFamily { Betting, Hoeffding };

/// Uniform mixture over `bets` constant bets spread evenly across the admissible range.
struct GridMixture {
  int bets = 5;
};

/// Per-candidate online Newton-style bet, started at zero.
struct AdaptiveNewton {};

/// The same bet for every step (clamped to the admissible range). Mostly useful for tests.
struct FixedBet {
  double lambda = 0.0;
};

using BettingStrategy = std::variant<GridMixture, AdaptiveNewton, FixedBet>;

/// Bets at a grid endpoint s in {0,1} are capped at this magnitude instead of infinity.
inline constexpr double kEndpointBetCap = 1e6;
/// Strategies only use 90% of the admissible bet range so that 1 + lambda (x - s) > 0.
inline constexpr double kBetShrink = 0.9;
inline constexpr double kLogWealthFloor = -745.0;

struct CsConfig {
  double alpha = 0.05;
  CsFamily family = CsFamily::Betting;
  int grid_size = 101;
  BettingStrategy strategy = GridMixture{};
  double hoeffding_lambda0 = 0.5;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw ConfigError("alpha must lie in (0,1), got " + std::to_string(alpha));
    }
    if (family == CsFamily::Betting) {
      if (grid_size < 3) throw ConfigError("grid_size must be at least 3");
      if (const auto* mix = std::get_if<GridMixture>(&strategy); mix && mix->bets < 2) {
        throw ConfigError("a grid mixture needs at least 2 bets");
      }
    } else if (!(hoeffding_lambda0 > 0.0 && hoeffding_lambda0 < 2.0)) {
      throw ConfigError("hoeffding_lambda0 must lie in (0,2)");
    }
  }
};

struct BetRange {
  double lower;
  double upper;
};

/// Admissible bets against candidate mean s: [-1/(1-s), 1/s], endpoints capped.
inline BetRange bet_range(double s) {
  return {s < 1.0 ? -1.0 / (1.0 - s) : -kEndpointBetCap, s > 0.0 ? 1.0 / s : kEndpointBetCap};
}

inline BetRange shrunk_bet_range(double s) {
  const auto r = bet_range(s);
  return {kBetShrink * r.lower, kBetShrink * r.upper};
}

/// The constant component bets of a grid mixture at candidate mean s.
inline std::vector<double> mixture_bets(double s, int k) {
  const auto r = shrunk_bet_range(s);
  std::vector<double> bets(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) bets[j] = r.lower + j * (r.upper - r.lower) / (k - 1);
  return bets;
}

/// One-dimensional online Newton-style bettor for a single candidate mean.
///
/// lambda_{t+1} = clamp(lambda_t - g_t / (1 + sum g^2), shrunk range), where g_t is the
/// derivative of -log(1 + lambda (x_t - s)) at lambda_t.
struct NewtonBettor {
  double lambda = 0.0;
  double sum_g2 = 0.0;

  double bet() const { return lambda; }

  void observe(double x, double s) {
    const double g = -(x - s) / (1.0 + lambda * (x - s));
    sum_g2 += g * g;
    const auto r = shrunk_bet_range(s);
    lambda = std::clamp(lambda - g / (1.0 + sum_g2), r.lower, r.upper);
  }
};

/// Grid of candidate means plus the constant bets of the configured strategy.
/// Immutable and shareable between all CS states that use the same config.
class BetTable {
 public:
  explicit BetTable(const CsConfig& config) : alpha_(config.alpha), strategy_(config.strategy) {
    config.validate();
    const auto g = static_cast<std::size_t>(config.grid_size);
    grid_.resize(g);
    for (std::size_t i = 0; i < g; ++i) grid_[i] = static_cast<double>(i) / static_cast<double>(g - 1);

    if (const auto* mix = std::get_if<GridMixture>(&strategy_)) {
      components_ = static_cast<std::size_t>(mix->bets);
      bets_.reserve(g * components_);
      for (double s : grid_) {
        for (double b : mixture_bets(s, mix->bets)) bets_.push_back(b);
      }
    } else if (const auto* fixed = std::get_if<FixedBet>(&strategy_)) {
      components_ = 1;
      for (double s : grid_) {
        const auto r = shrunk_bet_range(s);
        bets_.push_back(std::clamp(fixed->lambda, r.lower, r.upper));
      }
    } else {
      components_ = 1;
    }
    log_threshold_ = -std::log(alpha_);
    log_components_ = std::log(static_cast<double>(components_));
  }

  std::span<const double> grid() const { return grid_; }
  double spacing() const { return 1.0 / static_cast<double>(grid_.size() - 1); }
  double alpha() const { return alpha_; }
  double log_threshold() const { return log_threshold_; }
  double log_components() const { return log_components_; }
  std::size_t components() const { return components_; }
  bool adaptive() const { return std::holds_alternative<AdaptiveNewton>(strategy_); }

  /// Constant bets at grid point i (empty for the adaptive strategy).
  std::span<const double> bets(std::size_t i) const {
    if (adaptive()) return {};
    return std::span<const double>(bets_).subspan(i * components_, components_);
  }

  /// Per-(grid point, component) log-wealth increments for observation x.
  /// Only meaningful for constant-bet strategies.
  void increments(double x, std::vector<double>& out) const {
    out.resize(bets_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      const double d = x - grid_[i];
      for (std::size_t j = 0; j < components_; ++j) {
        out[i * components_ + j] = std::log1p(bets_[i * components_ + j] * d);
      }
    }
  }

 private:
  double alpha_;
  BettingStrategy strategy_;
  std::vector<double> grid_;
  std::vector<double> bets_;
  std::size_t components_ = 1;
  double log_threshold_ = 0.0;
  double log_components_ = 0.0;
};

/// Log of the mixture wealth (average of exp(component log-wealths)).
inline double mixture_log_wealth(std::span<const double> component_log_wealth) {
  const double m = *std::max_element(component_log_wealth.begin(), component_log_wealth.end());
  double acc = 0.0;
  for (double v : component_log_wealth) acc += std::exp(v - m);
  return m + std::log(acc / static_cast<double>(component_log_wealth.size()));
}

/// Betting confidence sequence started at `start_index`.
class BettingCs {
 public:
  BettingCs(std::shared_ptr<const BetTable> table, std::uint64_t start_index)
      : table_(std::move(table)), start_(start_index) {
    const std::size_t g = table_->grid().size();
    log_wealth_.assign(g * table_->components(), 0.0);
    if (table_->adaptive()) bettors_.assign(g, NewtonBettor{});
  }

  BettingCs(const CsConfig& config, std::uint64_t start_index)
      : BettingCs(std::make_shared<const BetTable>(config), start_index) {}

  /// Consumes one observation, computing the wealth increments locally.
  void update(double x) {
    require_unit(x, "observation");
    if (table_->adaptive()) {
      const auto grid = table_->grid();
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double lam = bettors_[i].bet();
        log_wealth_[i] = std::max(log_wealth_[i] + std::log1p(lam * (x - grid[i])), kLogWealthFloor);
        bettors_[i].observe(x, grid[i]);
      }
    } else {
      table_->increments(x, scratch_);
      accumulate(scratch_);
    }
    ++count_;
    refresh_interval();
  }

  /// Consumes one observation whose increments were precomputed with BetTable::increments
  /// on the same table. Falls back to update(x) for the adaptive strategy.
  void update(double x, std::span<const double> increments) {
    if (table_->adaptive() || increments.empty()) return update(x);
    require_unit(x, "observation");
    accumulate(increments);
    ++count_;
    refresh_interval();
  }

  ParamInterval interval() const { return current_; }
  std::uint64_t start_index() const { return start_; }
  std::uint64_t count() const { return count_; }
  const BetTable& table() const { return *table_; }

  /// log W_n(s) at grid point i (mixture-averaged for the grid mixture).
  double log_wealth(std::size_t i) const {
    const auto comps = component_log_wealth(i);
    return comps.size() == 1 ? comps[0] : mixture_log_wealth(comps);
  }

  std::span<const double> component_log_wealth(std::size_t i) const {
    const std::size_t k = table_->components();
    return std::span<const double>(log_wealth_).subspan(i * k, k);
  }

  /// Bet that will be placed on the next observation at grid point i, component j.
  double next_bet(std::size_t i, std::size_t j = 0) const {
    return table_->adaptive() ? bettors_[i].bet() : table_->bets(i)[j];
  }

 private:
  void accumulate(std::span<const double> inc) {
    for (std::size_t idx = 0; idx < log_wealth_.size(); ++idx) {
      log_wealth_[idx] = std::max(log_wealth_[idx] + inc[idx], kLogWealthFloor);
    }
  }

  bool excluded(std::size_t i) const {
    const double thr = table_->log_threshold();
    const auto comps = component_log_wealth(i);
    if (comps.size() == 1) return comps[0] >= thr;
    const double m = *std::max_element(comps.begin(), comps.end());
    if (m < thr) return false;
    if (m - table_->log_components() >= thr) return true;
    return mixture_log_wealth(comps) >= thr;
  }

  // Hull of the surviving grid points, widened by one spacing on each side, intersected
  // with the previous interval.
  void refresh_interval() {
    if (current_.is_empty()) return;
    const auto grid = table_->grid();
    std::size_t lo = 0;
    while (lo < grid.size() && excluded(lo)) ++lo;
    if (lo == grid.size()) {
      current_ = ParamInterval::empty();
      return;
    }
    std::size_t hi = grid.size() - 1;
    while (hi > lo && excluded(hi)) --hi;
    const double h = table_->spacing();
    const ParamInterval hull{std::max(0.0, grid[lo] - h), std::min(1.0, grid[hi] + h)};
    current_ = intersect(current_, hull);
  }

  std::shared_ptr<const BetTable> table_;
  std::uint64_t start_;
  std::uint64_t count_ = 0;
  std::vector<double> log_wealth_;
  std::vector<NewtonBettor> bettors_;
  std::vector<double> scratch_;
  ParamInterval current_ = ParamInterval::full();
};

/// Radius of the fixed-lambda Hoeffding CS after n observations.
inline double hoeffding_half_width(double alpha, double lambda0, std::uint64_t n) {
  if (n == 0) return std::numeric_limits<double>::infinity();
  const double nn = static_cast<double>(n);
  return (std::log(2.0 / alpha) + nn * lambda0 * lambda0 / 8.0) / (nn * lambda0);
}

class HoeffdingCs {
 public:
  HoeffdingCs(const CsConfig& config, std::uint64_t start_index)
      : alpha_(config.alpha), lambda0_(config.hoeffding_lambda0), start_(start_index) {
    config.validate();
  }

  void update(double x) {
    require_unit(x, "observation");
    sum_ += x;
    ++count_;
    if (current_.is_empty()) return;
    const double mean = sum_ / static_cast<double>(count_);
    const double h = hoeffding_half_width(alpha_, lambda0_, count_);
    const ParamInterval raw{std::max(0.0, mean - h), std::min(1.0, mean + h)};
    current_ = intersect(current_, raw);
  }

  ParamInterval interval() const { return current_; }
  std::uint64_t start_index() const { return start_; }
  std::uint64_t count() const { return count_; }
  double running_sum() const { return sum_; }

 private:
  double alpha_;
  double lambda0_;
  std::uint64_t start_;
  std::uint64_t count_ = 0;
  double sum_ = 0.0;
  ParamInterval current_ = ParamInterval::full();
};

/// Per-step data shared by every CS built from the same factory.
struct StepCache {
  std::vector<double> increments;
};

/// A CS of either family, with value semantics.
class ConfidenceSequence {
 public:
  explicit ConfidenceSequence(BettingCs cs) : impl_(std::move(cs)) {}
  explicit ConfidenceSequence(HoeffdingCs cs) : impl_(std::move(cs)) {}

  void update(double x) {
    std::visit([x](auto& cs) { cs.update(x); }, impl_);
  }

  void update(double x, const StepCache& cache) {
    if (auto* b = std::get_if<BettingCs>(&impl_)) {
      b->update(x, cache.increments);
    } else {
      std::get<HoeffdingCs>(impl_).update(x);
    }
  }

  ParamInterval interval() const {
    return std::visit([](const auto& cs) { return cs.interval(); }, impl_);
  }
  std::uint64_t start_index() const {
    return std::visit([](const auto& cs) { return cs.start_index(); }, impl_);
  }
  std::uint64_t count() const {
    return std::visit([](const auto& cs) { return cs.count(); }, impl_);
  }

  const BettingCs* betting() const { return std::get_if<BettingCs>(&impl_); }
  const HoeffdingCs* hoeffding() const { return std::get_if<HoeffdingCs>(&impl_); }

 private:
  std::variant<BettingCs, HoeffdingCs> impl_;
};

/// Builds CS states for one config, sharing the grid and bet table between them.
class CsFactory {
 public:
  explicit CsFactory(CsConfig config) : config_(std::move(config)) {
    config_.validate();
    if (config_.family == CsFamily::Betting) table_ = std::make_shared<const BetTable>(config_);
  }

  const CsConfig& config() const { return config_; }

  ConfidenceSequence make(std::uint64_t start_index) const {
    if (start_index < 1) throw ConfigError("CS start index must be positive");
    if (table_) return ConfidenceSequence(BettingCs(table_, start_index));
    return ConfidenceSequence(HoeffdingCs(config_, start_index));
  }

  /// Precomputes the increments for x when the strategy allows sharing them.
  void prepare(double x, StepCache& cache) const {
    if (table_ && !table_->adaptive()) {
      table_->increments(x, cache.increments);
    } else {
      cache.increments.clear();
    }
  }

 private:
  CsConfig config_;
  std::shared_ptr<const BetTable> table_;
};

/// Fresh level-(1 - alpha) CS starting at `start_index`, covering [0,1].
inline ConfidenceSequence new_cs(const CsConfig& config, std::uint64_t start_index) {
  return CsFactory(config).make(start_index);
}

/// Deterministic upper bound on the CS width after n observations, clipped to diam [0,1].
inline double width_envelope(const CsConfig& config, std::uint64_t n) {
  if (n == 0) return 1.0;
  const double nn = static_cast<double>(n);
  if (config.family == CsFamily::Betting) {
    return std::min(1.0, 4.0 * std::sqrt(std::log(nn / config.alpha) / nn));
  }
  return std::min(1.0, 2.0 * hoeffding_half_width(config.alpha, config.hoeffding_lambda0, n));
}

inline constexpr double kZStatTolerance = 1e-9;
inline constexpr double kEndpointInset = 1e-9;

/// Z_n(theta) = sup over lambda in [0, 1/(1-theta)) of sum_t log(1 + lambda (theta - x_t)).
inline double z_stat(std::span<const double> xs, double theta) {
  if (xs.empty()) throw DomainError("z_stat needs at least one observation");
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("z_stat theta must lie in (0,1)");
  for (double x : xs) require_unit(x, "observation");
  const auto objective = [&](double lam) {
    double acc = 0.0;
    for (double x : xs) acc += std::log1p(lam * (theta - x));
    return acc;
  };
  const double hi = 1.0 / (1.0 - theta) - kEndpointInset;
  return golden_section_maximize(objective, 0.0, hi, kZStatTolerance).value;
}

}  // namespace fcsd
