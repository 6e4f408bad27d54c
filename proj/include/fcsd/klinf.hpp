#pragma once

// KL-inf: the information projection of a law on [0,1] onto mean-constrained laws,
// computed through its one-dimensional concave dual
//
//   inf { KL(P || Q) : E_Q[X] >= theta } = sup_{0 <= l < 1/(1-theta)} E_P log(1 + l (theta - X))
//   inf { KL(P || Q) : E_Q[X] <= theta } = sup_{0 <= l < 1/theta}     E_P log(1 + l (X - theta))
//
// The second is the first applied to the mirrored law X -> 1 - X.

#include <cmath>
#include <string>

#include "fcsd/confseq.hpp"
#include "fcsd/distributions.hpp"
#include "fcsd/errors.hpp"
#include "fcsd/golden_section.hpp"

namespace fcsd {

enum class Projection {
  /// Onto laws with mean exactly theta: the larger of the two one-sided values.
  MeanEqual,
  MeanAtLeast,
  MeanAtMost,
};

struct KlInf {
  double value = 0.0;
  /// Maximizing bet fraction of the dual objective that produced `value`.
  double lambda = 0.0;
  Projection side = Projection::MeanEqual;
};

inline constexpr double kKlInfTolerance = 1e-10;

inline KlInf klinf_dual_solve(const DiscreteDist& dist, double theta, Projection side = Projection::MeanEqual) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw DomainError("klinf theta must lie in (0,1), got " + std::to_string(theta));
  }
  if (dist.support.empty() || dist.support.size() != dist.weights.size()) {
    throw DomainError("klinf needs a nonempty finite distribution");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < dist.support.size(); ++i) {
    require_unit(dist.support[i], "support point");
    if (!(dist.weights[i] > 0.0)) throw DomainError("klinf weights must be positive");
    total += dist.weights[i];
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("klinf weights must sum to 1");

  if (side == Projection::MeanEqual) {
    const double m = dist.mean();
    if (m == theta) return {0.0, 0.0, Projection::MeanEqual};
    side = m < theta ? Projection::MeanAtLeast : Projection::MeanAtMost;
  }
  // sign = +1: E log(1 + l (theta - X)); sign = -1: E log(1 + l (X - theta)).
  const double sign = side == Projection::MeanAtLeast ? 1.0 : -1.0;
  const double cap = side == Projection::MeanAtLeast ? 1.0 / (1.0 - theta) : 1.0 / theta;
  const auto objective = [&](double lam) {
    double acc = 0.0;
    for (std::size_t i = 0; i < dist.support.size(); ++i) {
      acc += dist.weights[i] * std::log1p(lam * sign * (theta - dist.support[i]));
    }
    return acc;
  };
  const auto best = golden_section_maximize(objective, 0.0, cap - kEndpointInset, kKlInfTolerance);
  if (best.value <= 0.0) return {0.0, 0.0, side};
  return {best.value, best.argmax, side};
}

inline double klinf_dual(const DiscreteDist& dist, double theta, Projection side = Projection::MeanEqual) {
  return klinf_dual_solve(dist, theta, side).value;
}

}  // namespace fcsd
