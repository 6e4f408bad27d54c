#pragma once

#include <charconv>
#include <cmath>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fcsd/errors.hpp"
#include "fcsd/philox.hpp"

namespace fcsd {

struct Bernoulli {
  double p;
};
struct Beta {
  double a;
  double b;
};
/// Value x0 with probability 1 - w, value x1 with probability w.
struct TwoPoint {
  double x0;
  double x1;
  double w;
};
struct Constant {
  double c;
};

using DistSpec = std::variant<Bernoulli, Beta, TwoPoint, Constant>;

inline constexpr std::string_view kDistGrammar = "bernoulli:p | beta:a,b | twopoint:x0,x1,w | const:c";

inline void validate(const DistSpec& d) {
  std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Bernoulli>) {
          require_unit(v.p, "bernoulli p");
        } else if constexpr (std::is_same_v<T, Beta>) {
          if (!(v.a > 0.0 && v.b > 0.0 && std::isfinite(v.a) && std::isfinite(v.b))) {
            throw DomainError("beta parameters must be positive");
          }
        } else if constexpr (std::is_same_v<T, TwoPoint>) {
          require_unit(v.x0, "twopoint x0");
          require_unit(v.x1, "twopoint x1");
          require_unit(v.w, "twopoint w");
        } else {
          require_unit(v.c, "const c");
        }
      },
      d);
}

inline double mean(const DistSpec& d) {
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Bernoulli>) return v.p;
        else if constexpr (std::is_same_v<T, Beta>) return v.a / (v.a + v.b);
        else if constexpr (std::is_same_v<T, TwoPoint>) return (1.0 - v.w) * v.x0 + v.w * v.x1;
        else return v.c;
      },
      d);
}

inline double sample(const DistSpec& d, DrawEngine& eng) {
  return std::visit(
      [&eng](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Bernoulli>) {
          return eng.uniform() < v.p ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, Beta>) {
          std::gamma_distribution<double> ga(v.a, 1.0);
          std::gamma_distribution<double> gb(v.b, 1.0);
          const double x = ga(eng);
          const double y = gb(eng);
          return x + y > 0.0 ? x / (x + y) : 0.5;
        } else if constexpr (std::is_same_v<T, TwoPoint>) {
          return eng.uniform() < v.w ? v.x1 : v.x0;
        } else {
          return v.c;
        }
      },
      d);
}

/// Finite-support distribution on [0,1].
struct DiscreteDist {
  std::vector<double> support;
  std::vector<double> weights;
  /// Set when the support is a quadrature grid rather than the exact law.
  bool approximate = false;

  double mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) m += weights[i] * support[i];
    return m;
  }
};

inline constexpr int kBetaQuadraturePoints = 1001;

/// Exact support for Bernoulli / TwoPoint / Constant; a midpoint grid for Beta.
inline DiscreteDist discretize(const DistSpec& d) {
  validate(d);
  DiscreteDist out;
  if (const auto* b = std::get_if<Bernoulli>(&d)) {
    out.support = {0.0, 1.0};
    out.weights = {1.0 - b->p, b->p};
  } else if (const auto* t = std::get_if<TwoPoint>(&d)) {
    out.support = {t->x0, t->x1};
    out.weights = {1.0 - t->w, t->w};
  } else if (const auto* c = std::get_if<Constant>(&d)) {
    out.support = {c->c};
    out.weights = {1.0};
  } else {
    const auto& be = std::get<Beta>(d);
    out.approximate = true;
    double total = 0.0;
    for (int i = 0; i < kBetaQuadraturePoints; ++i) {
      const double x = (i + 0.5) / kBetaQuadraturePoints;
      const double w = std::exp((be.a - 1.0) * std::log(x) + (be.b - 1.0) * std::log1p(-x));
      out.support.push_back(x);
      out.weights.push_back(w);
      total += w;
    }
    for (double& w : out.weights) w /= total;
  }
  // Drop zero-weight atoms.
  std::vector<double> s, w;
  for (std::size_t i = 0; i < out.support.size(); ++i) {
    if (out.weights[i] > 0.0) {
      s.push_back(out.support[i]);
      w.push_back(out.weights[i]);
    }
  }
  out.support = std::move(s);
  out.weights = std::move(w);
  return out;
}

namespace detail {

inline std::vector<double> parse_numbers(std::string_view body, std::string_view spec) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = body.find(',', pos);
    const std::string_view field = body.substr(pos, comma == std::string_view::npos ? body.npos : comma - pos);
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
      throw DomainError("malformed distribution spec '" + std::string(spec) + "'; expected " +
                        std::string(kDistGrammar));
    }
    values.push_back(v);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return values;
}

/// Shortest decimal form that parses back to the same double.
inline std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

inline DistSpec parse_dist(std::string_view spec) {
  const std::size_t colon = spec.find(':');
  const auto bad = [&] {
    return DomainError("malformed distribution spec '" + std::string(spec) + "'; expected " +
                       std::string(kDistGrammar));
  };
  if (colon == std::string_view::npos) throw bad();
  const std::string_view kind = spec.substr(0, colon);
  const auto nums = detail::parse_numbers(spec.substr(colon + 1), spec);
  DistSpec d;
  if (kind == "bernoulli" && nums.size() == 1) d = Bernoulli{nums[0]};
  else if (kind == "beta" && nums.size() == 2) d = Beta{nums[0], nums[1]};
  else if (kind == "twopoint" && nums.size() == 3) d = TwoPoint{nums[0], nums[1], nums[2]};
  else if (kind == "const" && nums.size() == 1) d = Constant{nums[0]};
  else throw bad();
  validate(d);
  return d;
}

inline std::string to_string(const DistSpec& d) {
  using detail::format_number;
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Bernoulli>) return "bernoulli:" + format_number(v.p);
        else if constexpr (std::is_same_v<T, Beta>) return "beta:" + format_number(v.a) + "," + format_number(v.b);
        else if constexpr (std::is_same_v<T, TwoPoint>)
          return "twopoint:" + format_number(v.x0) + "," + format_number(v.x1) + "," + format_number(v.w);
        else return "const:" + format_number(v.c);
      },
      d);
}

}  // namespace fcsd
