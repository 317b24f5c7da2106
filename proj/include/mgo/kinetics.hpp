#pragma once

// Closed-form evaluation of the generalized compounding law
//
//     dc/dt = i * c^p
//
// where i is the continuous rate and p the growth order. The solution is
//
//     c(t) = c0 * exp(i*t)                          for p = 1
//     c(t) = [c0^(1-p) + (1-p)*i*t]^(1/(1-p))       otherwise
//
// with a finite-time singularity at t* = c0^(1-p) / ((p-1)*i) when p > 1.
// The p != 1 branch is evaluated in log space (expm1/log1p) so it stays
// accurate as p -> 1.

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "mgo/errors.hpp"

namespace mgo {

enum class Regime { Linear, Monomial, Exponential, Hyperbolic };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Linear: return "linear";
    case Regime::Monomial: return "monomial";
    case Regime::Exponential: return "exponential";
    case Regime::Hyperbolic: return "hyperbolic";
  }
  return "unknown";
}

/// Regime taxonomy of the growth order: p = 0 linear, 0 < p < 1 monomial,
/// p = 1 exponential, p > 1 hyperbolic (finite-time blow-up).
template <typename Scalar>
Regime classify_regime(Scalar order) {
  if (!(order >= Scalar(0)))
    throw std::domain_error("growth order must be >= 0");
  if (order == Scalar(0)) return Regime::Linear;
  if (order < Scalar(1)) return Regime::Monomial;
  if (order == Scalar(1)) return Regime::Exponential;
  return Regime::Hyperbolic;
}

/// One growth-law instance: (principal, rate, order) plus the reference
/// currency unit. The unit matters: for p != 1 the numeric value of c^p
/// depends on the unit c is expressed in, so it travels with the spec.
template <typename Scalar = double>
class GrowthSpec {
 public:
  GrowthSpec(Scalar principal, Scalar rate, Scalar order, std::string unit = "EUR")
      : principal_(principal), rate_(rate), order_(order), unit_(std::move(unit)) {
    if (!(principal_ > Scalar(0)))
      throw std::invalid_argument("principal must be > 0");
    if (!(rate_ >= Scalar(0)))
      throw std::invalid_argument("rate must be >= 0");
    if (!(order_ >= Scalar(0)))
      throw std::invalid_argument("order must be >= 0");
  }

  Scalar principal() const { return principal_; }
  Scalar rate() const { return rate_; }
  Scalar order() const { return order_; }
  const std::string& unit() const { return unit_; }
  Regime regime() const { return classify_regime(order_); }

 private:
  Scalar principal_;
  Scalar rate_;
  Scalar order_;
  std::string unit_;
};

using GrowthSpecd = GrowthSpec<double>;

/// A currency amount at a point in time, or the marker that the trajectory
/// has already diverged (only possible for order > 1 at t >= t*).
template <typename Scalar = double>
class GrowthValue {
 public:
  static GrowthValue finite(Scalar time, Scalar value) {
    return GrowthValue(time, value, false);
  }
  static GrowthValue diverged(Scalar time) {
    return GrowthValue(time, std::numeric_limits<Scalar>::infinity(), true);
  }

  bool is_diverged() const { return diverged_; }
  Scalar time() const { return time_; }

  Scalar value() const {
    if (diverged_)
      throw std::logic_error("growth value is diverged (t is at or past the blow-up time)");
    return value_;
  }
  Scalar value_or(Scalar fallback) const { return diverged_ ? fallback : value_; }

 private:
  GrowthValue(Scalar time, Scalar value, bool diverged)
      : time_(time), value_(value), diverged_(diverged) {}

  Scalar time_;
  Scalar value_;
  bool diverged_;
};

using GrowthValued = GrowthValue<double>;

/// Finite-time singularity t* = c0^(1-p) / ((p-1)*i); empty unless p > 1
/// and i > 0.
template <typename Scalar>
std::optional<Scalar> blowup_time(const GrowthSpec<Scalar>& spec) {
  if (!(spec.order() > Scalar(1)) || spec.rate() == Scalar(0)) return std::nullopt;
  const Scalar q = Scalar(1) - spec.order();
  return std::exp(q * std::log(spec.principal())) /
         ((spec.order() - Scalar(1)) * spec.rate());
}

namespace detail {

// Core closed form on raw scalars; nullopt signals divergence (p > 1 and
// t at or past the singularity). Callers guarantee c0 > 0, i >= 0, p >= 0,
// t >= 0.
template <typename Scalar>
std::optional<Scalar> closed_form(Scalar c0, Scalar rate, Scalar order, Scalar t) {
  if (t == Scalar(0) || rate == Scalar(0)) return c0;
  if (order == Scalar(1)) return c0 * std::exp(rate * t);
  if (order == Scalar(0)) return c0 + rate * t;

  const Scalar q = Scalar(1) - order;
  if (order > Scalar(1)) {
    // Same expression as blowup_time so the t >= t* boundary is exact.
    const Scalar t_star =
        std::exp(q * std::log(c0)) / ((order - Scalar(1)) * rate);
    if (t >= t_star) return std::nullopt;
    const Scalar arg = std::expm1(q * std::log(c0)) + q * rate * t;
    if (arg <= Scalar(-1)) {
      // t < t* but rounding collapsed the bracket; evaluate from the gap.
      const Scalar gap = (order - Scalar(1)) * rate * (t_star - t);
      return std::exp(std::log(gap) / q);
    }
    return std::exp(std::log1p(arg) / q);
  }
  const Scalar arg = std::expm1(q * std::log(c0)) + q * rate * t;
  return std::exp(std::log1p(arg) / q);
}

}  // namespace detail

/// Principal after t years. Exact at t = 0; Diverged for p > 1 once
/// t >= blowup_time(spec).
template <typename Scalar>
GrowthValue<Scalar> principal_at(const GrowthSpec<Scalar>& spec, Scalar t) {
  if (!(t >= Scalar(0))) throw std::domain_error("time must be >= 0");
  const auto v = detail::closed_form(spec.principal(), spec.rate(), spec.order(), t);
  if (!v) return GrowthValue<Scalar>::diverged(t);
  return GrowthValue<Scalar>::finite(t, *v);
}

/// Ratio c(t) / c0. For p = 1 this is exp(i*t) for every principal; for
/// p != 1 it depends on the principal (and on its unit).
template <typename Scalar>
GrowthValue<Scalar> growth_factor(const GrowthSpec<Scalar>& spec, Scalar t) {
  if (!(t >= Scalar(0))) throw std::domain_error("time must be >= 0");
  if (spec.order() == Scalar(1))
    return GrowthValue<Scalar>::finite(t, std::exp(spec.rate() * t));
  const auto v = principal_at(spec, t);
  if (v.is_diverged()) return v;
  return GrowthValue<Scalar>::finite(t, v.value() / spec.principal());
}

/// Effective (interest-bearing) principal c^p, evaluated as exp(p*ln c).
template <typename Scalar>
Scalar effective_principal(Scalar amount, Scalar order) {
  if (!(amount > Scalar(0)))
    throw std::domain_error("amount must be > 0");
  if (!(order >= Scalar(0)))
    throw std::domain_error("growth order must be >= 0");
  if (order == Scalar(1)) return amount;
  return std::exp(order * std::log(amount));
}

/// Time to reach 2*c0:
///   t2 = c0^(1-p) * (2^(1-p) - 1) / (i*(1-p)),  with limit ln(2)/i at p = 1.
template <typename Scalar>
Scalar doubling_time(const GrowthSpec<Scalar>& spec) {
  if (spec.rate() == Scalar(0))
    throw NoDoublingError("rate is zero: the principal never doubles");
  if (spec.order() == Scalar(1))
    return std::numbers::ln2_v<Scalar> / spec.rate();
  const Scalar q = Scalar(1) - spec.order();
  return std::exp(q * std::log(spec.principal())) *
         std::expm1(q * std::numbers::ln2_v<Scalar>) / (spec.rate() * q);
}

/// Rate needed so that doubling_time equals target_doubling; exact inverse
/// of the formula above.
template <typename Scalar>
Scalar required_rate(Scalar order, Scalar principal, Scalar target_doubling) {
  if (!(order >= Scalar(0)))
    throw std::domain_error("growth order must be >= 0");
  if (!(principal > Scalar(0)))
    throw std::domain_error("principal must be > 0");
  if (!(target_doubling > Scalar(0)))
    throw std::domain_error("target doubling time must be > 0");
  if (order == Scalar(1))
    return std::numbers::ln2_v<Scalar> / target_doubling;
  const Scalar q = Scalar(1) - order;
  return std::exp(q * std::log(principal)) *
         std::expm1(q * std::numbers::ln2_v<Scalar>) / (q * target_doubling);
}

}  // namespace mgo
