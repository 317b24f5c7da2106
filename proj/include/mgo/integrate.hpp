#pragma once

// Adaptive explicit integrator for the growth law and the flow-reactor
// competition system: Dormand-Prince 5(4) embedded pair with PI step-size
// control. Works on scalar states and on Eigen vectors through the small
// trait functions below. Serves as the independent oracle for the closed
// forms in kinetics.hpp, so it deliberately avoids dense-output tricks:
// samples are the accepted steps, nothing more.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <type_traits>
#include <vector>

#include "mgo/errors.hpp"
#include "mgo/kinetics.hpp"

namespace mgo {

template <typename Scalar = double>
struct IntegratorConfig {
  Scalar rel_tol = Scalar(1e-9);
  Scalar abs_tol = Scalar(1e-12);
  long max_steps = 2000000;
  Scalar blowup_guard = Scalar(1e300);
};

using IntegratorConfigd = IntegratorConfig<double>;

namespace detail {

template <typename Scalar>
void validate(const IntegratorConfig<Scalar>& cfg) {
  if (!(cfg.rel_tol > Scalar(0)) || !(cfg.abs_tol > Scalar(0)))
    throw std::invalid_argument("integrator tolerances must be > 0");
  if (cfg.max_steps <= 0)
    throw std::invalid_argument("max_steps must be > 0");
  if (!(cfg.blowup_guard > Scalar(0)))
    throw std::invalid_argument("blowup_guard must be > 0");
}

// --- state traits: scalar --------------------------------------------------

template <typename Scalar>
  requires std::is_arithmetic_v<Scalar>
Scalar state_max_abs(Scalar y) {
  return std::abs(y);
}

template <typename Scalar>
  requires std::is_arithmetic_v<Scalar>
bool state_finite(Scalar y) {
  return std::isfinite(y);
}

template <typename Scalar>
  requires std::is_arithmetic_v<Scalar>
Scalar error_norm(Scalar err, Scalar y0, Scalar y1, Scalar atol, Scalar rtol) {
  const Scalar sc = atol + rtol * std::max(std::abs(y0), std::abs(y1));
  return std::abs(err) / sc;
}

// --- state traits: Eigen vectors -------------------------------------------

template <typename Derived>
typename Derived::Scalar state_max_abs(const Eigen::MatrixBase<Derived>& y) {
  return y.cwiseAbs().maxCoeff();
}

template <typename Derived>
bool state_finite(const Eigen::MatrixBase<Derived>& y) {
  return y.allFinite();
}

template <typename D1, typename D2, typename D3>
typename D1::Scalar error_norm(const Eigen::MatrixBase<D1>& err,
                               const Eigen::MatrixBase<D2>& y0,
                               const Eigen::MatrixBase<D3>& y1,
                               typename D1::Scalar atol,
                               typename D1::Scalar rtol) {
  using Scalar = typename D1::Scalar;
  const auto sc =
      (atol + rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).eval();
  const Scalar mean_sq = (err.array() / sc).square().mean();
  return std::sqrt(mean_sq);
}

}  // namespace detail

struct IntegrationStatus {
  enum class Reason {
    Completed,      // reached t_end
    ValueCeiling,   // state exceeded blowup_guard (or left the finite range)
    StepUnderflow,  // t + h == t at working precision
  };
  Reason reason = Reason::Completed;
  double t_reached = 0;
  long accepted = 0;
  long rejected = 0;
};

/// Dormand-Prince 5(4) with PI control. Calls on_accept(t, y) after every
/// accepted step; the callback may adjust y in place (the next step re-derives
/// all stages from the stored state). Throws StepBudgetError when max_steps
/// is exhausted.
template <typename Scalar, typename State, typename Rhs, typename OnAccept>
IntegrationStatus integrate_dopri5(Rhs&& rhs, Scalar t0, State y, Scalar t_end,
                                   const IntegratorConfig<Scalar>& cfg,
                                   OnAccept&& on_accept) {
  detail::validate(cfg);
  if (!(t_end > t0)) throw std::invalid_argument("t_end must exceed t0");

  static constexpr Scalar c2 = Scalar(1) / 5, c3 = Scalar(3) / 10,
                          c4 = Scalar(4) / 5, c5 = Scalar(8) / 9;
  static constexpr Scalar a21 = Scalar(1) / 5;
  static constexpr Scalar a31 = Scalar(3) / 40, a32 = Scalar(9) / 40;
  static constexpr Scalar a41 = Scalar(44) / 45, a42 = Scalar(-56) / 15,
                          a43 = Scalar(32) / 9;
  static constexpr Scalar a51 = Scalar(19372) / 6561, a52 = Scalar(-25360) / 2187,
                          a53 = Scalar(64448) / 6561, a54 = Scalar(-212) / 729;
  static constexpr Scalar a61 = Scalar(9017) / 3168, a62 = Scalar(-355) / 33,
                          a63 = Scalar(46732) / 5247, a64 = Scalar(49) / 176,
                          a65 = Scalar(-5103) / 18656;
  static constexpr Scalar b1 = Scalar(35) / 384, b3 = Scalar(500) / 1113,
                          b4 = Scalar(125) / 192, b5 = Scalar(-2187) / 6784,
                          b6 = Scalar(11) / 84;
  // b (order 5) minus b-hat (order 4)
  static constexpr Scalar e1 = Scalar(71) / 57600, e3 = Scalar(-71) / 16695,
                          e4 = Scalar(71) / 1920, e5 = Scalar(-17253) / 339200,
                          e6 = Scalar(22) / 525, e7 = Scalar(-1) / 40;

  static constexpr Scalar safe = Scalar(0.9);
  static constexpr Scalar beta = Scalar(0.04);
  static constexpr Scalar expo1 = Scalar(0.2) - beta * Scalar(0.75);
  static constexpr Scalar facc1 = Scalar(5);        // max shrink 1/5
  static constexpr Scalar facc2 = Scalar(1) / 10;   // max growth 10x

  IntegrationStatus status;
  Scalar t = t0;
  Scalar facold = Scalar(1e-4);
  bool previous_rejected = false;

  State k1 = rhs(t, y);

  // Initial step size from the local derivative scale (Hairer-style probe).
  Scalar h;
  {
    const Scalar span = t_end - t0;
    const Scalar d0 = detail::error_norm(y, y, y, cfg.abs_tol, cfg.rel_tol);
    const Scalar d1 = detail::error_norm(k1, y, y, cfg.abs_tol, cfg.rel_tol);
    Scalar h0 = (d0 < Scalar(1e-5) || d1 < Scalar(1e-5))
                    ? Scalar(1e-6)
                    : Scalar(0.01) * (d0 / d1);
    h0 = std::min(h0, span);
    State y1 = y + h0 * k1;
    State f1 = rhs(t + h0, y1);
    const Scalar d2 =
        detail::error_norm(State(f1 - k1), y, y, cfg.abs_tol, cfg.rel_tol) / h0;
    Scalar h1;
    if (std::max(d1, d2) <= Scalar(1e-15))
      h1 = std::max(Scalar(1e-6), h0 * Scalar(1e-3));
    else
      h1 = std::pow(Scalar(0.01) / std::max(d1, d2), Scalar(1) / 5);
    h = std::min({Scalar(100) * h0, h1, span});
  }

  for (long step = 0; ; ++step) {
    if (step >= cfg.max_steps)
      throw StepBudgetError(static_cast<double>(t), cfg.max_steps);

    bool last = false;
    Scalar hs = h;
    if (hs >= t_end - t) {
      hs = t_end - t;
      last = true;
    }
    if (!(t + hs > t)) {
      status.reason = IntegrationStatus::Reason::StepUnderflow;
      status.t_reached = static_cast<double>(t);
      return status;
    }

    k1 = rhs(t, y);
    const State k2 = rhs(t + c2 * hs, State(y + hs * (a21 * k1)));
    const State k3 = rhs(t + c3 * hs, State(y + hs * (a31 * k1 + a32 * k2)));
    const State k4 = rhs(t + c4 * hs, State(y + hs * (a41 * k1 + a42 * k2 + a43 * k3)));
    const State k5 = rhs(t + c5 * hs,
                         State(y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const State k6 = rhs(t + hs, State(y + hs * (a61 * k1 + a62 * k2 + a63 * k3 +
                                                 a64 * k4 + a65 * k5)));
    const State y_new =
        y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const State k7 = rhs(t + hs, y_new);
    const State err_state =
        hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const Scalar err =
        detail::error_norm(err_state, y, y_new, cfg.abs_tol, cfg.rel_tol);

    if (!std::isfinite(err)) {
      // Stage values left the floating range; retry much smaller.
      h = hs * Scalar(0.1);
      ++status.rejected;
      previous_rejected = true;
      continue;
    }

    const Scalar fac11 = std::pow(err, expo1);
    if (err <= Scalar(1)) {
      t = last ? t_end : t + hs;
      y = y_new;
      ++status.accepted;

      if (!detail::state_finite(y) || detail::state_max_abs(y) > cfg.blowup_guard) {
        status.reason = IntegrationStatus::Reason::ValueCeiling;
        status.t_reached = static_cast<double>(t);
        return status;
      }
      on_accept(t, y);
      if (last) {
        status.reason = IntegrationStatus::Reason::Completed;
        status.t_reached = static_cast<double>(t);
        return status;
      }

      Scalar fac = fac11 / std::pow(facold, beta);
      fac = std::max(facc2, std::min(facc1, fac / safe));
      Scalar h_new = hs / fac;
      if (previous_rejected) h_new = std::min(h_new, hs);
      facold = std::max(err, Scalar(1e-4));
      previous_rejected = false;
      h = h_new;
    } else {
      ++status.rejected;
      previous_rejected = true;
      h = hs / std::min(facc1, fac11 / safe);
    }
  }
}

enum class CurveMethod { ClosedForm, Integrated };
enum class CurveTermination { Completed, BlowupDetected };

/// A sampled trajectory. For Integrated curves the samples are exactly the
/// accepted steps (plus t = 0); value_at interpolates linearly in between.
template <typename Scalar = double>
struct GrowthCurve {
  std::vector<Scalar> times;
  std::vector<Scalar> values;
  CurveMethod method = CurveMethod::Integrated;
  CurveTermination termination = CurveTermination::Completed;
  std::optional<Scalar> blowup_estimate;  // set iff termination == BlowupDetected

  Scalar value_at(Scalar t) const {
    if (times.empty()) throw std::logic_error("empty curve");
    if (!(t >= times.front()) || !(t <= times.back()))
      throw std::domain_error("sample time outside curve range");
    const auto it = std::lower_bound(times.begin(), times.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - times.begin());
    if (hi == 0 || times[hi] == t) return values[hi];
    const std::size_t lo = hi - 1;
    const Scalar w = (t - times[lo]) / (times[hi] - times[lo]);
    return values[lo] + w * (values[hi] - values[lo]);
  }
};

using GrowthCurved = GrowthCurve<double>;

namespace detail {

// Least-squares fit of z = c^(1-p) (linear in t for the pure growth law)
// over the last accepted points; the root of the fitted line estimates t*.
template <typename Scalar>
std::optional<Scalar> fit_blowup_time(const std::vector<Scalar>& times,
                                      const std::vector<Scalar>& values,
                                      Scalar order) {
  const std::size_t n = times.size();
  const std::size_t m = std::min<std::size_t>(8, n);
  if (m < 3) return std::nullopt;
  const Scalar t_ref = times[n - 1];
  Scalar st = 0, sz = 0, stt = 0, stz = 0;
  for (std::size_t j = n - m; j < n; ++j) {
    const Scalar dt = times[j] - t_ref;
    const Scalar z = std::exp((Scalar(1) - order) * std::log(values[j]));
    st += dt;
    sz += z;
    stt += dt * dt;
    stz += dt * z;
  }
  const Scalar denom = Scalar(m) * stt - st * st;
  if (denom == Scalar(0)) return std::nullopt;
  const Scalar slope = (Scalar(m) * stz - st * sz) / denom;
  const Scalar intercept = (sz - slope * st) / Scalar(m);
  if (!(slope < Scalar(0))) return std::nullopt;
  return t_ref - intercept / slope;
}

}  // namespace detail

/// Integrate dc/dt = i*c^p from the spec's principal to t_end. For p > 1 the
/// run terminates with BlowupDetected once the value passes the guard (or the
/// step size underflows against the singularity), and t* is estimated from
/// the last accepted points.
template <typename Scalar>
GrowthCurve<Scalar> integrate_growth(const GrowthSpec<Scalar>& spec, Scalar t_end,
                                     const IntegratorConfig<Scalar>& cfg = {}) {
  if (!(t_end > Scalar(0))) throw std::invalid_argument("t_end must be > 0");

  const Scalar rate = spec.rate();
  const Scalar order = spec.order();
  GrowthCurve<Scalar> curve;
  curve.method = CurveMethod::Integrated;
  curve.times.push_back(Scalar(0));
  curve.values.push_back(spec.principal());

  const auto rhs = [rate, order](Scalar, Scalar c) {
    return rate * std::pow(c, order);
  };
  const auto status = integrate_dopri5(
      rhs, Scalar(0), spec.principal(), t_end, cfg, [&](Scalar t, Scalar c) {
        curve.times.push_back(t);
        curve.values.push_back(c);
      });

  if (status.reason == IntegrationStatus::Reason::Completed) {
    curve.termination = CurveTermination::Completed;
    return curve;
  }
  if (order > Scalar(1)) {
    curve.termination = CurveTermination::BlowupDetected;
    auto est = detail::fit_blowup_time(curve.times, curve.values, order);
    if (!est) {
      // Too few points for a fit; fall back to the exact local slope
      // dz/dt = (1-p)*i from the last sample.
      const Scalar z_last =
          std::exp((Scalar(1) - order) * std::log(curve.values.back()));
      est = curve.times.back() + z_last / ((order - Scalar(1)) * rate);
    }
    curve.blowup_estimate = est;
    return curve;
  }
  throw NumericalError(
      "integration stopped at t = " + std::to_string(status.t_reached) +
      (status.reason == IntegrationStatus::Reason::ValueCeiling
           ? " at the value guard"
           : " with a vanishing step size") +
      " although the growth order does not admit finite-time blow-up");
}

/// Max over accepted samples of |integrated - closed| / closed. Requires
/// t_end below the blow-up time when order > 1.
template <typename Scalar>
Scalar max_rel_error_vs_closed_form(const GrowthSpec<Scalar>& spec, Scalar t_end,
                                    const IntegratorConfig<Scalar>& cfg = {}) {
  const auto t_star = blowup_time(spec);
  if (t_star && !(t_end < *t_star))
    throw std::domain_error("t_end must lie below the blow-up time");
  const auto curve = integrate_growth(spec, t_end, cfg);
  Scalar worst = 0;
  for (std::size_t j = 0; j < curve.times.size(); ++j) {
    const Scalar exact = principal_at(spec, curve.times[j]).value();
    worst = std::max(worst, std::abs(curve.values[j] - exact) / exact);
  }
  return worst;
}

}  // namespace mgo
