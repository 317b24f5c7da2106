#pragma once

// Lorenz-curve and Gini-index metrics over populations of account balances
// that all evolve under one shared (rate, order) growth law. For p = 1 the
// metrics are time-invariant (uniform scaling); p < 1 compresses relative
// spread over time, p > 1 widens it.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "mgo/errors.hpp"
#include "mgo/kinetics.hpp"

namespace mgo {

template <typename Scalar = double>
class AccountPopulation {
 public:
  AccountPopulation(Eigen::ArrayX<Scalar> balances, Scalar rate, Scalar order,
                    std::string unit = "EUR")
      : balances_(std::move(balances)), rate_(rate), order_(order),
        unit_(std::move(unit)) {
    if (balances_.size() == 0)
      throw std::domain_error("account population must be non-empty");
    if (!(balances_ > Scalar(0)).all())
      throw std::invalid_argument("all balances must be > 0");
    if (!(rate_ >= Scalar(0)))
      throw std::invalid_argument("rate must be >= 0");
    if (!(order_ >= Scalar(0)))
      throw std::invalid_argument("order must be >= 0");
  }

  const Eigen::ArrayX<Scalar>& balances() const { return balances_; }
  Scalar rate() const { return rate_; }
  Scalar order() const { return order_; }
  const std::string& unit() const { return unit_; }
  Eigen::Index size() const { return balances_.size(); }

 private:
  Eigen::ArrayX<Scalar> balances_;
  Scalar rate_;
  Scalar order_;
  std::string unit_;
};

using AccountPopulationd = AccountPopulation<double>;

/// Piecewise-linear Lorenz curve: (population share, cumulative wealth
/// share), starting at (0,0) and ending at (1,1).
template <typename Scalar = double>
struct LorenzCurve {
  Eigen::ArrayX<Scalar> population_share;
  Eigen::ArrayX<Scalar> wealth_share;

  /// Trapezoidal area under the curve; Gini = 1 - 2*area.
  Scalar area() const {
    long double acc = 0;
    for (Eigen::Index k = 1; k < population_share.size(); ++k) {
      acc += (static_cast<long double>(wealth_share[k - 1]) + wealth_share[k]) *
             (static_cast<long double>(population_share[k]) - population_share[k - 1]);
    }
    return static_cast<Scalar>(acc / 2);
  }
};

using LorenzCurved = LorenzCurve<double>;

namespace detail {

template <typename Scalar>
std::vector<Scalar> sorted_balances(const Eigen::ArrayX<Scalar>& balances) {
  std::vector<Scalar> xs(balances.data(), balances.data() + balances.size());
  std::sort(xs.begin(), xs.end());
  return xs;
}

}  // namespace detail

/// Lorenz curve of a balance array: sort ascending, point k is
/// (k/n, cumulative_k / total), prefixed with (0,0).
template <typename Derived>
LorenzCurve<typename Derived::Scalar> lorenz_curve(const Eigen::ArrayBase<Derived>& balances) {
  using Scalar = typename Derived::Scalar;
  const Eigen::ArrayX<Scalar> b = balances.derived();
  if (b.size() == 0) throw std::domain_error("population is empty");
  if (!(b > Scalar(0)).all()) throw std::domain_error("balances must be > 0");

  const auto xs = detail::sorted_balances(b);
  const Eigen::Index n = static_cast<Eigen::Index>(xs.size());

  long double total = 0;
  for (const Scalar x : xs) total += x;

  LorenzCurve<Scalar> curve;
  curve.population_share.resize(n + 1);
  curve.wealth_share.resize(n + 1);
  curve.population_share[0] = Scalar(0);
  curve.wealth_share[0] = Scalar(0);
  long double cum = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cum += xs[static_cast<std::size_t>(k)];
    const Scalar pop = Scalar(k + 1) / Scalar(n);
    Scalar wealth = static_cast<Scalar>(cum / total);
    // ascending order puts the curve on or below the diagonal; keep the
    // invariant exact against last-ulp rounding
    wealth = std::min(wealth, pop);
    wealth = std::max(wealth, curve.wealth_share[k]);
    curve.population_share[k + 1] = pop;
    curve.wealth_share[k + 1] = wealth;
  }
  curve.population_share[n] = Scalar(1);
  curve.wealth_share[n] = Scalar(1);
  return curve;
}

template <typename Scalar>
LorenzCurve<Scalar> lorenz_curve(const AccountPopulation<Scalar>& pop) {
  return lorenz_curve(pop.balances());
}

/// Gini index in [0, 1): mean absolute difference over twice the mean,
///   G = sum_ij |x_i - x_j| / (2 n^2 mean) = sum_k (2k - n - 1) x_(k) / (n sum x),
/// which equals 1 - 2*(area under the Lorenz curve).
template <typename Derived>
typename Derived::Scalar gini(const Eigen::ArrayBase<Derived>& balances) {
  using Scalar = typename Derived::Scalar;
  const Eigen::ArrayX<Scalar> b = balances.derived();
  if (b.size() == 0) throw std::domain_error("population is empty");
  if (!(b > Scalar(0)).all()) throw std::domain_error("balances must be > 0");

  const auto xs = detail::sorted_balances(b);
  const long double n = static_cast<long double>(xs.size());
  long double num = 0, total = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    num += (2 * static_cast<long double>(k + 1) - n - 1) * xs[k];
    total += xs[k];
  }
  return static_cast<Scalar>(num / (n * total));
}

template <typename Scalar>
Scalar gini(const AccountPopulation<Scalar>& pop) {
  return gini(pop.balances());
}

/// Apply the shared growth law to every balance for t years. Throws
/// AccountBlowupError naming the first account whose singularity lies at or
/// before t (only possible for order > 1).
template <typename Scalar>
AccountPopulation<Scalar> evolve_population(const AccountPopulation<Scalar>& pop, Scalar t) {
  if (!(t >= Scalar(0))) throw std::domain_error("time must be >= 0");
  Eigen::ArrayX<Scalar> evolved(pop.size());
  for (Eigen::Index k = 0; k < pop.size(); ++k) {
    const auto v = detail::closed_form(pop.balances()[k], pop.rate(), pop.order(), t);
    if (!v)
      throw AccountBlowupError(static_cast<std::size_t>(k),
                               static_cast<double>(pop.balances()[k]),
                               static_cast<double>(t));
    evolved[k] = *v;
  }
  return AccountPopulation<Scalar>(std::move(evolved), pop.rate(), pop.order(), pop.unit());
}

/// Gini index along a non-decreasing time grid, each point evolved from the
/// initial population by the closed form.
template <typename Scalar>
std::vector<std::pair<Scalar, Scalar>> gini_trajectory(const AccountPopulation<Scalar>& pop,
                                                       const std::vector<Scalar>& t_grid) {
  for (std::size_t j = 1; j < t_grid.size(); ++j)
    if (t_grid[j] < t_grid[j - 1])
      throw std::invalid_argument("time grid must be non-decreasing");
  std::vector<std::pair<Scalar, Scalar>> out;
  out.reserve(t_grid.size());
  for (const Scalar t : t_grid)
    out.emplace_back(t, gini(evolve_population(pop, t)));
  return out;
}

}  // namespace mgo
