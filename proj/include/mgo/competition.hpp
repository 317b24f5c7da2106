#pragma once

// Flow-reactor competition of n replicators sharing one growth order p,
// under constant organization: the dilution flux
//
//     phi(t) = sum_j i_j c_j^p / sum_j c_j
//
// removes material proportionally so the total concentration stays constant.
// Steady states depend on p alone:
//   p < 1   coexistence, stationary fractions proportional to i^(1/(1-p))
//   p = 1   the most efficient replicator takes over
//   p > 1   the winner is decided by i * c0^(p-1) (initial conditions count)

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mgo/errors.hpp"
#include "mgo/integrate.hpp"

namespace mgo {

/// Fraction of total below which a replicator counts as extinct.
inline constexpr double kExtinctionFraction = 1e-9;

template <typename Scalar = double>
struct Replicator {
  std::string label;
  Scalar efficiency;  // i_k > 0
  Scalar initial;     // c_{0,k} > 0
};

using Replicatord = Replicator<double>;

template <typename Scalar = double>
class CompetitionSystem {
 public:
  CompetitionSystem(std::vector<Replicator<Scalar>> replicators, Scalar order)
      : replicators_(std::move(replicators)), order_(order) {
    if (replicators_.size() < 2)
      throw std::invalid_argument("competition needs at least two replicators");
    if (!(order_ >= Scalar(0)))
      throw std::invalid_argument("order must be >= 0");
    std::set<std::string> seen;
    total_ = Scalar(0);
    for (const auto& r : replicators_) {
      if (r.label.empty())
        throw std::invalid_argument("replicator labels must be non-empty");
      if (!seen.insert(r.label).second)
        throw std::invalid_argument("duplicate replicator label: " + r.label);
      if (!(r.efficiency > Scalar(0)))
        throw std::invalid_argument("efficiency must be > 0 (" + r.label + ")");
      if (!(r.initial > Scalar(0)))
        throw std::invalid_argument("initial concentration must be > 0 (" + r.label + ")");
      total_ += r.initial;
    }
  }

  const std::vector<Replicator<Scalar>>& replicators() const { return replicators_; }
  Scalar order() const { return order_; }
  Scalar total() const { return total_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(replicators_.size()); }

  Eigen::VectorX<Scalar> initial_state() const {
    Eigen::VectorX<Scalar> c(size());
    for (Eigen::Index k = 0; k < size(); ++k) c[k] = replicators_[k].initial;
    return c;
  }
  Eigen::ArrayX<Scalar> efficiencies() const {
    Eigen::ArrayX<Scalar> e(size());
    for (Eigen::Index k = 0; k < size(); ++k) e[k] = replicators_[k].efficiency;
    return e;
  }
  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    out.reserve(replicators_.size());
    for (const auto& r : replicators_) out.push_back(r.label);
    return out;
  }

 private:
  std::vector<Replicator<Scalar>> replicators_;
  Scalar order_;
  Scalar total_;
};

using CompetitionSystemd = CompetitionSystem<double>;

// --- outcome classification --------------------------------------------------

template <typename Scalar = double>
struct CoexistenceRatios {
  std::map<std::string, Scalar> fractions;  // sums to 1
};
struct SoleWinner {
  std::string label;
};
struct InitialConditionWinner {
  std::string label;
};
struct Tie {
  std::vector<std::string> labels;
};

template <typename Scalar = double>
using OutcomeClassification =
    std::variant<CoexistenceRatios<Scalar>, SoleWinner, InitialConditionWinner, Tie>;

/// Stationary concentration ratio c_A/c_B = (i_A/i_B)^(1/(1-p)) for p < 1.
template <typename Scalar>
Scalar stationary_ratio(Scalar order, Scalar eff_a, Scalar eff_b) {
  if (!(order >= Scalar(0)) || !(order < Scalar(1)))
    throw std::domain_error("no finite coexistence ratio for order >= 1");
  if (!(eff_a > Scalar(0)) || !(eff_b > Scalar(0)))
    throw std::domain_error("efficiencies must be > 0");
  if (order == Scalar(0)) return eff_a / eff_b;
  return std::exp(std::log(eff_a / eff_b) / (Scalar(1) - order));
}

/// Predicted asymptotic outcome from the fixed-point structure of the
/// constant-organization dynamics.
template <typename Scalar>
OutcomeClassification<Scalar> predict_outcome(const CompetitionSystem<Scalar>& sys) {
  const auto& reps = sys.replicators();
  const Scalar p = sys.order();

  if (p < Scalar(1)) {
    // fractions proportional to i^(1/(1-p)), normalized in log space
    const Eigen::Index n = sys.size();
    Eigen::ArrayX<Scalar> a(n);
    for (Eigen::Index k = 0; k < n; ++k)
      a[k] = std::log(reps[k].efficiency) / (Scalar(1) - p);
    const Scalar m = a.maxCoeff();
    const Eigen::ArrayX<Scalar> w = (a - m).exp();
    const Eigen::ArrayX<Scalar> f = w / w.sum();
    CoexistenceRatios<Scalar> out;
    for (Eigen::Index k = 0; k < n; ++k) out.fractions[reps[k].label] = f[k];
    return out;
  }

  // p >= 1: decisive score is i_k (p = 1) or i_k * c0_k^(p-1) (p > 1)
  std::vector<Scalar> score(reps.size());
  bool finite = true;
  for (std::size_t k = 0; k < reps.size(); ++k) {
    score[k] = (p == Scalar(1))
                   ? reps[k].efficiency
                   : reps[k].efficiency * std::pow(reps[k].initial, p - Scalar(1));
    finite = finite && std::isfinite(score[k]);
  }
  if (!finite) {
    for (std::size_t k = 0; k < reps.size(); ++k)
      score[k] = std::log(reps[k].efficiency) +
                 (p - Scalar(1)) * std::log(reps[k].initial);
  }
  const Scalar best = *std::max_element(score.begin(), score.end());
  std::vector<std::string> winners;
  for (std::size_t k = 0; k < reps.size(); ++k)
    if (score[k] == best) winners.push_back(reps[k].label);
  if (winners.size() > 1) return Tie{std::move(winners)};
  if (p == Scalar(1)) return SoleWinner{winners.front()};
  return InitialConditionWinner{winners.front()};
}

// --- simulation ---------------------------------------------------------------

template <typename Scalar = double>
struct CompetitionTrajectory {
  std::vector<std::string> labels;
  std::vector<Scalar> times;
  // row s = fractions of each replicator at times[s]
  Eigen::MatrixX<Scalar> fractions;
  Scalar total = 0;
  Scalar max_conservation_error = 0;  // max |sum c - total| / total

  Eigen::ArrayX<Scalar> terminal_fractions() const {
    return fractions.row(fractions.rows() - 1).transpose().array();
  }
};

using CompetitionTrajectoryd = CompetitionTrajectory<double>;

namespace detail {

template <typename Scalar>
Eigen::ArrayX<Scalar> replication_rates(const Eigen::ArrayX<Scalar>& eff, Scalar p,
                                        const Eigen::ArrayX<Scalar>& c) {
  const Eigen::ArrayX<Scalar> cc = c.max(Scalar(0));
  if (p > Scalar(1)) {
    // log-space evaluation; exp(-inf) = 0 covers extinct components
    return (eff.log() + p * cc.log()).exp();
  }
  return eff * cc.pow(p);
}

}  // namespace detail

/// Integrate dc_k/dt = i_k c_k^p - phi(t) c_k with the constant-organization
/// flux phi = sum_j i_j c_j^p / sum_j c_j. Samples are the accepted steps.
template <typename Scalar>
CompetitionTrajectory<Scalar> simulate_competition(const CompetitionSystem<Scalar>& sys,
                                                   Scalar t_end,
                                                   const IntegratorConfig<Scalar>& cfg = {}) {
  if (!(t_end > Scalar(0))) throw std::invalid_argument("t_end must be > 0");

  const Eigen::ArrayX<Scalar> eff = sys.efficiencies();
  const Scalar p = sys.order();
  const Scalar total = sys.total();

  const auto rhs = [&eff, p](Scalar, const Eigen::VectorX<Scalar>& c) {
    const Eigen::ArrayX<Scalar> growth = detail::replication_rates(eff, p, Eigen::ArrayX<Scalar>(c.array()));
    const Scalar phi = growth.sum() / c.sum();
    return Eigen::VectorX<Scalar>((growth - phi * c.array()).matrix());
  };

  CompetitionTrajectory<Scalar> traj;
  traj.labels = sys.labels();
  traj.total = total;

  std::vector<Eigen::ArrayX<Scalar>> rows;
  traj.times.push_back(Scalar(0));
  rows.push_back(sys.initial_state().array() / total);

  const auto status = integrate_dopri5(
      rhs, Scalar(0), sys.initial_state(), t_end, cfg,
      [&](Scalar t, Eigen::VectorX<Scalar>& c) {
        // continuous dynamics keep c >= 0; clip roundoff-level undershoot
        if ((c.array() < Scalar(0)).any()) c = c.cwiseMax(Scalar(0));
        const Scalar sum = c.sum();
        traj.max_conservation_error = std::max(
            traj.max_conservation_error, std::abs(sum - total) / total);
        traj.times.push_back(t);
        rows.push_back(c.array() / sum);
      });

  if (status.reason != IntegrationStatus::Reason::Completed)
    throw NumericalError("competition integration stopped at t = " +
                         std::to_string(status.t_reached));

  traj.fractions.resize(static_cast<Eigen::Index>(rows.size()), sys.size());
  for (std::size_t s = 0; s < rows.size(); ++s)
    traj.fractions.row(static_cast<Eigen::Index>(s)) = rows[s].matrix().transpose();
  return traj;
}

// --- prediction vs simulation ---------------------------------------------------

template <typename Scalar = double>
struct ReplicatorAgreement {
  std::string label;
  Scalar predicted;  // predicted stationary fraction
  Scalar simulated;  // terminal simulated fraction
  bool extinct;      // simulated < kExtinctionFraction
  bool pass;         // |simulated - predicted| <= tol
};

template <typename Scalar = double>
struct AgreementReport {
  bool converged = false;  // fractions moved < tol/10 over the final 10%
  Scalar drift = 0;
  Scalar tol = 0;
  std::vector<ReplicatorAgreement<Scalar>> replicators;

  bool all_pass() const {
    if (!converged) return false;
    for (const auto& r : replicators)
      if (!r.pass) return false;
    return true;
  }
};

using AgreementReportd = AgreementReport<double>;

/// Simulate, check stationarity over the final 10% of the run, and compare
/// terminal fractions against predict_outcome. Non-convergence is reported
/// in the result, never silently passed.
template <typename Scalar>
AgreementReport<Scalar> verify_prediction(const CompetitionSystem<Scalar>& sys,
                                          Scalar t_end, Scalar tol,
                                          const IntegratorConfig<Scalar>& cfg = {}) {
  if (!(tol > Scalar(0))) throw std::invalid_argument("tol must be > 0");
  const auto traj = simulate_competition(sys, t_end, cfg);

  const Eigen::ArrayX<Scalar> terminal = traj.terminal_fractions();
  // fractions at 0.9 * t_end, interpolated per column from accepted samples
  const Scalar t_check = Scalar(0.9) * t_end;
  const auto& times = traj.times;
  const auto it = std::lower_bound(times.begin(), times.end(), t_check);
  std::size_t hi = static_cast<std::size_t>(it - times.begin());
  if (hi == 0) hi = 1;
  const std::size_t lo = hi - 1;
  const Scalar w = (t_check - times[lo]) / (times[hi] - times[lo]);
  Eigen::ArrayX<Scalar> at_check =
      (traj.fractions.row(static_cast<Eigen::Index>(lo)) * (Scalar(1) - w) +
       traj.fractions.row(static_cast<Eigen::Index>(hi)) * w)
          .transpose()
          .array();

  AgreementReport<Scalar> report;
  report.tol = tol;
  report.drift = (terminal - at_check).abs().maxCoeff();
  report.converged = report.drift < tol / Scalar(10);

  const auto outcome = predict_outcome(sys);
  const auto& reps = sys.replicators();
  Eigen::ArrayX<Scalar> predicted(sys.size());
  if (const auto* coex = std::get_if<CoexistenceRatios<Scalar>>(&outcome)) {
    for (Eigen::Index k = 0; k < sys.size(); ++k)
      predicted[k] = coex->fractions.at(reps[k].label);
  } else if (const auto* sole = std::get_if<SoleWinner>(&outcome)) {
    for (Eigen::Index k = 0; k < sys.size(); ++k)
      predicted[k] = reps[k].label == sole->label ? Scalar(1) : Scalar(0);
  } else if (const auto* icw = std::get_if<InitialConditionWinner>(&outcome)) {
    for (Eigen::Index k = 0; k < sys.size(); ++k)
      predicted[k] = reps[k].label == icw->label ? Scalar(1) : Scalar(0);
  } else {
    // Tie: the balanced state is a fixed point, so fractions hold at start
    for (Eigen::Index k = 0; k < sys.size(); ++k)
      predicted[k] = reps[k].initial / sys.total();
  }

  for (Eigen::Index k = 0; k < sys.size(); ++k) {
    ReplicatorAgreement<Scalar> entry;
    entry.label = reps[k].label;
    entry.predicted = predicted[k];
    entry.simulated = terminal[k];
    entry.extinct = terminal[k] < Scalar(kExtinctionFraction);
    entry.pass = std::abs(terminal[k] - predicted[k]) <= tol;
    report.replicators.push_back(std::move(entry));
  }
  return report;
}

}  // namespace mgo
