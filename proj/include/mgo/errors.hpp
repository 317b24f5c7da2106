#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mgo {

/// Requested rate is zero: the principal never reaches twice its value.
class NoDoublingError : public std::domain_error {
 public:
  explicit NoDoublingError(const std::string& what) : std::domain_error(what) {}
};

/// Base class for failures of the numerical machinery (integration stalls,
/// step budgets, non-physical states). Distinct from validation errors so
/// callers can map them to a dedicated exit status.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// The adaptive integrator exhausted its step budget before reaching t_end.
class StepBudgetError : public NumericalError {
 public:
  StepBudgetError(double time_reached, long max_steps)
      : NumericalError("step budget of " + std::to_string(max_steps) +
                       " steps exhausted at t = " + std::to_string(time_reached)),
        time_reached_(time_reached),
        max_steps_(max_steps) {}

  double time_reached() const { return time_reached_; }
  long max_steps() const { return max_steps_; }

 private:
  double time_reached_;
  long max_steps_;
};

/// An account hit its finite-time singularity during population evolution.
class AccountBlowupError : public std::runtime_error {
 public:
  AccountBlowupError(std::size_t account_index, double balance, double time)
      : std::runtime_error("account #" + std::to_string(account_index) +
                           " (balance " + std::to_string(balance) +
                           ") diverges at or before t = " + std::to_string(time)),
        account_index_(account_index),
        balance_(balance) {}

  std::size_t account_index() const { return account_index_; }
  double balance() const { return balance_; }

 private:
  std::size_t account_index_;
  double balance_;
};

/// Malformed CSV input; carries the 1-based line number.
class CsvParseError : public std::runtime_error {
 public:
  CsvParseError(std::string path, std::size_t line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const { return path_; }
  std::size_t line() const { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

/// Filesystem-level failure (open/write/create), kept apart from parse and
/// numerical errors for exit-code mapping.
class IoError : public std::runtime_error {
 public:
  IoError(std::string path, const std::string& what)
      : std::runtime_error(what + ": " + path), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace mgo
