#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hom {

/// Raised on contract violations (bad grids, degenerate inputs, invalid configs).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A least-squares fit that did not converge. Carries the best parameter
/// vector seen so callers can still inspect it.
class FitError : public Error {
 public:
  FitError(const std::string& what, std::vector<double> best_params)
      : Error(what), best_params_(std::move(best_params)) {}

  const std::vector<double>& best_params() const noexcept { return best_params_; }

 private:
  std::vector<double> best_params_;
};

}  // namespace hom
