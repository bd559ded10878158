#pragma once

// Multi-restart derivative-free maximization (adaptive Nelder-Mead).
//
// Restart r draws its random start from derived_rng(seed, r), so results depend only on the
// budget and never on the worker count. QMI_THREADS caps the number of concurrent restarts.

#include <cstdint>
#include <functional>
#include <vector>

#include "qmi/operator_core.hpp"

namespace qmi {

struct SearchBudget {
  int restarts = 32;
  int max_evals = 400;
  std::uint64_t seed = 1234;
  /// Convergence: spread of objective values across the simplex.
  double tol = 1e-7;
};

struct StartPoint {
  RealVector x;
  double step = 0.1;
};

struct SearchResult {
  RealVector x;
  double value = -std::numeric_limits<double>::infinity();
  bool converged = false;
  long evals = 0;
  /// Points rejected because the objective was not finite.
  long numerical_events = 0;
  bool feasible = true;
  double violation = 0.0;
};

/// Objective to maximize; non-finite values reject the point.
using Objective = std::function<double(const RealVector&)>;

/// Runs max(budget.restarts, starts.size()) restarts; the first ones begin at `starts`,
/// the rest at N(0, random_scale^2) draws.
SearchResult maximize(const Objective& f, int dim, const SearchBudget& budget,
                      const std::vector<StartPoint>& starts = {}, double random_scale = 1.0);

struct ConstrainedValue {
  double value;
  double violation;
};
using ConstrainedObjective = std::function<ConstrainedValue(const RealVector&)>;

struct PenaltySchedule {
  std::vector<double> weights{1e1, 1e3, 1e5};
  /// Points with violation at or below this count as feasible.
  double feasibility_tol = 1e-6;
};

/// Quadratic-penalty continuation. Returns the best feasible point seen across all evaluations
/// (feasible=false and the least-violating point if none was feasible).
SearchResult maximize_constrained(const ConstrainedObjective& f, int dim, const SearchBudget& budget,
                                  const std::vector<StartPoint>& starts = {}, double random_scale = 1.0,
                                  const PenaltySchedule& schedule = {});

/// Worker count from QMI_THREADS (default: hardware concurrency, at least 1).
int search_threads();

}  // namespace qmi
