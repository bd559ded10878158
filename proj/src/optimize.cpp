#include "qmi/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <exception>
#include <thread>

#include "qmi/random.hpp"

namespace qmi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct LocalRun {
  RealVector x;
  double value = -kInf;
  bool converged = false;
  long evals = 0;
};

// Minimizes -f from x0. Adaptive coefficients keep the simplex from collapsing in higher dimensions.
LocalRun nelder_mead(const Objective& f, RealVector x0, double step, int max_evals, double tol) {
  const Eigen::Index n = x0.size();
  LocalRun run;
  auto cost = [&](const RealVector& x) {
    ++run.evals;
    const double v = f(x);
    return std::isfinite(v) ? -v : kInf;
  };
  if (n == 0) {
    run.x = x0;
    run.value = -cost(x0);
    run.converged = true;
    return run;
  }
  const double dn = static_cast<double>(n);
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / dn;
  const double gamma = 0.75 - 1.0 / (2.0 * dn);
  const double delta = 1.0 - 1.0 / dn;

  std::vector<RealVector> simplex(n + 1, x0);
  std::vector<double> fv(n + 1);
  fv[0] = cost(x0);
  for (Eigen::Index i = 0; i < n; ++i) {
    simplex[i + 1](i) += step;
    fv[i + 1] = cost(simplex[i + 1]);
  }
  std::vector<int> order(n + 1);
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    {
      std::vector<RealVector> s2;
      std::vector<double> f2;
      for (int i : order) {
        s2.push_back(simplex[i]);
        f2.push_back(fv[i]);
      }
      simplex.swap(s2);
      fv.swap(f2);
    }
    const double best = fv.front();
    const double worst = fv.back();
    if (std::isfinite(best) && std::isfinite(worst) && worst - best <= tol) {
      run.converged = true;
      break;
    }
    if (run.evals >= max_evals) break;

    RealVector centroid = RealVector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) centroid += simplex[i];
    centroid /= dn;
    const RealVector& xw = simplex[n];

    const RealVector xr = centroid + alpha * (centroid - xw);
    const double fr = cost(xr);
    if (fr < fv[0]) {
      const RealVector xe = centroid + beta * (xr - centroid);
      const double fe = cost(xe);
      if (fe < fr) {
        simplex[n] = xe;
        fv[n] = fe;
      } else {
        simplex[n] = xr;
        fv[n] = fr;
      }
      continue;
    }
    if (fr < fv[n - 1]) {
      simplex[n] = xr;
      fv[n] = fr;
      continue;
    }
    bool shrink = false;
    if (fr < fv[n]) {
      const RealVector xc = centroid + gamma * (xr - centroid);
      const double fc = cost(xc);
      if (fc <= fr) {
        simplex[n] = xc;
        fv[n] = fc;
      } else {
        shrink = true;
      }
    } else {
      const RealVector xc = centroid + gamma * (xw - centroid);
      const double fc = cost(xc);
      if (fc < fv[n]) {
        simplex[n] = xc;
        fv[n] = fc;
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (Eigen::Index i = 1; i <= n; ++i) {
        simplex[i] = simplex[0] + delta * (simplex[i] - simplex[0]);
        fv[i] = cost(simplex[i]);
      }
    }
  }
  run.x = simplex.front();
  run.value = -fv.front();
  return run;
}

// Runs restart bodies on up to search_threads() workers; results land at their own index.
template <typename Result, typename Body>
std::vector<Result> run_restarts(int count, Body body) {
  std::vector<Result> results(count);
  const int workers = std::min(count, search_threads());
  if (workers <= 1) {
    for (int r = 0; r < count; ++r) results[r] = body(r);
    return results;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int r = next++; r < count; r = next++) {
        try {
          results[r] = body(r);
        } catch (...) {
          errors[r] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  // Lowest restart index wins, matching the sequential order.
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

StartPoint start_for(int restart, int dim, const SearchBudget& budget, const std::vector<StartPoint>& starts,
                     double random_scale) {
  if (restart < static_cast<int>(starts.size())) {
    if (starts[restart].x.size() != dim) throw InvalidArgument("search: start point has the wrong dimension");
    return starts[restart];
  }
  Rng rng = derived_rng(budget.seed, static_cast<std::uint64_t>(restart));
  std::normal_distribution<double> n01(0.0, random_scale);
  RealVector x(dim);
  for (int i = 0; i < dim; ++i) x(i) = n01(rng);
  return {x, 0.5 * random_scale};
}

}  // namespace

int search_threads() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("QMI_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = n > 0 ? std::min(n, cap) : cap;
  }
  return std::max(1, n);
}

SearchResult maximize(const Objective& f, int dim, const SearchBudget& budget, const std::vector<StartPoint>& starts,
                      double random_scale) {
  const int count = std::max(budget.restarts, static_cast<int>(starts.size()));
  struct Outcome {
    LocalRun run;
    long rejected = 0;
  };
  auto results = run_restarts<Outcome>(std::max(count, 1), [&](int r) {
    const StartPoint sp = start_for(r, dim, budget, starts, random_scale);
    Outcome out;
    auto counted = [&](const RealVector& x) {
      double v = kNaN;
      try {
        v = f(x);
      } catch (const InvalidArgument&) {
        // The parameterization degenerated here (zero column, singular Gram, ...).
      }
      if (!std::isfinite(v)) ++out.rejected;
      return v;
    };
    out.run = nelder_mead(counted, sp.x, sp.step, budget.max_evals, budget.tol);
    return out;
  });
  SearchResult best;
  for (const auto& o : results) {
    best.evals += o.run.evals;
    best.numerical_events += o.rejected;
    if (o.run.value > best.value || best.x.size() == 0) {
      best.x = o.run.x;
      best.value = o.run.value;
      best.converged = o.run.converged;
    }
  }
  return best;
}

SearchResult maximize_constrained(const ConstrainedObjective& f, int dim, const SearchBudget& budget,
                                  const std::vector<StartPoint>& starts, double random_scale,
                                  const PenaltySchedule& schedule) {
  const int count = std::max(budget.restarts, static_cast<int>(starts.size()));
  const int stages = static_cast<int>(schedule.weights.size());
  const int per_stage = std::max(1, budget.max_evals / std::max(1, stages));
  struct Outcome {
    RealVector best_feasible_x;
    double best_feasible = -kInf;
    double best_feasible_violation = 0.0;
    bool converged = false;
    RealVector least_violating_x;
    double least_violation = kInf;
    double least_violating_value = -kInf;
    long evals = 0;
    long rejected = 0;
  };
  auto results = run_restarts<Outcome>(std::max(count, 1), [&](int r) {
    StartPoint sp = start_for(r, dim, budget, starts, random_scale);
    Outcome out;
    RealVector x = sp.x;
    double step = sp.step;
    for (double weight : schedule.weights) {
      auto penalized = [&](const RealVector& p) {
        ConstrainedValue cv{kNaN, kNaN};
        try {
          cv = f(p);
        } catch (const InvalidArgument&) {
        }
        if (!std::isfinite(cv.value) || !std::isfinite(cv.violation)) {
          ++out.rejected;
          return -kInf;
        }
        if (cv.violation <= schedule.feasibility_tol && cv.value > out.best_feasible) {
          out.best_feasible = cv.value;
          out.best_feasible_violation = cv.violation;
          out.best_feasible_x = p;
        }
        if (cv.violation < out.least_violation) {
          out.least_violation = cv.violation;
          out.least_violating_x = p;
          out.least_violating_value = cv.value;
        }
        return cv.value - weight * cv.violation * cv.violation;
      };
      LocalRun run = nelder_mead(penalized, x, step, per_stage, budget.tol);
      out.evals += run.evals;
      out.converged = run.converged;
      x = run.x;
      step = std::max(step * 0.1, 1e-4);
    }
    return out;
  });
  SearchResult best;
  best.feasible = false;
  double least_violation = kInf;
  for (const auto& o : results) {
    best.evals += o.evals;
    best.numerical_events += o.rejected;
    if (o.best_feasible_x.size() == dim && o.best_feasible > best.value) {
      best.value = o.best_feasible;
      best.x = o.best_feasible_x;
      best.converged = o.converged;
      best.feasible = true;
      best.violation = o.best_feasible_violation;
    }
  }
  if (!best.feasible) {
    for (const auto& o : results) {
      if (o.least_violation < least_violation) {
        least_violation = o.least_violation;
        best.x = o.least_violating_x;
        best.value = o.least_violating_value;
        best.violation = o.least_violation;
        best.converged = false;
      }
    }
  }
  return best;
}

}  // namespace qmi
