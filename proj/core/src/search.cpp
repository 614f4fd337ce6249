#include "odos/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "odos/parallel.hpp"

namespace odos {

SearchBudget SearchBudget::cardinality(std::size_t max_entries) {
  SearchBudget b;
  b.kind = Kind::Cardinality;
  b.limit = static_cast<double>(max_entries);
  return b;
}

SearchBudget SearchBudget::max_cost(double limit, CostModel cost) {
  validate_cost_model(cost);
  SearchBudget b;
  b.kind = Kind::Cost;
  b.limit = limit;
  b.cost = std::move(cost);
  return b;
}

CandidatePool CandidatePool::per_unit(FramePtr frame, std::vector<std::uint32_t> variables,
                                      std::uint32_t time_index, SearchBudget budget) {
  require(frame != nullptr, ErrorCode::InvalidArgument, "pool needs a frame");
  CandidatePool pool;
  pool.budget = std::move(budget);
  pool.increments.reserve(frame->n_units());
  for (std::uint32_t u = 0; u < frame->n_units(); ++u) {
    std::vector<Triple> entries;
    entries.reserve(variables.size());
    for (std::uint32_t j : variables) entries.push_back(Triple{u, j, time_index});
    pool.increments.emplace_back(frame, std::move(entries));
  }
  validate_pool(pool);
  return pool;
}

MeasurementPlan CandidatePool::combined(const std::vector<std::size_t>& selected) const {
  require(!increments.empty(), ErrorCode::InvalidArgument, "pool is empty");
  MeasurementPlan plan = MeasurementPlan::empty(increments.front().frame());
  for (std::size_t i : selected) {
    require(i < increments.size(), ErrorCode::InvalidArgument, "increment index out of range");
    plan = plan_union(plan, increments[i]);
  }
  return plan;
}

bool CandidatePool::feasible(const MeasurementPlan& plan) const {
  if (budget.kind == SearchBudget::Kind::Cardinality) {
    return static_cast<double>(plan.cardinality()) <= budget.limit;
  }
  return plan_cost(plan, *budget.cost) <= budget.limit;
}

void validate_pool(const CandidatePool& pool) {
  require(!pool.increments.empty(), ErrorCode::InvalidArgument, "pool needs increments");
  require(pool.budget.limit >= 0.0, ErrorCode::InvalidArgument, "budget must be >= 0");
  if (pool.budget.kind == SearchBudget::Kind::Cost) {
    require(pool.budget.cost.has_value(), ErrorCode::InvalidArgument,
            "cost budget needs a cost model");
  }
  const FramePtr& frame = pool.increments.front().frame();
  std::set<Triple> seen;
  for (const auto& inc : pool.increments) {
    require(inc.frame() == frame, ErrorCode::InvalidArgument,
            "pool increments must share a frame");
    for (const Triple& t : inc.entries()) {
      require(seen.insert(t).second, ErrorCode::InvalidArgument,
              "pool increments must be pairwise disjoint");
    }
  }
}

namespace {

struct BestTracker {
  bool have = false;
  double utility = 0.0;
  std::vector<std::size_t> selected;

  // Strict improvement only, so the first (lexicographically smallest) subset
  // encountered at a given value wins.
  void offer(double value, const std::vector<std::size_t>& subset) {
    if (!have || value > utility) {
      have = true;
      utility = value;
      selected = subset;
    }
  }
};

void enumerate_feasible(const CandidatePool& pool, std::vector<std::size_t>& subset,
                        std::size_t next,
                        const std::function<void(const std::vector<std::size_t>&)>& emit) {
  emit(subset);
  for (std::size_t i = next; i < pool.increments.size(); ++i) {
    subset.push_back(i);
    if (pool.feasible(pool.combined(subset))) {
      enumerate_feasible(pool, subset, i + 1, emit);
    }
    subset.pop_back();
  }
}

}  // namespace

SearchResult exhaustive_best(const CandidatePool& pool, const PlanObjective& objective,
                             std::size_t subset_limit) {
  validate_pool(pool);
  // Count first so SpaceTooLarge fires before any expensive evaluation.
  std::size_t count = 0;
  {
    std::vector<std::size_t> subset;
    enumerate_feasible(pool, subset, 0, [&](const std::vector<std::size_t>&) {
      ++count;
      require(count <= subset_limit, ErrorCode::SpaceTooLarge,
              "feasible subsets exceed limit " + std::to_string(subset_limit));
    });
  }
  SearchResult result{MeasurementPlan::empty(pool.increments.front().frame())};
  BestTracker best;
  std::vector<std::size_t> subset;
  std::size_t iteration = 0;
  enumerate_feasible(pool, subset, 0, [&](const std::vector<std::size_t>& s) {
    const MeasurementPlan plan = pool.combined(s);
    const UtilityEstimate est = objective(plan);
    ++result.evaluations;
    const bool improved = !best.have || est.mean > best.utility;
    best.offer(est.mean, s);
    if (improved) {
      result.trace.push_back({iteration, plan.cardinality(), est.mean});
    }
    ++iteration;
  });
  result.selected = best.selected;
  result.best = pool.combined(best.selected);
  result.best_utility = best.utility;
  return result;
}

SearchResult greedy_augment(const CandidatePool& pool, const PlanObjective& objective) {
  validate_pool(pool);
  SearchResult result{MeasurementPlan::empty(pool.increments.front().frame())};
  std::vector<std::size_t> selected;
  MeasurementPlan plan = result.best;
  double current_value = objective(plan).mean;
  ++result.evaluations;
  result.trace.push_back({0, 0, current_value});
  std::vector<bool> used(pool.increments.size(), false);
  std::size_t iteration = 0;
  for (;;) {
    // Candidates that still fit the budget when added.
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < pool.increments.size(); ++i) {
      if (used[i]) continue;
      if (pool.feasible(plan_union(plan, pool.increments[i]))) candidates.push_back(i);
    }
    if (candidates.empty()) break;
    std::vector<double> values(candidates.size());
    parallel_for(candidates.size(), [&](std::size_t c) {
      values[c] = objective(plan_union(plan, pool.increments[candidates[c]])).mean;
    });
    result.evaluations += candidates.size();
    std::size_t best_c = 0;
    for (std::size_t c = 1; c < candidates.size(); ++c) {
      if (values[c] > values[best_c]) best_c = c;  // ties keep the smaller index
    }
    const std::size_t chosen = candidates[best_c];
    used[chosen] = true;
    selected.push_back(chosen);
    plan = plan_union(plan, pool.increments[chosen]);
    current_value = values[best_c];
    ++iteration;
    result.trace.push_back({iteration, plan.cardinality(), current_value});
  }
  std::sort(selected.begin(), selected.end());
  result.selected = std::move(selected);
  result.best = plan;
  result.best_utility = current_value;
  return result;
}

SearchResult make_initial(const CandidatePool& pool, std::vector<std::size_t> selected,
                          const PlanObjective& objective) {
  validate_pool(pool);
  std::sort(selected.begin(), selected.end());
  SearchResult result{pool.combined(selected)};
  require(pool.feasible(result.best), ErrorCode::InvalidArgument,
          "initial selection violates the budget");
  result.selected = std::move(selected);
  result.best_utility = objective(result.best).mean;
  result.evaluations = 1;
  result.trace.push_back({0, result.best.cardinality(), result.best_utility});
  return result;
}

SearchResult exchange_improve(const SearchResult& initial, const CandidatePool& pool,
                              const PlanObjective& objective, bool best_improvement) {
  validate_pool(pool);
  constexpr double kTolerance = 1e-10;
  SearchResult result = initial;
  std::vector<std::size_t> selected = initial.selected;
  require(pool.feasible(pool.combined(selected)), ErrorCode::InvalidArgument,
          "initial selection violates the budget");
  double current_value = initial.best_utility;
  std::size_t iteration = initial.trace.empty() ? 0 : initial.trace.back().iteration;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t pos = 0; pos < selected.size(); ++pos) {
      std::vector<bool> in_use(pool.increments.size(), false);
      for (std::size_t i : selected) in_use[i] = true;
      std::vector<std::size_t> replacements;
      for (std::size_t j = 0; j < pool.increments.size(); ++j) {
        if (!in_use[j]) replacements.push_back(j);
      }
      if (replacements.empty()) continue;
      std::vector<double> values(replacements.size(),
                                 -std::numeric_limits<double>::infinity());
      std::vector<char> ok(replacements.size(), 0);
      parallel_for(replacements.size(), [&](std::size_t r) {
        std::vector<std::size_t> trial = selected;
        trial[pos] = replacements[r];
        std::sort(trial.begin(), trial.end());
        const MeasurementPlan plan = pool.combined(trial);
        if (!pool.feasible(plan)) return;
        ok[r] = 1;
        values[r] = objective(plan).mean;
      });
      for (std::size_t r = 0; r < replacements.size(); ++r) {
        if (ok[r]) ++result.evaluations;
      }
      std::size_t chosen = replacements.size();
      if (best_improvement) {
        for (std::size_t r = 0; r < replacements.size(); ++r) {
          if (!ok[r] || values[r] <= current_value + kTolerance) continue;
          if (chosen == replacements.size() || values[r] > values[chosen]) chosen = r;
        }
      } else {
        // First strict improvement in index order.
        for (std::size_t r = 0; r < replacements.size(); ++r) {
          if (ok[r] && values[r] > current_value + kTolerance) {
            chosen = r;
            break;
          }
        }
      }
      if (chosen < replacements.size()) {
        selected[pos] = replacements[chosen];
        std::sort(selected.begin(), selected.end());
        current_value = values[chosen];
        changed = true;
        ++iteration;
        result.trace.push_back(
            {iteration, pool.combined(selected).cardinality(), current_value});
      }
    }
  }
  result.selected = selected;
  result.best = pool.combined(selected);
  result.best_utility = current_value;
  return result;
}

std::size_t binary_search_sample_size(
    const std::function<UtilityEstimate(std::size_t)>& objective, double target,
    std::size_t n_max) {
  if (objective(0).mean >= target) return 0;
  require(objective(n_max).mean >= target, ErrorCode::Infeasible,
          "objective(n_max) below target");
  std::size_t lo = 0;   // objective(lo) < target
  std::size_t hi = n_max;  // objective(hi) >= target
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (objective(mid).mean >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

MeasurementPlan design_search_select(const std::vector<Eigen::VectorXd>& targets,
                                     const UnitCovariatePool& pool, FramePtr frame,
                                     std::uint32_t variable, std::uint32_t time_index) {
  require(pool.units.size() == static_cast<std::size_t>(pool.covariates.rows()),
          ErrorCode::InvalidArgument, "pool units/covariates mismatch");
  require(targets.size() <= pool.units.size(), ErrorCode::PoolExhausted,
          "more targets than available units");
  std::vector<bool> used(pool.units.size(), false);
  std::vector<Triple> entries;
  entries.reserve(targets.size());
  for (const Eigen::VectorXd& target : targets) {
    require(target.size() == pool.covariates.cols(), ErrorCode::DimensionMismatch,
            "target dimension mismatch");
    std::size_t best = pool.units.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pool.units.size(); ++i) {
      if (used[i]) continue;
      const double dist = (pool.covariates.row(i).transpose() - target).norm();
      if (dist < best_dist ||
          (dist == best_dist && best < pool.units.size() &&
           pool.units[i] < pool.units[best])) {
        best_dist = dist;
        best = i;
      }
    }
    require(best < pool.units.size(), ErrorCode::PoolExhausted, "no unused unit left");
    used[best] = true;
    entries.push_back(Triple{pool.units[best], variable, time_index});
  }
  return MeasurementPlan(std::move(frame), std::move(entries));
}

}  // namespace odos
