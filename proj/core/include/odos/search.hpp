#pragma once

#include <functional>
#include <optional>

#include "odos/monte_carlo.hpp"

namespace odos {

struct SearchBudget {
  enum class Kind { Cardinality, Cost };
  Kind kind = Kind::Cardinality;
  double limit = 0.0;
  std::optional<CostModel> cost;  // required for cost budgets

  static SearchBudget cardinality(std::size_t max_entries);
  static SearchBudget max_cost(double limit, CostModel cost);
};

// Atomic plan increments (typically one unit at one time) plus the budget
// they compete under.
struct CandidatePool {
  std::vector<MeasurementPlan> increments;
  SearchBudget budget;

  // One increment per unit: the unit measured on `variables` at `time_index`.
  static CandidatePool per_unit(FramePtr frame, std::vector<std::uint32_t> variables,
                                std::uint32_t time_index, SearchBudget budget);

  MeasurementPlan combined(const std::vector<std::size_t>& selected) const;
  bool feasible(const MeasurementPlan& plan) const;
};

void validate_pool(const CandidatePool& pool);

struct SearchTrace {
  std::size_t iteration = 0;
  std::size_t cardinality = 0;
  double utility = 0.0;
};

struct SearchResult {
  MeasurementPlan best;
  double best_utility = 0.0;
  std::vector<std::size_t> selected;  // increment indices, ascending
  std::vector<SearchTrace> trace;
  std::size_t evaluations = 0;
};

using PlanObjective = std::function<UtilityEstimate(const MeasurementPlan&)>;

// Evaluates every budget-feasible subset in lexicographic index order; ties
// therefore resolve to the lexicographically smallest index set.
SearchResult exhaustive_best(const CandidatePool& pool, const PlanObjective& objective,
                             std::size_t subset_limit = 100000);

// Adds the best-scoring increment while anything still fits the budget.
SearchResult greedy_augment(const CandidatePool& pool, const PlanObjective& objective);

// Pairwise replacement sweeps until a full sweep changes nothing. Default is
// first-improvement in index order; best-improvement behind the flag.
SearchResult exchange_improve(const SearchResult& initial, const CandidatePool& pool,
                              const PlanObjective& objective, bool best_improvement = false);

SearchResult make_initial(const CandidatePool& pool, std::vector<std::size_t> selected,
                          const PlanObjective& objective);

// Smallest n <= n_max with objective(n) >= target; the objective must be
// non-decreasing in n and deterministic (fixed per-n seeds).
std::size_t binary_search_sample_size(
    const std::function<UtilityEstimate(std::size_t)>& objective, double target,
    std::size_t n_max);

struct UnitCovariatePool {
  std::vector<std::uint32_t> units;
  Eigen::MatrixXd covariates;  // row i describes units[i]
};

// Greedy nearest-neighbour matching of units to experimental-design target
// points, without replacement, targets processed in order.
MeasurementPlan design_search_select(const std::vector<Eigen::VectorXd>& targets,
                                     const UnitCovariatePool& pool, FramePtr frame,
                                     std::uint32_t variable, std::uint32_t time_index);

}  // namespace odos
