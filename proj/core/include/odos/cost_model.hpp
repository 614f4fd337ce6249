#pragma once

#include <variant>
#include <vector>

#include "odos/plan.hpp"

namespace odos {

struct PerMeasurementCost {
  double per_entry = 0.0;
};

// Cost per activated cluster at each hierarchy level; level_costs[k-1] is the
// unit cost c_k for level k.
struct HierarchicalCost {
  std::vector<double> level_costs;
};

struct CombinedCost {
  PerMeasurementCost per_measurement;
  HierarchicalCost hierarchical;
};

using CostModel = std::variant<PerMeasurementCost, HierarchicalCost, CombinedCost>;

void validate_cost_model(const CostModel& cost);

// Total cost of a plan. Hierarchical terms count distinct clusters containing
// at least one selected unit, per level; requires a frame hierarchy.
double plan_cost(const MeasurementPlan& plan, const CostModel& cost);

}  // namespace odos
