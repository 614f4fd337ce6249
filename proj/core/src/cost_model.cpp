#include "odos/cost_model.hpp"

#include <set>
#include <string>

namespace odos {

namespace {

void validate_per(const PerMeasurementCost& c) {
  require(c.per_entry >= 0.0, ErrorCode::InvalidArgument, "per-measurement cost must be >= 0");
}

void validate_hier(const HierarchicalCost& c) {
  require(!c.level_costs.empty(), ErrorCode::InvalidArgument,
          "hierarchical cost needs at least one level");
  for (double v : c.level_costs) {
    require(v >= 0.0, ErrorCode::InvalidArgument, "cluster costs must be >= 0");
  }
}

double hierarchical_cost(const MeasurementPlan& plan, const HierarchicalCost& cost) {
  const auto& hierarchy = plan.frame()->hierarchy();
  require(hierarchy.has_value(), ErrorCode::MissingHierarchy,
          "hierarchical cost needs a frame hierarchy");
  require(cost.level_costs.size() == hierarchy->n_levels(), ErrorCode::InvalidArgument,
          "cost levels (" + std::to_string(cost.level_costs.size()) +
              ") must match hierarchy levels (" + std::to_string(hierarchy->n_levels()) + ")");
  std::set<std::uint32_t> units;
  for (const Triple& t : plan.entries()) units.insert(t.unit);
  double total = 0.0;
  for (std::size_t level = 1; level <= hierarchy->n_levels(); ++level) {
    std::set<std::size_t> activated;
    for (std::uint32_t u : units) activated.insert(hierarchy->cluster_of(u, level));
    total += cost.level_costs[level - 1] * static_cast<double>(activated.size());
  }
  return total;
}

}  // namespace

void validate_cost_model(const CostModel& cost) {
  std::visit(
      [](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, PerMeasurementCost>) {
          validate_per(c);
        } else if constexpr (std::is_same_v<T, HierarchicalCost>) {
          validate_hier(c);
        } else {
          validate_per(c.per_measurement);
          validate_hier(c.hierarchical);
        }
      },
      cost);
}

double plan_cost(const MeasurementPlan& plan, const CostModel& cost) {
  return std::visit(
      [&](const auto& c) -> double {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, PerMeasurementCost>) {
          return c.per_entry * static_cast<double>(plan.cardinality());
        } else if constexpr (std::is_same_v<T, HierarchicalCost>) {
          if (plan.cardinality() == 0) return 0.0;
          return hierarchical_cost(plan, c);
        } else {
          double per = c.per_measurement.per_entry * static_cast<double>(plan.cardinality());
          double hier = plan.cardinality() == 0 ? 0.0 : hierarchical_cost(plan, c.hierarchical);
          return per + hier;
        }
      },
      cost);
}

}  // namespace odos
