#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "odos/error.hpp"

namespace odos {

// One (unit, variable, time) cell of the observational process. Time is the
// index of a point on the frame's grid, not a raw time value, so triples are
// hashable and totally ordered.
struct Triple {
  std::uint32_t unit = 0;
  std::uint32_t variable = 0;
  std::uint32_t time_index = 0;
  auto operator<=>(const Triple&) const = default;
};

// Cluster structure over units, constant in time. Level 1 is the units
// themselves; levels 2..K are supplied as unit -> cluster maps.
class Hierarchy {
 public:
  Hierarchy(std::size_t n_units, std::vector<std::vector<std::size_t>> upper_memberships);

  std::size_t n_levels() const { return upper_.size() + 1; }
  std::size_t n_units() const { return n_units_; }

  // level is 1-based; level 1 returns the unit itself.
  std::size_t cluster_of(std::size_t unit, std::size_t level) const;
  std::size_t clusters_at(std::size_t level) const;

 private:
  std::size_t n_units_;
  std::vector<std::vector<std::size_t>> upper_;   // [level-2][unit] -> cluster
  std::vector<std::size_t> cluster_counts_;       // per upper level
};

// The sampling frame: unit, variable and time-grid dimensions plus optional
// cluster hierarchy and optional per-cell admissibility restrictions.
class StudyFrame {
 public:
  StudyFrame(std::size_t n_units, std::size_t n_variables, std::vector<double> time_grid,
             std::optional<Hierarchy> hierarchy = std::nullopt,
             std::vector<Triple> inadmissible = {});

  std::size_t n_units() const { return n_units_; }
  std::size_t n_variables() const { return n_variables_; }
  const std::vector<double>& time_grid() const { return time_grid_; }
  std::size_t n_times() const { return time_grid_.size(); }
  double time_at(std::size_t index) const;
  const std::optional<Hierarchy>& hierarchy() const { return hierarchy_; }

  bool in_bounds(const Triple& t) const {
    return t.unit < n_units_ && t.variable < n_variables_ && t.time_index < time_grid_.size();
  }
  bool admissible(const Triple& t) const;

 private:
  std::size_t n_units_;
  std::size_t n_variables_;
  std::vector<double> time_grid_;
  std::optional<Hierarchy> hierarchy_;
  std::vector<Triple> inadmissible_;  // sorted
};

using FramePtr = std::shared_ptr<const StudyFrame>;

inline FramePtr make_frame(std::size_t n_units, std::size_t n_variables,
                           std::vector<double> time_grid,
                           std::optional<Hierarchy> hierarchy = std::nullopt,
                           std::vector<Triple> inadmissible = {}) {
  return std::make_shared<const StudyFrame>(n_units, n_variables, std::move(time_grid),
                                            std::move(hierarchy), std::move(inadmissible));
}

}  // namespace odos
