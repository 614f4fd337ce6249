#include "odos/frame.hpp"

#include <algorithm>
#include <string>

namespace odos {

Hierarchy::Hierarchy(std::size_t n_units, std::vector<std::vector<std::size_t>> upper_memberships)
    : n_units_(n_units), upper_(std::move(upper_memberships)) {
  require(n_units_ >= 1, ErrorCode::InvalidArgument, "hierarchy needs at least one unit");
  cluster_counts_.reserve(upper_.size());
  for (std::size_t k = 0; k < upper_.size(); ++k) {
    const auto& membership = upper_[k];
    require(membership.size() == n_units_, ErrorCode::InvalidArgument,
            "hierarchy level " + std::to_string(k + 2) + " must map every unit");
    std::size_t max_cluster = 0;
    for (std::size_t c : membership) max_cluster = std::max(max_cluster, c);
    cluster_counts_.push_back(max_cluster + 1);
  }
}

std::size_t Hierarchy::cluster_of(std::size_t unit, std::size_t level) const {
  require(unit < n_units_, ErrorCode::InvalidArgument, "unit out of range");
  require(level >= 1 && level <= n_levels(), ErrorCode::InvalidArgument, "level out of range");
  if (level == 1) return unit;
  return upper_[level - 2][unit];
}

std::size_t Hierarchy::clusters_at(std::size_t level) const {
  require(level >= 1 && level <= n_levels(), ErrorCode::InvalidArgument, "level out of range");
  if (level == 1) return n_units_;
  return cluster_counts_[level - 2];
}

StudyFrame::StudyFrame(std::size_t n_units, std::size_t n_variables, std::vector<double> time_grid,
                       std::optional<Hierarchy> hierarchy, std::vector<Triple> inadmissible)
    : n_units_(n_units),
      n_variables_(n_variables),
      time_grid_(std::move(time_grid)),
      hierarchy_(std::move(hierarchy)),
      inadmissible_(std::move(inadmissible)) {
  require(n_units_ >= 1, ErrorCode::InvalidArgument, "frame needs N >= 1 units");
  require(n_variables_ >= 1, ErrorCode::InvalidArgument, "frame needs J >= 1 variables");
  require(!time_grid_.empty(), ErrorCode::InvalidArgument, "frame needs a non-empty time grid");
  for (std::size_t m = 1; m < time_grid_.size(); ++m) {
    require(time_grid_[m] > time_grid_[m - 1], ErrorCode::InvalidArgument,
            "time grid must be strictly increasing");
  }
  if (hierarchy_) {
    require(hierarchy_->n_units() == n_units_, ErrorCode::InvalidArgument,
            "hierarchy unit count must match frame");
  }
  std::sort(inadmissible_.begin(), inadmissible_.end());
  inadmissible_.erase(std::unique(inadmissible_.begin(), inadmissible_.end()),
                      inadmissible_.end());
  for (const Triple& t : inadmissible_) {
    require(in_bounds(t), ErrorCode::InvalidArgument, "inadmissible triple out of bounds");
  }
}

double StudyFrame::time_at(std::size_t index) const {
  require(index < time_grid_.size(), ErrorCode::InvalidArgument, "time index out of range");
  return time_grid_[index];
}

bool StudyFrame::admissible(const Triple& t) const {
  if (!in_bounds(t)) return false;
  return !std::binary_search(inadmissible_.begin(), inadmissible_.end(), t);
}

}  // namespace odos
