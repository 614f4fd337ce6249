#pragma once

#include <iosfwd>
#include <vector>

#include "odos/frame.hpp"

namespace odos {

// A measurement plan: the sparse set of cells selected for observation.
// Entries are kept sorted and unique, so plans compare and merge cheaply.
class MeasurementPlan {
 public:
  MeasurementPlan(FramePtr frame, std::vector<Triple> entries);

  static MeasurementPlan empty(FramePtr frame) { return MeasurementPlan(std::move(frame), {}); }

  const std::vector<Triple>& entries() const { return entries_; }
  std::size_t cardinality() const { return entries_.size(); }
  bool contains(const Triple& t) const;
  const FramePtr& frame() const { return frame_; }

  bool operator==(const MeasurementPlan& other) const { return entries_ == other.entries_; }

 private:
  FramePtr frame_;
  std::vector<Triple> entries_;
};

std::size_t plan_cardinality(const MeasurementPlan& plan);
MeasurementPlan plan_union(const MeasurementPlan& a, const MeasurementPlan& b);
MeasurementPlan plan_intersection(const MeasurementPlan& a, const MeasurementPlan& b);

// CSV with header `unit,variable,time_index`.
void write_plan_csv(const MeasurementPlan& plan, std::ostream& out);
MeasurementPlan read_plan_csv(FramePtr frame, std::istream& in);

}  // namespace odos
