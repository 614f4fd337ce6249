#pragma once

#include <iosfwd>
#include <map>
#include <optional>

#include "odos/frame.hpp"
#include "odos/plan.hpp"

namespace odos {

// Observed values keyed by cell; a cell absent from the map is Missing.
// Missingness is structural, never an in-band numeric code.
class Dataset {
 public:
  explicit Dataset(FramePtr frame);
  Dataset(FramePtr frame, std::map<Triple, double> values);

  const FramePtr& frame() const { return frame_; }
  const std::map<Triple, double>& values() const { return values_; }
  std::size_t n_observed() const { return values_.size(); }
  bool observed(const Triple& t) const { return values_.count(t) > 0; }
  std::optional<double> value(const Triple& t) const;

  // Union of two datasets over the same frame; overlapping cells are an error.
  Dataset merged_with(const Dataset& other) const;

  // Observed cells as a plan (the realized observational process).
  MeasurementPlan observed_plan() const;

 private:
  FramePtr frame_;
  std::map<Triple, double> values_;
};

// CSV with header `unit,variable,time_index,value`; the literal token NA
// denotes Missing and contributes no entry.
Dataset read_dataset_csv(FramePtr frame, std::istream& in);
void write_dataset_csv(const Dataset& data, std::ostream& out);

}  // namespace odos
