#include "odos/plan.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace odos {

MeasurementPlan::MeasurementPlan(FramePtr frame, std::vector<Triple> entries)
    : frame_(std::move(frame)), entries_(std::move(entries)) {
  require(frame_ != nullptr, ErrorCode::InvalidArgument, "plan needs a frame");
  std::sort(entries_.begin(), entries_.end());
  auto dup = std::adjacent_find(entries_.begin(), entries_.end());
  require(dup == entries_.end(), ErrorCode::InvalidArgument, "duplicate plan triple");
  for (const Triple& t : entries_) {
    require(frame_->in_bounds(t), ErrorCode::InvalidArgument, "plan triple out of frame bounds");
    require(frame_->admissible(t), ErrorCode::InvalidArgument, "plan triple not admissible");
  }
}

bool MeasurementPlan::contains(const Triple& t) const {
  return std::binary_search(entries_.begin(), entries_.end(), t);
}

std::size_t plan_cardinality(const MeasurementPlan& plan) { return plan.cardinality(); }

namespace {
void require_same_frame(const MeasurementPlan& a, const MeasurementPlan& b) {
  require(a.frame() == b.frame(), ErrorCode::InvalidArgument,
          "plan set operations need a shared frame");
}
}  // namespace

MeasurementPlan plan_union(const MeasurementPlan& a, const MeasurementPlan& b) {
  require_same_frame(a, b);
  std::vector<Triple> merged;
  merged.reserve(a.cardinality() + b.cardinality());
  std::set_union(a.entries().begin(), a.entries().end(), b.entries().begin(), b.entries().end(),
                 std::back_inserter(merged));
  return MeasurementPlan(a.frame(), std::move(merged));
}

MeasurementPlan plan_intersection(const MeasurementPlan& a, const MeasurementPlan& b) {
  require_same_frame(a, b);
  std::vector<Triple> common;
  std::set_intersection(a.entries().begin(), a.entries().end(), b.entries().begin(),
                        b.entries().end(), std::back_inserter(common));
  return MeasurementPlan(a.frame(), std::move(common));
}

void write_plan_csv(const MeasurementPlan& plan, std::ostream& out) {
  out << "unit,variable,time_index\n";
  for (const Triple& t : plan.entries()) {
    out << t.unit << ',' << t.variable << ',' << t.time_index << '\n';
  }
}

MeasurementPlan read_plan_csv(FramePtr frame, std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::ParseError, "empty plan CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "unit,variable,time_index", ErrorCode::ParseError,
          "plan CSV header must be unit,variable,time_index");
  std::vector<Triple> entries;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    Triple t;
    std::uint32_t* slots[3] = {&t.unit, &t.variable, &t.time_index};
    for (int i = 0; i < 3; ++i) {
      require(static_cast<bool>(std::getline(row, field, ',')), ErrorCode::ParseError,
              "plan CSV line " + std::to_string(line_no) + ": expected 3 fields");
      try {
        *slots[i] = static_cast<std::uint32_t>(std::stoul(field));
      } catch (const std::exception&) {
        fail(ErrorCode::ParseError,
             "plan CSV line " + std::to_string(line_no) + ": bad integer '" + field + "'");
      }
    }
    entries.push_back(t);
  }
  return MeasurementPlan(std::move(frame), std::move(entries));
}

}  // namespace odos
