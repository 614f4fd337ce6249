#include "odos/dataset.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace odos {

Dataset::Dataset(FramePtr frame) : frame_(std::move(frame)) {
  require(frame_ != nullptr, ErrorCode::InvalidArgument, "dataset needs a frame");
}

Dataset::Dataset(FramePtr frame, std::map<Triple, double> values)
    : frame_(std::move(frame)), values_(std::move(values)) {
  require(frame_ != nullptr, ErrorCode::InvalidArgument, "dataset needs a frame");
  for (const auto& [t, v] : values_) {
    require(frame_->in_bounds(t), ErrorCode::InvalidArgument, "dataset triple out of bounds");
    (void)v;
  }
}

std::optional<double> Dataset::value(const Triple& t) const {
  auto it = values_.find(t);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

Dataset Dataset::merged_with(const Dataset& other) const {
  require(frame_ == other.frame_, ErrorCode::InvalidArgument,
          "merged datasets must share a frame");
  std::map<Triple, double> merged = values_;
  for (const auto& [t, v] : other.values_) {
    auto [it, inserted] = merged.emplace(t, v);
    (void)it;
    require(inserted, ErrorCode::InvalidArgument, "datasets overlap on an observed cell");
  }
  return Dataset(frame_, std::move(merged));
}

MeasurementPlan Dataset::observed_plan() const {
  std::vector<Triple> entries;
  entries.reserve(values_.size());
  for (const auto& [t, v] : values_) {
    entries.push_back(t);
    (void)v;
  }
  return MeasurementPlan(frame_, std::move(entries));
}

Dataset read_dataset_csv(FramePtr frame, std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::ParseError, "empty dataset CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "unit,variable,time_index,value", ErrorCode::ParseError,
          "dataset CSV header must be unit,variable,time_index,value");
  std::map<Triple, double> values;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string u, j, m, v;
    bool ok = static_cast<bool>(std::getline(row, u, ',')) &&
              static_cast<bool>(std::getline(row, j, ',')) &&
              static_cast<bool>(std::getline(row, m, ',')) &&
              static_cast<bool>(std::getline(row, v));
    require(ok, ErrorCode::ParseError,
            "dataset CSV line " + std::to_string(line_no) + ": expected 4 fields");
    if (v == "NA") continue;
    Triple t;
    double value = 0.0;
    try {
      t.unit = static_cast<std::uint32_t>(std::stoul(u));
      t.variable = static_cast<std::uint32_t>(std::stoul(j));
      t.time_index = static_cast<std::uint32_t>(std::stoul(m));
      value = std::stod(v);
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, "dataset CSV line " + std::to_string(line_no) + ": bad field");
    }
    require(std::isfinite(value), ErrorCode::ParseError,
            "dataset CSV line " + std::to_string(line_no) + ": non-finite value");
    auto [it, inserted] = values.emplace(t, value);
    (void)it;
    require(inserted, ErrorCode::ParseError,
            "dataset CSV line " + std::to_string(line_no) + ": duplicate cell");
  }
  return Dataset(std::move(frame), std::move(values));
}

void write_dataset_csv(const Dataset& data, std::ostream& out) {
  out << "unit,variable,time_index,value\n";
  std::ostringstream number;
  number.precision(17);
  for (const auto& [t, v] : data.values()) {
    number.str("");
    number << v;
    out << t.unit << ',' << t.variable << ',' << t.time_index << ',' << number.str() << '\n';
  }
}

}  // namespace odos
