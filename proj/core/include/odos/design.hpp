#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "odos/plan.hpp"
#include "odos/rng.hpp"

namespace odos {

struct DeterministicDesign {
  MeasurementPlan plan;
};

// Uniform choice of a unit subset, measured on one variable block at one time
// point. General random designs are expressed as WeightedPlans.
struct SimpleRandomSampleDesign {
  FramePtr frame;
  std::size_t sample_size = 0;
  std::vector<std::uint32_t> variables;
  std::uint32_t time_index = 0;
};

struct WeightedPlansDesign {
  std::vector<std::pair<MeasurementPlan, double>> support;
};

// A probability measure over measurement plans.
class Design {
 public:
  static Design deterministic(MeasurementPlan plan);
  static Design null_design(FramePtr frame);
  static Design simple_random_sample(FramePtr frame, std::size_t sample_size,
                                     std::vector<std::uint32_t> variables,
                                     std::uint32_t time_index);
  static Design weighted(std::vector<std::pair<MeasurementPlan, double>> support);

  bool is_deterministic() const {
    return std::holds_alternative<DeterministicDesign>(value_);
  }
  const FramePtr& frame() const { return frame_; }

  template <typename Visitor>
  decltype(auto) visit(Visitor&& v) const {
    return std::visit(std::forward<Visitor>(v), value_);
  }

 private:
  using Variant = std::variant<DeterministicDesign, SimpleRandomSampleDesign, WeightedPlansDesign>;
  Design(Variant value, FramePtr frame) : value_(std::move(value)), frame_(std::move(frame)) {}

  Variant value_;
  FramePtr frame_;
};

inline constexpr std::size_t kDefaultSupportLimit = 1'000'000;

// Full support with probabilities; throws SupportTooLarge when enumeration
// would exceed `limit` plans.
std::vector<std::pair<MeasurementPlan, double>> design_support(
    const Design& design, std::size_t limit = kDefaultSupportLimit);

std::size_t design_support_size(const Design& design, std::size_t cap = kDefaultSupportLimit);

MeasurementPlan sample_plan(const Design& design, Rng& rng);

}  // namespace odos
