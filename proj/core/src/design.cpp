#include "odos/design.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace odos {

namespace {

MeasurementPlan srs_subset_plan(const SimpleRandomSampleDesign& srs,
                                const std::vector<std::uint32_t>& units) {
  std::vector<Triple> entries;
  entries.reserve(units.size() * srs.variables.size());
  for (std::uint32_t u : units) {
    for (std::uint32_t j : srs.variables) {
      entries.push_back(Triple{u, j, srs.time_index});
    }
  }
  return MeasurementPlan(srs.frame, std::move(entries));
}

// C(n, k) capped; returns cap + 1 once the count exceeds cap.
std::size_t binomial_capped(std::size_t n, std::size_t k, std::size_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  long double c = 1.0L;
  for (std::size_t i = 1; i <= k; ++i) {
    c *= static_cast<long double>(n - k + i);
    c /= static_cast<long double>(i);
    if (c > static_cast<long double>(cap)) return cap + 1;
  }
  return static_cast<std::size_t>(c + 0.5L);
}

}  // namespace

Design Design::deterministic(MeasurementPlan plan) {
  FramePtr frame = plan.frame();
  return Design(DeterministicDesign{std::move(plan)}, std::move(frame));
}

Design Design::null_design(FramePtr frame) {
  return deterministic(MeasurementPlan::empty(std::move(frame)));
}

Design Design::simple_random_sample(FramePtr frame, std::size_t sample_size,
                                    std::vector<std::uint32_t> variables,
                                    std::uint32_t time_index) {
  require(frame != nullptr, ErrorCode::InvalidArgument, "SRS design needs a frame");
  require(sample_size <= frame->n_units(), ErrorCode::InvalidArgument,
          "SRS sample size exceeds N");
  require(!variables.empty(), ErrorCode::InvalidArgument, "SRS needs a variable set");
  std::sort(variables.begin(), variables.end());
  variables.erase(std::unique(variables.begin(), variables.end()), variables.end());
  for (std::uint32_t j : variables) {
    require(j < frame->n_variables(), ErrorCode::InvalidArgument, "SRS variable out of range");
  }
  require(time_index < frame->n_times(), ErrorCode::InvalidArgument, "SRS time out of range");
  SimpleRandomSampleDesign srs{frame, sample_size, std::move(variables), time_index};
  return Design(std::move(srs), std::move(frame));
}

Design Design::weighted(std::vector<std::pair<MeasurementPlan, double>> support) {
  require(!support.empty(), ErrorCode::InvalidArgument, "weighted design needs plans");
  FramePtr frame = support.front().first.frame();
  double total = 0.0;
  for (const auto& [plan, p] : support) {
    require(plan.frame() == frame, ErrorCode::InvalidArgument,
            "weighted design plans must share a frame");
    require(p > 0.0, ErrorCode::InvalidArgument, "plan probabilities must be strictly positive");
    total += p;
  }
  require(std::abs(total - 1.0) <= 1e-12, ErrorCode::InvalidArgument,
          "plan probabilities must sum to 1 within 1e-12");
  return Design(WeightedPlansDesign{std::move(support)}, std::move(frame));
}

std::size_t design_support_size(const Design& design, std::size_t cap) {
  return design.visit(
      [&](const auto& d) -> std::size_t {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, DeterministicDesign>) {
          return 1;
        } else if constexpr (std::is_same_v<T, SimpleRandomSampleDesign>) {
          return binomial_capped(d.frame->n_units(), d.sample_size, cap);
        } else {
          return d.support.size();
        }
      });
}

std::vector<std::pair<MeasurementPlan, double>> design_support(const Design& design,
                                                               std::size_t limit) {
  return design.visit(
      [&](const auto& d) -> std::vector<std::pair<MeasurementPlan, double>> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, DeterministicDesign>) {
          return {{d.plan, 1.0}};
        } else if constexpr (std::is_same_v<T, SimpleRandomSampleDesign>) {
          const std::size_t n = d.frame->n_units();
          const std::size_t k = d.sample_size;
          std::size_t count = binomial_capped(n, k, limit);
          require(count <= limit, ErrorCode::SupportTooLarge,
                  "SRS support exceeds " + std::to_string(limit) +
                      " plans; use sample_plan instead");
          std::vector<std::pair<MeasurementPlan, double>> support;
          support.reserve(count);
          const double prob = 1.0 / static_cast<double>(count);
          // Lexicographic enumeration of k-subsets of {0..n-1}.
          std::vector<std::uint32_t> subset(k);
          for (std::size_t i = 0; i < k; ++i) subset[i] = static_cast<std::uint32_t>(i);
          for (;;) {
            support.emplace_back(srs_subset_plan(d, subset), prob);
            if (k == 0) break;
            std::size_t i = k;
            while (i > 0 && subset[i - 1] == n - k + i - 1) --i;
            if (i == 0) break;
            ++subset[i - 1];
            for (std::size_t j = i; j < k; ++j) subset[j] = subset[j - 1] + 1;
          }
          return support;
        } else {
          return d.support;
        }
      });
}

MeasurementPlan sample_plan(const Design& design, Rng& rng) {
  return design.visit(
      [&](const auto& d) -> MeasurementPlan {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, DeterministicDesign>) {
          return d.plan;
        } else if constexpr (std::is_same_v<T, SimpleRandomSampleDesign>) {
          const std::size_t n = d.frame->n_units();
          std::vector<std::uint32_t> pool(n);
          for (std::size_t i = 0; i < n; ++i) pool[i] = static_cast<std::uint32_t>(i);
          // Partial Fisher-Yates: uniform k-subset without replacement.
          for (std::size_t i = 0; i < d.sample_size; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, n - 1);
            std::swap(pool[i], pool[pick(rng)]);
          }
          pool.resize(d.sample_size);
          std::sort(pool.begin(), pool.end());
          return srs_subset_plan(d, pool);
        } else {
          std::uniform_real_distribution<double> u01(0.0, 1.0);
          double u = u01(rng);
          double cumulative = 0.0;
          for (const auto& [plan, p] : d.support) {
            cumulative += p;
            if (u < cumulative) return plan;
          }
          return d.support.back().first;
        }
      });
}

}  // namespace odos
