#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "zifit/distributions.hpp"

namespace zifit {

// Sorted distinct observations with multiplicities. Likelihoods, fits and
// KS statistics only ever need this form, which makes them invariant under
// permutation of the raw data and cheap for count data with few levels.
struct WeightedSample {
  std::vector<double> values;
  std::vector<double> counts;
  std::size_t size = 0;

  static WeightedSample from(std::span<const double> data);

  bool empty() const noexcept { return size == 0; }
  std::size_t zero_count() const noexcept;
  std::size_t nonzero_count() const noexcept { return size - zero_count(); }
  WeightedSample nonzero() const;
  double max() const { return values.back(); }
  double min() const { return values.front(); }
};

// Validates every observation for the family and snaps discrete values to
// integers. Errors name the offending index.
std::vector<double> prepare_observations(Family family, std::span<const double> data);

}  // namespace zifit
