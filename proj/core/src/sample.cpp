#include "zifit/sample.hpp"

#include <algorithm>
#include <string>

#include "zifit/error.hpp"

namespace zifit {

WeightedSample WeightedSample::from(std::span<const double> data) {
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  WeightedSample out;
  out.size = sorted.size();
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    out.values.push_back(sorted[i]);
    out.counts.push_back(static_cast<double>(j - i));
    i = j;
  }
  return out;
}

std::size_t WeightedSample::zero_count() const noexcept {
  const auto it = std::lower_bound(values.begin(), values.end(), 0.0);
  if (it != values.end() && *it == 0.0) {
    return static_cast<std::size_t>(counts[static_cast<std::size_t>(it - values.begin())]);
  }
  return 0;
}

WeightedSample WeightedSample::nonzero() const {
  WeightedSample out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == 0.0) continue;
    out.values.push_back(values[i]);
    out.counts.push_back(counts[i]);
    out.size += static_cast<std::size_t>(counts[i]);
  }
  return out;
}

std::vector<double> prepare_observations(Family family, std::span<const double> data) {
  std::vector<double> out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    try {
      out.push_back(check_observation(family, data[i]));
    } catch (const Error& e) {
      fail(e.kind(), std::string(e.what()) + " at index " + std::to_string(i));
    }
  }
  return out;
}

}  // namespace zifit
