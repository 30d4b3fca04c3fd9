#include "dbtune/ladder.hpp"

#include <algorithm>

#include "dbtune/errors.hpp"

namespace dbtune {

void validate_ladder(std::span<const int> ladder, const std::string& name) {
  if (ladder.empty()) {
    throw ValidationError(name + ": ladder must not be empty");
  }
  if (ladder.front() <= 0) {
    throw ValidationError(name + ": ladder sizes must be positive");
  }
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    if (ladder[i] <= ladder[i - 1]) {
      throw ValidationError(name + ": ladder must be strictly ascending");
    }
  }
}

bool ladder_contains(std::span<const int> ladder, int value) {
  return std::find(ladder.begin(), ladder.end(), value) != ladder.end();
}

std::size_t ladder_index(std::span<const int> ladder, int value,
                         const std::string& name) {
  const auto it = std::find(ladder.begin(), ladder.end(), value);
  if (it == ladder.end()) {
    throw ValidationError(name + ": size " + std::to_string(value) +
                          " MB is not a ladder granule");
  }
  return static_cast<std::size_t>(it - ladder.begin());
}

int ladder_quantize_up(std::span<const int> ladder, double value) {
  for (int rung : ladder) {
    if (value <= static_cast<double>(rung)) return rung;
  }
  return ladder.back();
}

int ladder_step_toward(std::span<const int> ladder, int current, int target,
                       const std::string& name) {
  const std::size_t cur = ladder_index(ladder, current, name);
  const std::size_t tgt = ladder_index(ladder, target, name);
  if (tgt > cur) return ladder[cur + 1];
  if (tgt < cur) return ladder[cur - 1];
  return current;
}

}  // namespace dbtune
