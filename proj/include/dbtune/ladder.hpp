#pragma once

#include <span>
#include <string>

namespace dbtune {

// A ladder is the ascending list of permitted sizes in MB (the granules).
// Tuning moves one rung at a time and estimates are quantized onto rungs.

/// Throws ValidationError unless the ladder is nonempty, positive and
/// strictly ascending.
void validate_ladder(std::span<const int> ladder, const std::string& name);

bool ladder_contains(std::span<const int> ladder, int value);

/// Index of `value` on the ladder; throws ValidationError if absent.
std::size_t ladder_index(std::span<const int> ladder, int value,
                         const std::string& name);

/// Smallest rung >= value; values above the top rung clamp to the top.
int ladder_quantize_up(std::span<const int> ladder, double value);

/// One rung from `current` toward `target` (both must be on the ladder).
/// Returns `current` when the two are equal.
int ladder_step_toward(std::span<const int> ladder, int current, int target,
                       const std::string& name);

}  // namespace dbtune
