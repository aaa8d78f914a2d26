#pragma once

#include <optional>

#include "portdecomp/problem.h"

namespace portdecomp::internal {

// Target k when the constraints consist only of linear rows of the form
// α·1ᵀx + κ ≤ 0 whose combined effect pins 1ᵀx to a single integer.
std::optional<int> FixedCardinality(const Miqcqp& problem);

}  // namespace portdecomp::internal
