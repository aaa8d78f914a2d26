#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace portdecomp {

// All randomness derives from one root seed. Each consumer asks for its own
// stream with DeriveSeed(root, "<stage>"), optionally followed by an index
// (seed number, asset pool, subproblem), so any single stage can be re-run
// in isolation and reproduce the same draws.
std::uint64_t DeriveSeed(std::uint64_t root, std::string_view stream);
std::uint64_t DeriveSeed(std::uint64_t root, std::string_view stream,
                         std::uint64_t index);

using Rng = std::mt19937_64;

inline Rng MakeRng(std::uint64_t seed) { return Rng(seed); }

}  // namespace portdecomp
