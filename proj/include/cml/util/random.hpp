#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cml {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Stable child seed from a parent seed, a stage/method tag and an index.
/// Independent of call order, so replicate `i` always sees the same stream.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0) noexcept;

}  // namespace cml
