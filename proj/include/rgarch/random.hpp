#pragma once

#include <cstdint>
#include <random>

namespace rgarch {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// Seed of stream `index` (and optional `sub`) derived from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t sub = 0) noexcept;

/// Engine for stream(master, index[, sub]). Distinct indices give independent-looking streams.
Engine make_stream(std::uint64_t master, std::uint64_t index, std::uint64_t sub = 0);

}  // namespace rgarch
