#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>

namespace macrostate {

/// Shortest decimal form that round-trips the exact double.
std::string format_double(double value);

std::uint64_t fnv1a64(std::span<const char> bytes);

/// "fnv1a64:<16 hex digits>" over the file's raw bytes.
std::string file_digest(const std::filesystem::path& path);

// Uniform draws built directly from engine output so streams do not depend
// on the standard library's distribution implementations.

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
}

inline double uniform_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

}  // namespace macrostate
