#pragma once

// SNSF binary field snapshots:
//   "SNSF" | version u32 LE | d u32 LE | n u32 LE | d*n^d f64 LE samples,
// row-major grid order per component, components concatenated.
// Encoding works on byte buffers; file access belongs to the caller.

#include <cstdint>
#include <span>
#include <vector>

#include "chaos_ns/spectral_field.hpp"

namespace chaos_ns {

inline constexpr std::uint32_t kSnapshotVersion = 1;

std::vector<std::uint8_t> encode_snapshot(const VectorSamples& samples);
/// Throws FormatError on bad magic, version, dimension or length.
VectorSamples decode_snapshot(std::span<const std::uint8_t> bytes, double length = 2.0 * std::numbers::pi);

}  // namespace chaos_ns
