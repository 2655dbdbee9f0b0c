#include "chaos_ns/snapshot.hpp"

#include <bit>
#include <cstring>
#include <string>

#include "chaos_ns/errors.hpp"

namespace chaos_ns {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void put_f64(std::vector<std::uint8_t>& out, double x) {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(in[at + static_cast<std::size_t>(b)]) << (8 * b);
  return v;
}

double get_f64(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(in[at + static_cast<std::size_t>(b)]) << (8 * b);
  return std::bit_cast<double>(v);
}

}  // namespace

std::vector<std::uint8_t> encode_snapshot(const VectorSamples& samples) {
  const Grid& g = samples.grid;
  std::vector<std::uint8_t> out{'S', 'N', 'S', 'F'};
  out.reserve(16 + 8 * Grid::kDim * g.physical_size());
  put_u32(out, kSnapshotVersion);
  put_u32(out, static_cast<std::uint32_t>(Grid::kDim));
  put_u32(out, static_cast<std::uint32_t>(g.n()));
  for (const auto& comp : samples.components) {
    if (comp.size() != g.physical_size()) throw Error(ErrorCode::ShapeMismatch, "sample count does not match grid");
    for (double x : comp) put_f64(out, x);
  }
  return out;
}

VectorSamples decode_snapshot(std::span<const std::uint8_t> bytes, double length) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), "SNSF", 4) != 0)
    throw Error(ErrorCode::FormatError, "missing SNSF magic");
  const std::uint32_t version = get_u32(bytes, 4);
  if (version != kSnapshotVersion) throw Error(ErrorCode::FormatError, "unsupported SNSF version " + std::to_string(version));
  const std::uint32_t d = get_u32(bytes, 8);
  if (d != static_cast<std::uint32_t>(Grid::kDim)) throw Error(ErrorCode::FormatError, "only d = 2 snapshots are supported");
  const std::uint32_t n = get_u32(bytes, 12);
  const Grid g(static_cast<int>(n), length);
  const std::size_t expected = 16 + 8 * Grid::kDim * g.physical_size();
  if (bytes.size() != expected)
    throw Error(ErrorCode::FormatError, "SNSF payload is " + std::to_string(bytes.size()) + " bytes, expected " +
                                            std::to_string(expected));
  VectorSamples out(g);
  std::size_t at = 16;
  for (auto& comp : out.components)
    for (double& x : comp) {
      x = get_f64(bytes, at);
      at += 8;
    }
  return out;
}

}  // namespace chaos_ns
