#pragma once

// Output plumbing: CSV tables with lossless floats, file writes, SNSF
// snapshots and git-style blob hashes.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "chaos_ns/spectral_field.hpp"

namespace chaos_ns::cli {

/// Column-major-free CSV builder; every column header carries its unit.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> headers);

  void add_row(std::span<const double> values);
  void add_row(std::initializer_list<double> values) { add_row(std::span<const double>(values.begin(), values.size())); }

  [[nodiscard]] std::size_t columns() const noexcept { return headers_.size(); }
  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] const std::string& text() const noexcept { return text_; }

 private:
  std::vector<std::string> headers_;
  std::string text_;
  std::size_t rows_ = 0;
};

/// "%.17g"; integral values that fit print without exponent.
std::string format_double(double v);

/// Writes through a temporary file and renames. Throws std::runtime_error.
void write_file(const std::filesystem::path& path, std::string_view bytes);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

/// SHA-1 over "blob <size>\0" + bytes, lower-case hex.
std::string git_blob_hash(std::span<const std::uint8_t> bytes);
std::string git_blob_hash(std::string_view bytes);

std::vector<std::uint8_t> snapshot_bytes(const SpectralField& field);

}  // namespace chaos_ns::cli
