#include "chaos_ns_cli/io.hpp"

#include <boost/uuid/detail/sha1.hpp>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include "chaos_ns/snapshot.hpp"

namespace chaos_ns::cli {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> headers) : headers_(std::move(headers)) {
  for (std::size_t i = 0; i < headers_.size(); ++i) {
    if (i) text_ += ',';
    text_ += headers_[i];
  }
  text_ += '\n';
}

void CsvTable::add_row(std::span<const double> values) {
  if (values.size() != headers_.size()) throw std::logic_error("CSV row width does not match the header");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) text_ += ',';
    text_ += format_double(values[i]);
  }
  text_ += '\n';
  ++rows_;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  write_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string git_blob_hash(std::string_view bytes) {
  boost::uuids::detail::sha1 sha;
  const std::string header = "blob " + std::to_string(bytes.size()) + '\0';
  sha.process_bytes(header.data(), header.size());
  sha.process_bytes(bytes.data(), bytes.size());
  unsigned int digest[5];
  sha.get_digest(digest);
  char hex[41];
  for (int i = 0; i < 5; ++i) std::snprintf(hex + 8 * i, 9, "%08x", digest[i]);
  return {hex, 40};
}

std::string git_blob_hash(std::span<const std::uint8_t> bytes) {
  return git_blob_hash(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::vector<std::uint8_t> snapshot_bytes(const SpectralField& field) { return encode_snapshot(to_grid(field)); }

}  // namespace chaos_ns::cli
