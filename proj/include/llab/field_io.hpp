#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace llab {

// .fld container: a line-oriented text header (format version, grid
// descriptor, provenance, SHA-256 of the payload) terminated by "end",
// followed by the raw little-endian float64 payload in row-major index
// order (values first, then the omega amplitudes when present).
struct FieldRecord {
  std::string kind;  // "potential" or "landscape"
  int dim = 1;
  int R0 = 1;
  int n = 2;
  std::string provenance = "{}";  // single-line JSON
  std::vector<double> values;
  std::vector<double> omegas;
};

std::string sha256_hex(std::span<const unsigned char> bytes);
std::string sha256_hex(const std::string& text);
std::string payload_sha256(const FieldRecord& record);

void save_field(const std::filesystem::path& path, const FieldRecord& record);
FieldRecord load_field(const std::filesystem::path& path);

}  // namespace llab
