#include "llab/field_io.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "llab/errors.hpp"

namespace llab {

namespace {

constexpr const char* kMagic = "LLAB-FLD";
constexpr int kVersion = 1;

std::vector<unsigned char> payload_bytes(const FieldRecord& r) {
  static_assert(std::endian::native == std::endian::little,
                "payload writer assumes a little-endian host");
  std::vector<unsigned char> bytes;
  bytes.resize((r.values.size() + r.omegas.size()) * sizeof(double));
  std::memcpy(bytes.data(), r.values.data(), r.values.size() * sizeof(double));
  std::memcpy(bytes.data() + r.values.size() * sizeof(double), r.omegas.data(),
              r.omegas.size() * sizeof(double));
  return bytes;
}

}  // namespace

std::string sha256_hex(std::span<const unsigned char> bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw IoError("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out(2 * len, '0');
  for (unsigned int i = 0; i < len; ++i) {
    out[2 * i] = hex[md[i] >> 4];
    out[2 * i + 1] = hex[md[i] & 0xf];
  }
  return out;
}

std::string sha256_hex(const std::string& text) {
  return sha256_hex(std::span<const unsigned char>(
      reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

std::string payload_sha256(const FieldRecord& record) {
  return sha256_hex(payload_bytes(record));
}

void save_field(const std::filesystem::path& path, const FieldRecord& r) {
  if (r.provenance.find('\n') != std::string::npos)
    throw FormatError("provenance must be a single line");
  const auto bytes = payload_bytes(r);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << kMagic << ' ' << kVersion << '\n'
      << "kind " << r.kind << '\n'
      << "dim " << r.dim << '\n'
      << "R0 " << r.R0 << '\n'
      << "n " << r.n << '\n'
      << "values " << r.values.size() << '\n'
      << "omegas " << r.omegas.size() << '\n'
      << "provenance " << r.provenance << '\n'
      << "sha256 " << sha256_hex(bytes) << '\n'
      << "end\n";
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

FieldRecord load_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty field file");
  {
    std::istringstream head(line);
    std::string magic;
    int version = 0;
    head >> magic >> version;
    if (magic != kMagic) throw FormatError("not a .fld file: " + path.string());
    if (version != kVersion)
      throw FormatError("unsupported .fld version " + std::to_string(version));
  }

  FieldRecord r;
  std::size_t value_count = 0, omega_count = 0;
  std::string expected_sha;
  bool have_end = false;
  while (std::getline(in, line)) {
    if (line == "end") {
      have_end = true;
      break;
    }
    const auto sep = line.find(' ');
    if (sep == std::string::npos) throw FormatError("malformed header line: " + line);
    const std::string key = line.substr(0, sep);
    const std::string value = line.substr(sep + 1);
    if (key == "kind") r.kind = value;
    else if (key == "dim") r.dim = std::stoi(value);
    else if (key == "R0") r.R0 = std::stoi(value);
    else if (key == "n") r.n = std::stoi(value);
    else if (key == "values") value_count = std::stoul(value);
    else if (key == "omegas") omega_count = std::stoul(value);
    else if (key == "provenance") r.provenance = value;
    else if (key == "sha256") expected_sha = value;
    else throw FormatError("unknown header key: " + key);
  }
  if (!have_end) throw FormatError("missing end-of-header marker");
  if (expected_sha.size() != 64) throw FormatError("missing or malformed sha256");

  r.values.resize(value_count);
  r.omegas.resize(omega_count);
  const std::size_t total_bytes = (value_count + omega_count) * sizeof(double);
  std::vector<unsigned char> bytes(total_bytes);
  in.read(reinterpret_cast<char*>(bytes.data()),
          static_cast<std::streamsize>(total_bytes));
  if (static_cast<std::size_t>(in.gcount()) != total_bytes)
    throw FormatError("truncated payload in " + path.string());

  if (sha256_hex(bytes) != expected_sha)
    throw ChecksumMismatch("payload checksum mismatch in " + path.string());

  std::memcpy(r.values.data(), bytes.data(), value_count * sizeof(double));
  std::memcpy(r.omegas.data(), bytes.data() + value_count * sizeof(double),
              omega_count * sizeof(double));
  return r;
}

}  // namespace llab
