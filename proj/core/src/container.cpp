#include "mgrx/container.hpp"

#include <array>

namespace mgrx {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'M', 'G', 'R', 'X'};
constexpr std::uint8_t kVersion = 1;
constexpr std::uint8_t kMaxNdims = 8;

std::array<std::uint32_t, 256> make_crc_table() {
  std::array<std::uint32_t, 256> table{};
  for (std::uint32_t i = 0; i < 256; ++i) {
    std::uint32_t c = i;
    for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
    table[i] = c;
  }
  return table;
}

} // namespace

std::uint32_t crc32(std::span<const std::uint8_t> data) {
  static const std::array<std::uint32_t, 256> table = make_crc_table();
  std::uint32_t c = 0xFFFFFFFFu;
  for (std::uint8_t b : data) c = table[(c ^ b) & 0xFF] ^ (c >> 8);
  return c ^ 0xFFFFFFFFu;
}

std::vector<std::uint8_t> write_artifact(const Artifact& a) {
  if (a.dims.empty() || a.dims.size() > kMaxNdims) fail(errc::invalid_input, "bad rank");
  if (a.bin_widths.size() != static_cast<std::size_t>(a.levels) + 1)
    fail(errc::invalid_input, "bin width count must be levels + 1");
  if (a.sections.size() > 255) fail(errc::invalid_input, "too many sections");

  ByteWriter w;
  w.raw(kMagic);
  w.u8(kVersion);
  w.u8(static_cast<std::uint8_t>(a.element_type));
  w.u8(static_cast<std::uint8_t>(a.method));
  w.u8(static_cast<std::uint8_t>(a.dims.size()));
  for (std::size_t d : a.dims) w.u64(d);
  w.u8(a.levels);
  w.u8(a.stop_level);
  w.u8(static_cast<std::uint8_t>(a.quant_mode));
  w.f64(a.budget);
  for (double q : a.bin_widths) w.f64(q);
  w.u8(static_cast<std::uint8_t>(a.sections.size()));
  for (const auto& s : a.sections) w.u64(s.size());
  for (const auto& s : a.sections) w.raw(s);
  w.u32(crc32(w.bytes));
  return std::move(w.bytes);
}

Artifact read_artifact(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagic.size() + 1) fail(errc::not_an_artifact, "too short");
  for (std::size_t i = 0; i < kMagic.size(); ++i)
    if (bytes[i] != kMagic[i]) fail(errc::not_an_artifact, "bad magic");
  if (bytes[4] != kVersion)
    fail(errc::unsupported_version, "unsupported version " + std::to_string(bytes[4]));
  if (bytes.size() < kMagic.size() + 1 + 4) fail(errc::corrupt, "truncated artifact");

  const std::uint32_t stored = static_cast<std::uint32_t>(bytes[bytes.size() - 4]) |
                               static_cast<std::uint32_t>(bytes[bytes.size() - 3]) << 8 |
                               static_cast<std::uint32_t>(bytes[bytes.size() - 2]) << 16 |
                               static_cast<std::uint32_t>(bytes[bytes.size() - 1]) << 24;
  if (crc32(bytes.first(bytes.size() - 4)) != stored) fail(errc::corrupt, "checksum mismatch");

  ByteReader r{bytes.first(bytes.size() - 4)};
  r.pos = 5;  // magic + version
  Artifact a;
  a.version = kVersion;
  const std::uint8_t elem = r.u8();
  if (elem > 1) fail(errc::corrupt, "bad element type");
  a.element_type = static_cast<ElementType>(elem);
  const std::uint8_t method = r.u8();
  if (method > 2) fail(errc::corrupt, "bad method tag");
  a.method = static_cast<Method>(method);
  const std::uint8_t ndims = r.u8();
  if (ndims == 0 || ndims > kMaxNdims) fail(errc::corrupt, "bad rank");
  a.dims.resize(ndims);
  for (std::uint8_t i = 0; i < ndims; ++i) {
    a.dims[i] = r.u64();
    if (a.dims[i] < 2) fail(errc::corrupt, "bad dimension");
  }
  a.levels = r.u8();
  a.stop_level = r.u8();
  if (a.stop_level > a.levels) fail(errc::corrupt, "stop level exceeds level count");
  const std::uint8_t qmode = r.u8();
  if (qmode > 1) fail(errc::corrupt, "bad quantization mode");
  a.quant_mode = static_cast<QuantMode>(qmode);
  a.budget = r.f64();
  a.bin_widths.resize(static_cast<std::size_t>(a.levels) + 1);
  for (double& q : a.bin_widths) q = r.f64();
  const std::uint8_t nsect = r.u8();
  std::vector<std::uint64_t> lengths(nsect);
  std::uint64_t total = 0;
  for (auto& len : lengths) {
    len = r.u64();
    total += len;
  }
  if (total != r.remaining()) fail(errc::corrupt, "section lengths do not match payload size");
  a.sections.reserve(nsect);
  for (std::uint64_t len : lengths) {
    auto s = r.raw(static_cast<std::size_t>(len));
    a.sections.emplace_back(s.begin(), s.end());
  }
  return a;
}

} // namespace mgrx
