#ifndef MGRX_CONTAINER_HPP
#define MGRX_CONTAINER_HPP

#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include "mgrx/error.hpp"
#include "mgrx/grid.hpp"
#include "mgrx/quantize.hpp"

namespace mgrx {

enum class ElementType : std::uint8_t { f32 = 0, f64 = 1 };
enum class Method : std::uint8_t {
  multigrid_full = 0,
  multigrid_lorenzo = 1,
  lorenzo_only = 2,
};

inline std::size_t element_width(ElementType t) { return t == ElementType::f32 ? 4 : 8; }

std::uint32_t crc32(std::span<const std::uint8_t> data);

/// Little-endian byte builder for payload sections and headers.
struct ByteWriter {
  std::vector<std::uint8_t> bytes;

  void u8(std::uint8_t v) { bytes.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i) & 0xFF));
  }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    u64(bits);
  }
  void f32(float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    u32(bits);
  }
  void raw(std::span<const std::uint8_t> data) { bytes.insert(bytes.end(), data.begin(), data.end()); }
};

/// Bounds-checked little-endian reader; failures surface as corrupt/decode
/// errors rather than out-of-range reads.
struct ByteReader {
  std::span<const std::uint8_t> data;
  std::size_t pos = 0;

  std::size_t remaining() const { return data.size() - pos; }
  void need(std::size_t n) const {
    if (pos + n > data.size()) fail(errc::corrupt, "truncated artifact");
  }
  std::uint8_t u8() {
    need(1);
    return data[pos++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data[pos++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data[pos++]) << (8 * i);
    return v;
  }
  double f64() {
    std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
  float f32() {
    std::uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  std::span<const std::uint8_t> raw(std::size_t n) {
    need(n);
    std::span<const std::uint8_t> s = data.subspan(pos, n);
    pos += n;
    return s;
  }
};

/// Parsed container: header fields plus raw payload sections.
struct Artifact {
  std::uint8_t version = 1;
  ElementType element_type = ElementType::f64;
  Method method = Method::multigrid_full;
  Dims dims;
  std::uint8_t levels = 0;
  std::uint8_t stop_level = 0;
  QuantMode quant_mode = QuantMode::levelwise;
  double budget = 0.0;
  std::vector<double> bin_widths;
  std::vector<std::vector<std::uint8_t>> sections;
};

std::vector<std::uint8_t> write_artifact(const Artifact& a);
Artifact read_artifact(std::span<const std::uint8_t> bytes);

} // namespace mgrx

#endif
