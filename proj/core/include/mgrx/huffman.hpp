#ifndef MGRX_HUFFMAN_HPP
#define MGRX_HUFFMAN_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace mgrx {

/// Canonical-Huffman encoding of a label sequence. The payload embeds the
/// code-length table (dense over [min, max] of the present symbols), so the
/// stream is self-describing apart from the symbol count.
std::vector<std::uint8_t> encode_labels(std::span<const std::int32_t> labels);

/// Inverse of encode_labels; throws decode_error on malformed input.
std::vector<std::int32_t> decode_labels(std::span<const std::uint8_t> bytes, std::size_t count);

} // namespace mgrx

#endif
