#include "mgrx/huffman.hpp"

#include <algorithm>
#include <cstring>
#include <queue>

#include "mgrx/error.hpp"

namespace mgrx {
namespace {

constexpr int kMaxCodeLen = 57;     // fits the 64-bit accumulator with room to refill
constexpr std::uint32_t kMaxRange = 1u << 17;
constexpr int kFastBits = 12;

struct BitWriter {
  std::vector<std::uint8_t>& out;
  std::uint64_t acc = 0;
  int nbits = 0;

  explicit BitWriter(std::vector<std::uint8_t>& o) : out(o) {}
  // Bits enter LSB-first; codes are stored bit-reversed so sequential reads
  // see the canonical code MSB-first.
  void put(std::uint64_t bits, int len) {
    acc |= bits << nbits;
    nbits += len;
    while (nbits >= 8) {
      out.push_back(static_cast<std::uint8_t>(acc & 0xFF));
      acc >>= 8;
      nbits -= 8;
    }
  }
  void flush() {
    if (nbits > 0) out.push_back(static_cast<std::uint8_t>(acc & 0xFF));
    acc = 0;
    nbits = 0;
  }
};

struct BitReader {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t byte = 0;
  int bit = 0;

  int next() {
    if (byte >= size) fail(errc::decode_error, "bitstream truncated");
    int b = data[byte] >> bit & 1;
    if (++bit == 8) {
      bit = 0;
      ++byte;
    }
    return b;
  }
  std::uint32_t peek(int n) const {
    std::uint32_t v = 0;
    std::size_t by = byte;
    int bi = bit;
    for (int i = 0; i < n; ++i) {
      int b = by < size ? (data[by] >> bi & 1) : 0;
      v |= static_cast<std::uint32_t>(b) << i;
      if (++bi == 8) {
        bi = 0;
        ++by;
      }
    }
    return v;
  }
  void consume(int n) {
    std::size_t total = static_cast<std::size_t>(bit) + static_cast<std::size_t>(n);
    byte += total >> 3;
    bit = static_cast<int>(total & 7);
    if (byte > size || (byte == size && bit > 0)) fail(errc::decode_error, "bitstream truncated");
  }
};

std::uint32_t reverse_bits(std::uint32_t code, int len) {
  std::uint32_t r = 0;
  for (int i = 0; i < len; ++i) r |= (code >> i & 1u) << (len - 1 - i);
  return r;
}

// Code lengths from symbol frequencies (plain heap Huffman).
std::vector<int> code_lengths(const std::vector<std::uint64_t>& freq) {
  const std::size_t n = freq.size();
  std::vector<int> parent;
  std::vector<std::uint64_t> weight;
  using Item = std::pair<std::uint64_t, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  std::vector<int> symbol_node(n, -1);
  for (std::size_t s = 0; s < n; ++s) {
    if (freq[s] == 0) continue;
    symbol_node[s] = static_cast<int>(weight.size());
    heap.emplace(freq[s], weight.size());
    weight.push_back(freq[s]);
    parent.push_back(-1);
  }
  if (weight.empty()) return std::vector<int>(n, 0);
  if (weight.size() == 1) {
    std::vector<int> lens(n, 0);
    for (std::size_t s = 0; s < n; ++s)
      if (symbol_node[s] >= 0) lens[s] = 1;
    return lens;
  }
  while (heap.size() > 1) {
    auto [wa, a] = heap.top();
    heap.pop();
    auto [wb, b] = heap.top();
    heap.pop();
    std::size_t node = weight.size();
    weight.push_back(wa + wb);
    parent.push_back(-1);
    parent[a] = static_cast<int>(node);
    parent[b] = static_cast<int>(node);
    heap.emplace(wa + wb, node);
  }
  std::vector<int> lens(n, 0);
  for (std::size_t s = 0; s < n; ++s) {
    int node = symbol_node[s];
    if (node < 0) continue;
    int len = 0;
    while (parent[static_cast<std::size_t>(node)] >= 0) {
      node = parent[static_cast<std::size_t>(node)];
      ++len;
    }
    lens[s] = len;
  }
  return lens;
}

struct Canonical {
  // first_code[len], count[len], and symbols ordered by (len, value).
  std::vector<std::uint32_t> first_code;
  std::vector<std::uint32_t> count;
  std::vector<std::uint32_t> sym_base;  // index of first symbol of each length
  std::vector<std::uint32_t> symbols;   // symbol indices in canonical order
  int max_len = 0;
};

Canonical canonicalize(const std::vector<int>& lens) {
  Canonical c;
  for (int l : lens) c.max_len = std::max(c.max_len, l);
  if (c.max_len == 0) return c;
  if (c.max_len > kMaxCodeLen) fail(errc::invalid_input, "code length too large");
  c.count.assign(static_cast<std::size_t>(c.max_len) + 1, 0);
  for (int l : lens)
    if (l > 0) ++c.count[static_cast<std::size_t>(l)];
  c.first_code.assign(static_cast<std::size_t>(c.max_len) + 1, 0);
  c.sym_base.assign(static_cast<std::size_t>(c.max_len) + 1, 0);
  std::uint32_t code = 0;
  std::uint32_t base = 0;
  for (int l = 1; l <= c.max_len; ++l) {
    code <<= 1;
    c.first_code[static_cast<std::size_t>(l)] = code;
    c.sym_base[static_cast<std::size_t>(l)] = base;
    code += c.count[static_cast<std::size_t>(l)];
    base += c.count[static_cast<std::size_t>(l)];
  }
  c.symbols.resize(base);
  std::vector<std::uint32_t> next = c.sym_base;
  for (std::size_t s = 0; s < lens.size(); ++s)
    if (lens[s] > 0) c.symbols[next[static_cast<std::size_t>(lens[s])]++] = static_cast<std::uint32_t>(s);
  return c;
}

// Kraft sum check: a decodable table must describe a complete prefix code
// (single-symbol streams use one 1-bit code and are deliberately incomplete).
void validate_lengths(const Canonical& c, std::size_t num_symbols) {
  if (c.max_len == 0) return;
  if (num_symbols == 1) {
    if (c.max_len != 1) fail(errc::decode_error, "bad single-symbol table");
    return;
  }
  std::uint64_t kraft = 0;
  for (int l = 1; l <= c.max_len; ++l)
    kraft += static_cast<std::uint64_t>(c.count[static_cast<std::size_t>(l)])
             << (kMaxCodeLen - l);
  if (kraft != std::uint64_t{1} << kMaxCodeLen) fail(errc::decode_error, "incomplete or oversubscribed code");
}

void write_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i) & 0xFF));
}
void write_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i) & 0xFF));
}

struct ByteCursor {
  std::span<const std::uint8_t> data;
  std::size_t pos = 0;
  std::uint8_t u8() {
    if (pos + 1 > data.size()) fail(errc::decode_error, "truncated header");
    return data[pos++];
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
};

} // namespace

std::vector<std::uint8_t> encode_labels(std::span<const std::int32_t> labels) {
  std::vector<std::uint8_t> out;
  if (labels.empty()) {
    write_u32(out, 0);  // min (unused)
    write_u32(out, 0);  // range
    write_u64(out, 0);  // bit count
    return out;
  }
  std::int32_t lo = labels[0], hi = labels[0];
  for (std::int32_t v : labels) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const std::uint32_t range = static_cast<std::uint32_t>(static_cast<std::int64_t>(hi) - lo + 1);
  if (range > kMaxRange) fail(errc::invalid_input, "label alphabet too large");

  std::vector<std::uint64_t> freq(range, 0);
  for (std::int32_t v : labels) ++freq[static_cast<std::uint32_t>(v - lo)];
  const std::vector<int> lens = code_lengths(freq);
  const Canonical canon = canonicalize(lens);

  // Per-symbol (reversed code, length) for emission.
  std::vector<std::uint32_t> rev(range, 0);
  {
    std::vector<std::uint32_t> next = canon.first_code;
    for (std::uint32_t idx : canon.symbols) {
      int l = lens[idx];
      rev[idx] = reverse_bits(next[static_cast<std::size_t>(l)]++, l);
    }
  }

  write_u32(out, static_cast<std::uint32_t>(lo));
  write_u32(out, range);
  std::uint64_t nbits = 0;
  for (std::size_t s = 0; s < range; ++s) {
    out.push_back(static_cast<std::uint8_t>(lens[s]));
    nbits += freq[s] * static_cast<std::uint64_t>(lens[s]);
  }
  write_u64(out, nbits);
  BitWriter bw(out);
  for (std::int32_t v : labels) {
    const std::uint32_t s = static_cast<std::uint32_t>(v - lo);
    bw.put(rev[s], lens[s]);
  }
  bw.flush();
  return out;
}

std::vector<std::int32_t> decode_labels(std::span<const std::uint8_t> bytes, std::size_t count) {
  ByteCursor cur{bytes};
  const std::int32_t lo = static_cast<std::int32_t>(cur.u32());
  const std::uint32_t range = cur.u32();
  if (range > kMaxRange) fail(errc::decode_error, "label alphabet too large");
  if (range == 0) {
    if (count != 0) fail(errc::decode_error, "empty table for nonempty stream");
    cur.u64();
    return {};
  }
  if (cur.pos + range > bytes.size()) fail(errc::decode_error, "truncated length table");
  std::vector<int> lens(range);
  std::size_t present = 0;
  for (std::uint32_t s = 0; s < range; ++s) {
    lens[s] = bytes[cur.pos++];
    if (lens[s] > kMaxCodeLen) fail(errc::decode_error, "invalid code length");
    if (lens[s] > 0) ++present;
  }
  if (present == 0) fail(errc::decode_error, "no symbols in table");
  const Canonical canon = canonicalize(lens);
  validate_lengths(canon, present);
  const std::uint64_t nbits = cur.u64();
  if (cur.pos + (nbits + 7) / 8 > bytes.size()) fail(errc::decode_error, "bitstream truncated");

  // LSB-first lookup table over the reversed short codes.
  struct Entry {
    std::uint32_t sym = 0;
    std::uint8_t len = 0;
  };
  std::vector<Entry> fast(std::size_t{1} << kFastBits);
  {
    std::vector<std::uint32_t> next = canon.first_code;
    for (std::uint32_t idx : canon.symbols) {
      int l = lens[idx];
      if (l > kFastBits) continue;
      std::uint32_t r = reverse_bits(next[static_cast<std::size_t>(l)]++, l);
      for (std::uint32_t pad = 0; pad < (1u << (kFastBits - l)); ++pad)
        fast[r | pad << l] = Entry{idx, static_cast<std::uint8_t>(l)};
    }
  }

  BitReader br{bytes.data() + cur.pos, bytes.size() - cur.pos};
  std::vector<std::int32_t> out;
  out.reserve(count);
  std::uint64_t consumed = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const Entry e = fast[br.peek(kFastBits)];
    std::uint32_t sym;
    int len;
    if (e.len != 0) {
      sym = e.sym;
      len = e.len;
      br.consume(len);
    } else {
      // Long code: walk the canonical ranges bit by bit.
      std::uint32_t code = 0;
      len = 0;
      sym = 0;
      bool found = false;
      while (len < canon.max_len) {
        code = code << 1 | static_cast<std::uint32_t>(br.next());
        ++len;
        const std::uint32_t first = canon.first_code[static_cast<std::size_t>(len)];
        const std::uint32_t n = canon.count[static_cast<std::size_t>(len)];
        if (n != 0 && code - first < n) {
          sym = canon.symbols[canon.sym_base[static_cast<std::size_t>(len)] + (code - first)];
          found = true;
          break;
        }
      }
      if (!found) fail(errc::decode_error, "invalid code");
    }
    consumed += static_cast<std::uint64_t>(len);
    if (consumed > nbits) fail(errc::decode_error, "bitstream overrun");
    out.push_back(lo + static_cast<std::int32_t>(sym));
  }
  if (consumed != nbits) fail(errc::decode_error, "bit count mismatch");
  return out;
}

} // namespace mgrx
