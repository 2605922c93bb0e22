#ifndef MGRX_REORDER_HPP
#define MGRX_REORDER_HPP

#include <cstring>
#include <vector>

#include "mgrx/grid.hpp"
#include "mgrx/tensor.hpp"

namespace mgrx {

/// How many leading slices along an axis of length n are nodal after the
/// partition (even original indices come first).
inline std::size_t nodal_count(std::size_t n) { return (n + 1) / 2; }

namespace detail {

// Source slice for target position j under the nodal-first stable partition.
inline std::size_t partition_source(std::size_t j, std::size_t n) {
  std::size_t m = nodal_count(n);
  return j < m ? 2 * j : 2 * (j - m) + 1;
}

// Source slice for target position j under the inverse of the partition.
inline std::size_t unpartition_source(std::size_t j, std::size_t n) {
  std::size_t m = nodal_count(n);
  return j % 2 == 0 ? j / 2 : m + j / 2;
}

// Odometer over axes [first, last) of the block; fn(offset) per combination.
template <typename T, typename Fn>
void for_each_offset(const BlockView<T>& b, int first, int last, Fn&& fn) {
  if (first >= last) {
    fn(std::size_t{0});
    return;
  }
  std::vector<std::size_t> idx(static_cast<std::size_t>(last - first), 0);
  std::size_t off = 0;
  for (;;) {
    fn(off);
    int axis = last - 1;
    for (;;) {
      std::size_t a = static_cast<std::size_t>(axis);
      ++idx[a - static_cast<std::size_t>(first)];
      off += b.strides[a];
      if (idx[a - static_cast<std::size_t>(first)] < b.extents[a]) break;
      off -= b.strides[a] * b.extents[a];
      idx[a - static_cast<std::size_t>(first)] = 0;
      if (--axis < first) return;
    }
  }
}

// Permutes slices along `axis` of the block: target slice j takes its values
// from source slice source_of(j, n). Two passes through a packed scratch.
template <typename T, typename SourceFn>
void permute_axis(const BlockView<T>& b, int axis, SourceFn source_of, std::vector<T>& scratch) {
  const int d = b.ndims();
  const std::size_t n = b.extents[static_cast<std::size_t>(axis)];
  if (n < 2) fail(errc::invalid_axis, "axis length < 2");
  scratch.resize(b.count());

  const std::size_t axis_stride = b.strides[static_cast<std::size_t>(axis)];
  const std::size_t row_len = b.extents[static_cast<std::size_t>(d - 1)];

  if (axis == d - 1) {
    // Lines along the permuted axis are contiguous; permute in a line buffer.
    T* line = scratch.data();
    for_each_offset(b, 0, d - 1, [&](std::size_t base) {
      T* src = b.data + base;
      for (std::size_t j = 0; j < n; ++j) line[j] = src[source_of(j, n)];
      std::memcpy(src, line, n * sizeof(T));
    });
    return;
  }

  // Gather the whole block into scratch with the new slice order, then copy
  // back in place. Inner runs along the last axis are contiguous.
  std::size_t pos = 0;
  for_each_offset(b, 0, axis, [&](std::size_t outer) {
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t slice = outer + source_of(j, n) * axis_stride;
      for_each_offset(b, axis + 1, d - 1, [&](std::size_t inner) {
        std::memcpy(scratch.data() + pos, b.data + slice + inner, row_len * sizeof(T));
        pos += row_len;
      });
    }
  });
  pos = 0;
  for_each_offset(b, 0, axis, [&](std::size_t outer) {
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t slice = outer + j * axis_stride;
      for_each_offset(b, axis + 1, d - 1, [&](std::size_t inner) {
        std::memcpy(b.data + slice + inner, scratch.data() + pos, row_len * sizeof(T));
        pos += row_len;
      });
    }
  });
}

} // namespace detail

/// Stable partition of the slices along `axis`: even-index slices first (in
/// original relative order), odd-index slices after them.
template <typename T>
void reorder_axis(const BlockView<T>& b, int axis, std::vector<T>& scratch) {
  if (axis < 0 || axis >= b.ndims()) fail(errc::invalid_axis, "axis out of range");
  detail::permute_axis(b, axis, detail::partition_source, scratch);
}

template <typename T>
void inverse_reorder_axis(const BlockView<T>& b, int axis, std::vector<T>& scratch) {
  if (axis < 0 || axis >= b.ndims()) fail(errc::invalid_axis, "axis out of range");
  detail::permute_axis(b, axis, detail::unpartition_source, scratch);
}

template <typename T>
void reorder_axis(TensorField<T>& f, int axis) {
  std::vector<T> scratch;
  reorder_axis(full_view(f), axis, scratch);
}

template <typename T>
void inverse_reorder_axis(TensorField<T>& f, int axis) {
  std::vector<T> scratch;
  inverse_reorder_axis(full_view(f), axis, scratch);
}

/// Partitions every axis of the leading level-`level` block so the next
/// coarser grid ends up as the contiguous leading corner.
template <typename T>
void reorder_level(TensorField<T>& f, const GridHierarchy& h, int level, std::vector<T>& scratch) {
  if (level < 1 || level > h.num_levels()) fail(errc::invalid_level, "level out of range");
  BlockView<T> b = corner_view(f, h.level_dims(level));
  for (int axis = 0; axis < b.ndims(); ++axis) detail::permute_axis(b, axis, detail::partition_source, scratch);
}

template <typename T>
void inverse_reorder_level(TensorField<T>& f, const GridHierarchy& h, int level,
                           std::vector<T>& scratch) {
  if (level < 1 || level > h.num_levels()) fail(errc::invalid_level, "level out of range");
  BlockView<T> b = corner_view(f, h.level_dims(level));
  for (int axis = b.ndims() - 1; axis >= 0; --axis)
    detail::permute_axis(b, axis, detail::unpartition_source, scratch);
}

template <typename T>
void reorder_level(TensorField<T>& f, const GridHierarchy& h, int level) {
  std::vector<T> scratch;
  reorder_level(f, h, level, scratch);
}

template <typename T>
void inverse_reorder_level(TensorField<T>& f, const GridHierarchy& h, int level) {
  std::vector<T> scratch;
  inverse_reorder_level(f, h, level, scratch);
}

/// Linearizes a fully reordered field into the level-centric buffer layout:
/// the coarse representation first (row-major), then each level's coefficient
/// shell in row-major order of that level's block.
template <typename T>
std::vector<T> pack_level_centric(const TensorField<T>& f, const GridHierarchy& h, int stop_level) {
  const int L = h.num_levels();
  const int d = f.ndims();
  std::vector<T> out;
  out.reserve(f.size());
  const std::vector<std::size_t> strides = row_major_strides(f.dims);

  // Coarse corner block.
  {
    BlockView<const T> corner{f.data.data(), h.level_dims(stop_level), strides};
    const std::size_t row = corner.extents[static_cast<std::size_t>(d - 1)];
    detail::for_each_offset(corner, 0, d - 1, [&](std::size_t base) {
      out.insert(out.end(), f.data.begin() + static_cast<std::ptrdiff_t>(base),
                 f.data.begin() + static_cast<std::ptrdiff_t>(base + row));
    });
  }

  // Per-level shells: nodes of block(l) outside block(l-1).
  for (int l = stop_level + 1; l <= L; ++l) {
    const Dims& fine = h.level_dims(l);
    const Dims& coarse = h.level_dims(l - 1);
    BlockView<const T> b{f.data.data(), fine, strides};
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    // Iterate rows (all axes but the last); inside the coarse prefix the
    // leading coarse_last entries of the row are skipped.
    auto row_inside = [&]() {
      for (int i = 0; i < d - 1; ++i)
        if (idx[static_cast<std::size_t>(i)] >= coarse[static_cast<std::size_t>(i)]) return false;
      return true;
    };
    const std::size_t fine_last = fine[static_cast<std::size_t>(d - 1)];
    const std::size_t coarse_last = coarse[static_cast<std::size_t>(d - 1)];
    std::size_t off = 0;
    for (;;) {
      const T* rowp = f.data.data() + off;
      if (row_inside())
        out.insert(out.end(), rowp + coarse_last, rowp + fine_last);
      else
        out.insert(out.end(), rowp, rowp + fine_last);
      int axis = d - 2;
      if (axis < 0) break;
      for (;;) {
        std::size_t a = static_cast<std::size_t>(axis);
        ++idx[a];
        off += b.strides[a];
        if (idx[a] < fine[a]) break;
        off -= b.strides[a] * fine[a];
        idx[a] = 0;
        if (--axis < 0) break;
      }
      if (axis < 0) break;
    }
  }
  return out;
}

/// Inverse of pack_level_centric: scatters a level-centric buffer back into a
/// reordered field of the hierarchy's finest dims.
template <typename T>
TensorField<T> unpack_level_centric(const std::vector<T>& buf, const GridHierarchy& h,
                                    int stop_level) {
  const int L = h.num_levels();
  if (buf.size() != h.total_count()) fail(errc::shape_error, "buffer size != total node count");
  TensorField<T> f(h.level_dims(L));
  const int d = f.ndims();
  const std::vector<std::size_t> strides = row_major_strides(f.dims);
  std::size_t pos = 0;

  {
    BlockView<T> corner{f.data.data(), h.level_dims(stop_level), strides};
    const std::size_t row = corner.extents[static_cast<std::size_t>(d - 1)];
    detail::for_each_offset(corner, 0, d - 1, [&](std::size_t base) {
      std::memcpy(f.data.data() + base, buf.data() + pos, row * sizeof(T));
      pos += row;
    });
  }

  for (int l = stop_level + 1; l <= L; ++l) {
    const Dims& fine = h.level_dims(l);
    const Dims& coarse = h.level_dims(l - 1);
    BlockView<T> b{f.data.data(), fine, strides};
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    auto row_inside = [&]() {
      for (int i = 0; i < d - 1; ++i)
        if (idx[static_cast<std::size_t>(i)] >= coarse[static_cast<std::size_t>(i)]) return false;
      return true;
    };
    const std::size_t fine_last = fine[static_cast<std::size_t>(d - 1)];
    const std::size_t coarse_last = coarse[static_cast<std::size_t>(d - 1)];
    std::size_t off = 0;
    for (;;) {
      T* rowp = f.data.data() + off;
      if (row_inside()) {
        std::memcpy(rowp + coarse_last, buf.data() + pos, (fine_last - coarse_last) * sizeof(T));
        pos += fine_last - coarse_last;
      } else {
        std::memcpy(rowp, buf.data() + pos, fine_last * sizeof(T));
        pos += fine_last;
      }
      int axis = d - 2;
      if (axis < 0) break;
      for (;;) {
        std::size_t a = static_cast<std::size_t>(axis);
        ++idx[a];
        off += b.strides[a];
        if (idx[a] < fine[a]) break;
        off -= b.strides[a] * fine[a];
        idx[a] = 0;
        if (--axis < 0) break;
      }
      if (axis < 0) break;
    }
  }
  return f;
}

} // namespace mgrx

#endif
