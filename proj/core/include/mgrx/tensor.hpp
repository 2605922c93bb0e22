#ifndef MGRX_TENSOR_HPP
#define MGRX_TENSOR_HPP

#include <cstddef>
#include <vector>

#include "mgrx/error.hpp"
#include "mgrx/grid.hpp"

namespace mgrx {

inline std::vector<std::size_t> row_major_strides(const Dims& dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i)
    s[static_cast<std::size_t>(i)] = s[static_cast<std::size_t>(i) + 1] * dims[static_cast<std::size_t>(i) + 1];
  return s;
}

/// Dense row-major d-dimensional array of element values.
template <typename T>
struct TensorField {
  Dims dims;
  std::vector<T> data;

  TensorField() = default;
  explicit TensorField(Dims d) : dims(std::move(d)), data(element_count(dims)) {}
  TensorField(Dims d, std::vector<T> values) : dims(std::move(d)), data(std::move(values)) {
    if (data.size() != element_count(dims))
      fail(errc::shape_error, "value count does not match dims");
  }

  std::size_t size() const { return data.size(); }
  int ndims() const { return static_cast<int>(dims.size()); }
};

/// Strided view of a corner block inside a larger row-major array.
/// Does not own data; extents/strides are indexed per axis.
template <typename T>
struct BlockView {
  T* data = nullptr;
  std::vector<std::size_t> extents;
  std::vector<std::size_t> strides;

  int ndims() const { return static_cast<int>(extents.size()); }
  std::size_t count() const { return element_count(extents); }
};

template <typename T>
BlockView<T> full_view(TensorField<T>& f) {
  return BlockView<T>{f.data.data(), f.dims, row_major_strides(f.dims)};
}

template <typename T>
BlockView<const T> full_view(const TensorField<T>& f) {
  return BlockView<const T>{f.data.data(), f.dims, row_major_strides(f.dims)};
}

/// Leading corner block of `f` with the given extents (strides stay those of
/// the full array).
template <typename T>
BlockView<T> corner_view(TensorField<T>& f, const Dims& extents) {
  if (extents.size() != f.dims.size()) fail(errc::shape_error, "rank mismatch");
  for (std::size_t i = 0; i < extents.size(); ++i)
    if (extents[i] > f.dims[i]) fail(errc::shape_error, "block exceeds field");
  return BlockView<T>{f.data.data(), extents, row_major_strides(f.dims)};
}

/// Calls fn(flat_offset, index_vector) for every element of the block in
/// row-major order. Index vector is reused between calls.
template <typename T, typename Fn>
void for_each_index(const BlockView<T>& b, Fn&& fn) {
  const int d = b.ndims();
  if (d == 0) return;
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  std::size_t off = 0;
  for (;;) {
    fn(off, idx);
    int axis = d - 1;
    for (;;) {
      ++idx[static_cast<std::size_t>(axis)];
      off += b.strides[static_cast<std::size_t>(axis)];
      if (idx[static_cast<std::size_t>(axis)] < b.extents[static_cast<std::size_t>(axis)]) break;
      off -= b.strides[static_cast<std::size_t>(axis)] * b.extents[static_cast<std::size_t>(axis)];
      idx[static_cast<std::size_t>(axis)] = 0;
      if (--axis < 0) return;
    }
  }
}

} // namespace mgrx

#endif
