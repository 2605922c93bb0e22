#ifndef MGRX_LORENZO_HPP
#define MGRX_LORENZO_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "mgrx/quantize.hpp"
#include "mgrx/tensor.hpp"

namespace mgrx {

/// Error-bounded Lorenzo stream: labels in lexicographic scan order plus the
/// positions whose values are kept raw.
template <typename T>
struct LorenzoStream {
  std::vector<std::int32_t> labels;
  std::vector<Outlier<T>> outliers;
  double error_bound = 0.0;
};

namespace detail {

// Inclusion-exclusion prediction from the 2^d - 1 lexicographically earlier
// neighbors; indices outside the domain read as zero.
template <typename T>
inline double lorenzo_predict_at(const T* recon, const std::size_t* idx, const Dims& dims,
                                 const std::vector<std::size_t>& strides, std::size_t offset) {
  const int d = static_cast<int>(dims.size());
  bool interior = true;
  for (int i = 0; i < d; ++i)
    if (idx[i] == 0) {
      interior = false;
      break;
    }
  double pred = 0.0;
  const unsigned count = 1u << d;
  if (interior) {
    for (unsigned s = 1; s < count; ++s) {
      std::size_t off = offset;
      int bits = 0;
      for (int i = 0; i < d; ++i)
        if (s >> i & 1u) {
          off -= strides[static_cast<std::size_t>(i)];
          ++bits;
        }
      const double v = static_cast<double>(recon[off]);
      pred += (bits % 2 == 1) ? v : -v;
    }
  } else {
    for (unsigned s = 1; s < count; ++s) {
      std::size_t off = offset;
      int bits = 0;
      bool valid = true;
      for (int i = 0; i < d; ++i)
        if (s >> i & 1u) {
          if (idx[i] == 0) {
            valid = false;
            break;
          }
          off -= strides[static_cast<std::size_t>(i)];
          ++bits;
        }
      if (!valid) continue;
      const double v = static_cast<double>(recon[off]);
      pred += (bits % 2 == 1) ? v : -v;
    }
  }
  return pred;
}

} // namespace detail

/// Prediction for one node of a partially reconstructed field, exposed for
/// direct use and testing.
template <typename T>
double lorenzo_predict(const TensorField<T>& recon, const std::vector<std::size_t>& index) {
  const std::vector<std::size_t> strides = row_major_strides(recon.dims);
  std::size_t off = 0;
  for (std::size_t i = 0; i < index.size(); ++i) off += index[i] * strides[i];
  return detail::lorenzo_predict_at(recon.data.data(), index.data(), recon.dims, strides, off);
}

/// Compresses with error bound `e`. Predictions are made from already
/// reconstructed values, so the compressor's state matches the decompressor
/// exactly.
template <typename T>
LorenzoStream<T> compress_lorenzo(const TensorField<T>& field, double e) {
  if (!(e > 0.0) || !std::isfinite(e)) fail(errc::invalid_budget, "error bound must be positive");
  const int d = field.ndims();
  const std::vector<std::size_t> strides = row_major_strides(field.dims);
  const double step = 2.0 * e;

  LorenzoStream<T> out;
  out.error_bound = e;
  out.labels.reserve(field.size());
  std::vector<T> recon(field.size());

  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  for (std::size_t p = 0; p < field.size(); ++p) {
    const double v = static_cast<double>(field.data[p]);
    if (!std::isfinite(v)) fail(errc::nonfinite_data, "non-finite value at offset " + std::to_string(p));
    const double pred = detail::lorenzo_predict_at(recon.data(), idx.data(), field.dims, strides, p);
    const double r = std::nearbyint((v - pred) / step);
    bool outlier = r < static_cast<double>(kLabelMin) || r > static_cast<double>(kLabelMax);
    T stored{};
    if (!outlier) {
      stored = static_cast<T>(pred + r * step);
      // The bound must hold for the value as stored in the element type.
      if (std::fabs(static_cast<double>(stored) - v) > e) outlier = true;
    }
    if (outlier) {
      out.outliers.push_back({p, field.data[p]});
      out.labels.push_back(0);
      recon[p] = field.data[p];
    } else {
      out.labels.push_back(static_cast<std::int32_t>(r));
      recon[p] = stored;
    }
    for (int i = d - 1; i >= 0; --i) {
      std::size_t a = static_cast<std::size_t>(i);
      if (++idx[a] < field.dims[a]) break;
      idx[a] = 0;
    }
  }
  return out;
}

template <typename T>
TensorField<T> decompress_lorenzo(const LorenzoStream<T>& stream, const Dims& dims) {
  TensorField<T> out(dims);
  if (stream.labels.size() != out.size()) fail(errc::shape_error, "label count does not match dims");
  const int d = static_cast<int>(dims.size());
  const std::vector<std::size_t> strides = row_major_strides(dims);
  const double step = 2.0 * stream.error_bound;

  std::size_t next_outlier = 0;
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  for (std::size_t p = 0; p < out.size(); ++p) {
    if (next_outlier < stream.outliers.size() && stream.outliers[next_outlier].position == p) {
      out.data[p] = stream.outliers[next_outlier].value;
      ++next_outlier;
    } else {
      const double pred =
          detail::lorenzo_predict_at(out.data.data(), idx.data(), dims, strides, p);
      out.data[p] = static_cast<T>(pred + static_cast<double>(stream.labels[p]) * step);
    }
    for (int i = d - 1; i >= 0; --i) {
      std::size_t a = static_cast<std::size_t>(i);
      if (++idx[a] < dims[a]) break;
      idx[a] = 0;
    }
  }
  return out;
}

} // namespace mgrx

#endif
