#ifndef MGRX_TRANSFORM_HPP
#define MGRX_TRANSFORM_HPP

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "mgrx/grid.hpp"
#include "mgrx/reorder.hpp"
#include "mgrx/tensor.hpp"

namespace mgrx {

// Coarse-grid mass matrix after the common spacing factor cancels:
// diagonal 2/3 at both ends and 4/3 inside, off-diagonal 1/3.
inline constexpr double kMassOffDiag = 1.0 / 3.0;
inline constexpr double kMassDiagBoundary = 2.0 / 3.0;
inline constexpr double kMassDiagInterior = 4.0 / 3.0;

/// Precomputed Thomas-elimination factors for one coarse line length.
/// Depends only on the length, never on data.
struct ThomasAux {
  std::vector<double> w;      // w[i] = off / d_{i-1}, i >= 1
  std::vector<double> inv_d;  // 1 / d_i

  static ThomasAux build(std::size_t m) {
    if (m < 2) fail(errc::degenerate_system, "correction system needs at least 2 unknowns");
    ThomasAux aux;
    aux.w.resize(m, 0.0);
    aux.inv_d.resize(m, 0.0);
    double d = kMassDiagBoundary;
    aux.inv_d[0] = 1.0 / d;
    for (std::size_t i = 1; i < m; ++i) {
      double wi = kMassOffDiag / d;
      aux.w[i] = wi;
      d = (i + 1 == m ? kMassDiagBoundary : kMassDiagInterior) - wi * kMassOffDiag;
      aux.inv_d[i] = 1.0 / d;
    }
    return aux;
  }
};

/// Per-worker scratch for the correction solves. Not thread-safe; use one
/// workspace per concurrently processed field.
class SolverWorkspace {
public:
  explicit SolverWorkspace(std::size_t batch_size = 32)
      : batch_size_(batch_size == 0 ? 1 : batch_size) {}

  std::size_t batch_size() const { return batch_size_; }
  void set_batch_size(std::size_t b) { batch_size_ = b == 0 ? 1 : b; }

  /// Builds elimination factors for every coarse line length in the hierarchy
  /// up front, so the per-level sweeps only look them up.
  void prepare(const GridHierarchy& h) {
    for (int l = 1; l <= h.num_levels(); ++l)
      for (std::size_t n : h.level_dims(l)) aux_for(nodal_count(n));
  }

  const ThomasAux& aux_for(std::size_t m) {
    auto it = aux_.find(m);
    if (it == aux_.end()) it = aux_.emplace(m, ThomasAux::build(m)).first;
    return it->second;
  }

  std::vector<double> correction;  // packed level-extent buffer
  std::vector<double> batch;       // batch_size x max axis length

private:
  std::size_t batch_size_;
  std::unordered_map<std::size_t, ThomasAux> aux_;
};

namespace detail {

// One load-vector entry, accumulated in the order the terms appear in the
// five-point stencil: 1/12 c_{2i-2} + 1/2 c_{2i-1} + w c_{2i} + 1/2 c_{2i+1}
// + 1/12 c_{2i+2}, with w = 5/6 inside and 5/12 at the two boundary entries.
// Every implementation (batched, unbatched, strided reference) goes through
// this helper so results stay bit-identical.
template <typename GetC>
inline double load_entry(GetC&& c, std::size_t i, std::size_t n) {
  const std::size_t m = (n + 1) / 2;
  double acc = 0.0;
  if (i >= 1) {
    acc += (1.0 / 12.0) * c(2 * i - 2);
    acc += 0.5 * c(2 * i - 1);
  }
  acc += ((i == 0 || i + 1 == m) ? 5.0 / 12.0 : 5.0 / 6.0) * c(2 * i);
  if (2 * i + 1 < n) acc += 0.5 * c(2 * i + 1);
  if (2 * i + 2 < n) acc += (1.0 / 12.0) * c(2 * i + 2);
  return acc;
}

// Load vectors for `b` parallel lines read from a partitioned layout:
// nodal value j of line t at base[j*step + t], coefficient value j at
// base[(m + j)*step + t]. Output f[i*b + t].
inline void batched_load(const double* base, std::size_t step, std::size_t b, std::size_t n,
                         double* f) {
  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t t = 0; t < b; ++t) {
      auto c = [&](std::size_t j) {
        std::size_t slice = (j % 2 == 0) ? j / 2 : m + j / 2;
        return base[slice * step + t];
      };
      f[i * b + t] = load_entry(c, i, n);
    }
  }
}

// In-place Thomas solve of `b` interleaved systems f[i*b + t].
inline void batched_solve(double* f, std::size_t b, std::size_t m, const ThomasAux& aux) {
  for (std::size_t i = 1; i < m; ++i) {
    const double wi = aux.w[i];
    for (std::size_t t = 0; t < b; ++t) f[i * b + t] -= wi * f[(i - 1) * b + t];
  }
  {
    const double inv = aux.inv_d[m - 1];
    for (std::size_t t = 0; t < b; ++t) f[(m - 1) * b + t] *= inv;
  }
  for (std::size_t i = m - 1; i-- > 0;) {
    const double inv = aux.inv_d[i];
    for (std::size_t t = 0; t < b; ++t)
      f[i * b + t] = (f[i * b + t] - kMassOffDiag * f[(i + 1) * b + t]) * inv;
  }
}

} // namespace detail

/// Load vector of one line given in natural (interleaved) order c_0..c_{n-1}.
/// `out` receives the (n+1)/2 coarse entries.
inline void load_vector_1d(std::span<const double> line, std::span<double> out) {
  const std::size_t n = line.size();
  if (n < 3) fail(errc::degenerate_line, "line shorter than 3");
  const std::size_t m = (n + 1) / 2;
  if (out.size() != m) fail(errc::shape_error, "output size must be (n+1)/2");
  for (std::size_t i = 0; i < m; ++i)
    out[i] = detail::load_entry([&](std::size_t j) { return line[j]; }, i, n);
}

/// Solves M z = f in place for the cancelled-spacing coarse mass matrix.
inline void solve_correction_1d(std::span<double> f, const ThomasAux& aux) {
  if (f.size() < 2) fail(errc::degenerate_system, "system smaller than 2");
  if (aux.w.size() != f.size()) fail(errc::shape_error, "aux prepared for a different length");
  detail::batched_solve(f.data(), 1, f.size(), aux);
}

inline void solve_correction_1d(std::span<double> f) {
  solve_correction_1d(f, ThomasAux::build(f.size()));
}

/// Level-ordered transform output: the coarse representation followed by each
/// level's coefficient shell. stop_level 0 means fully decomposed.
template <typename T>
struct MultilevelCoefficients {
  std::vector<T> buffer;
  GridHierarchy hierarchy;
  int stop_level = 0;
};

namespace detail {

struct AxisRange {
  std::size_t begin = 0;
  std::size_t count = 0;
  std::size_t stride = 0;
};

// Calls fn(start_offset) for every combination of the leading d-1 ranges;
// the caller iterates the last (contiguous) range itself.
template <typename Fn>
inline void for_each_row_of(const std::vector<AxisRange>& axes, Fn&& fn) {
  const int d = static_cast<int>(axes.size());
  std::size_t off = 0;
  for (int i = 0; i + 1 < d; ++i)
    if (axes[static_cast<std::size_t>(i)].count == 0) return;
  if (axes.back().count == 0) return;
  for (int i = 0; i < d; ++i) off += axes[static_cast<std::size_t>(i)].begin * axes[static_cast<std::size_t>(i)].stride;
  if (d == 1) {
    fn(off);
    return;
  }
  std::vector<std::size_t> idx(static_cast<std::size_t>(d - 1), 0);
  for (;;) {
    fn(off);
    int axis = d - 2;
    for (;;) {
      std::size_t a = static_cast<std::size_t>(axis);
      ++idx[a];
      off += axes[a].stride;
      if (idx[a] < axes[a].count) break;
      off -= axes[a].stride * axes[a].count;
      idx[a] = 0;
      if (--axis < 0) return;
    }
  }
}

// Interpolation from the 2^k corner values; degenerate axes carry step 0 so
// the single neighbor is counted twice, which the power-of-two scale undoes
// exactly.
template <typename T>
inline double corner_average(const T* base, const std::size_t* offs, unsigned corners,
                             double scale) {
  double sum = 0.0;
  for (unsigned cmask = 0; cmask < corners; ++cmask) sum += static_cast<double>(base[offs[cmask]]);
  return sum * scale;
}

// Subtracts (decompose) or adds (recompose) the multilinear interpolant at
// every coefficient node of the reordered level block.
template <typename T>
void update_coefficients(TensorField<T>& f, const GridHierarchy& h, int level, bool subtract) {
  const Dims& ext = h.level_dims(level);
  const int d = static_cast<int>(ext.size());
  const std::vector<std::size_t> strides = row_major_strides(f.dims);
  T* data = f.data.data();

  for (unsigned group = 1; group < (1u << d); ++group) {
    // Axes on the coefficient side of the partition for this group.
    std::vector<int> set_axes;
    for (int i = 0; i < d; ++i)
      if (group >> i & 1u) set_axes.push_back(i);
    const int k = static_cast<int>(set_axes.size());
    const double scale = 1.0 / static_cast<double>(1u << k);

    // Coefficient nodes on an even-length axis whose original index is the
    // last one have a single nodal neighbor; enumerate those sheets
    // separately so corner offsets stay constant inside each loop.
    std::vector<int> even_axes;
    for (int i : set_axes)
      if (ext[static_cast<std::size_t>(i)] % 2 == 0) even_axes.push_back(i);

    for (unsigned pat = 0; pat < (1u << even_axes.size()); ++pat) {
      std::vector<AxisRange> ranges(static_cast<std::size_t>(d));
      std::size_t node_shift = 0;  // node offset minus corner-base offset
      bool empty = false;
      std::vector<std::size_t> degenerate(static_cast<std::size_t>(d), 0);
      for (std::size_t e = 0; e < even_axes.size(); ++e)
        if (pat >> e & 1u) degenerate[static_cast<std::size_t>(even_axes[e])] = 1;

      for (int i = 0; i < d; ++i) {
        const std::size_t n = ext[static_cast<std::size_t>(i)];
        const std::size_t m = nodal_count(n);
        const std::size_t c = n - m;
        AxisRange& r = ranges[static_cast<std::size_t>(i)];
        r.stride = strides[static_cast<std::size_t>(i)];
        if (group >> i & 1u) {
          node_shift += m * r.stride;
          const bool even = n % 2 == 0;
          if (degenerate[static_cast<std::size_t>(i)]) {
            r.begin = c - 1;
            r.count = 1;
          } else {
            r.begin = 0;
            r.count = even ? c - 1 : c;
          }
          if (r.count == 0) empty = true;
        } else {
          r.begin = 0;
          r.count = m;
        }
      }
      if (empty) continue;

      // Corner offsets relative to the corner base, one per corner mask.
      std::size_t offs[1u << 8];
      const unsigned corners = 1u << k;
      for (unsigned cmask = 0; cmask < corners; ++cmask) {
        std::size_t o = 0;
        for (int b = 0; b < k; ++b)
          if (cmask >> b & 1u) {
            int axis = set_axes[static_cast<std::size_t>(b)];
            if (!degenerate[static_cast<std::size_t>(axis)]) o += strides[static_cast<std::size_t>(axis)];
          }
        offs[cmask] = o;
      }

      const AxisRange& last = ranges[static_cast<std::size_t>(d - 1)];
      const std::size_t last_step = last.stride;
      const std::size_t last_count = last.count;
      for_each_row_of(ranges, [&](std::size_t row) {
        std::size_t base = row;
        if (subtract) {
          for (std::size_t j = 0; j < last_count; ++j, base += last_step) {
            T* node = data + base + node_shift;
            *node = static_cast<T>(static_cast<double>(*node) -
                                   corner_average(data + base, offs, corners, scale));
          }
        } else {
          for (std::size_t j = 0; j < last_count; ++j, base += last_step) {
            T* node = data + base + node_shift;
            *node = static_cast<T>(static_cast<double>(*node) +
                                   corner_average(data + base, offs, corners, scale));
          }
        }
      });
    }
  }
}

} // namespace detail

/// Replaces every coefficient node of the (already reordered) level block by
/// its residual against the multilinear interpolant of its nodal neighbors.
template <typename T>
void compute_coefficients(TensorField<T>& f, const GridHierarchy& h, int level) {
  if (level < 1 || level > h.num_levels()) fail(errc::invalid_level, "level out of range");
  detail::update_coefficients(f, h, level, true);
}

/// Inverse of compute_coefficients.
template <typename T>
void add_interpolant(TensorField<T>& f, const GridHierarchy& h, int level) {
  if (level < 1 || level > h.num_levels()) fail(errc::invalid_level, "level out of range");
  detail::update_coefficients(f, h, level, false);
}

/// Correction over the next-coarser grid; data points into the workspace and
/// stays valid until the next compute_correction call.
struct Correction {
  Dims extents;
  std::vector<std::size_t> strides;
  const double* data = nullptr;
};

template <typename T>
Correction compute_correction(const TensorField<T>& f, const GridHierarchy& h, int level,
                              SolverWorkspace& ws) {
  if (level < 1 || level > h.num_levels()) fail(errc::invalid_level, "level out of range");
  const Dims& ext = h.level_dims(level);
  const Dims& coarse = h.level_dims(level - 1);
  const int d = static_cast<int>(ext.size());
  const std::vector<std::size_t> field_strides = row_major_strides(f.dims);
  const std::vector<std::size_t> strides = row_major_strides(ext);

  // Materialize the multilevel component: coefficient values as stored, zeros
  // on the all-nodal corner (their component values vanish by construction).
  ws.correction.resize(element_count(ext));
  double* buf = ws.correction.data();
  {
    std::vector<detail::AxisRange> rows(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i)
      rows[static_cast<std::size_t>(i)] = {0, ext[static_cast<std::size_t>(i)],
                                           field_strides[static_cast<std::size_t>(i)]};
    const std::size_t row_len = ext[static_cast<std::size_t>(d - 1)];
    const std::size_t corner_len = nodal_count(row_len);
    std::vector<std::size_t> idx(static_cast<std::size_t>(d > 1 ? d - 1 : 1), 0);
    std::size_t src = 0;
    std::size_t dst = 0;
    const T* fdata = f.data.data();
    for (;;) {
      bool corner_row = true;
      for (int i = 0; i + 1 < d; ++i)
        if (idx[static_cast<std::size_t>(i)] >= nodal_count(ext[static_cast<std::size_t>(i)])) {
          corner_row = false;
          break;
        }
      std::size_t j = 0;
      if (corner_row)
        for (; j < corner_len; ++j) buf[dst + j] = 0.0;
      for (; j < row_len; ++j) buf[dst + j] = static_cast<double>(fdata[src + j]);
      dst += row_len;
      int axis = d - 2;
      if (axis < 0) break;
      for (;;) {
        std::size_t a = static_cast<std::size_t>(axis);
        ++idx[a];
        src += field_strides[a];
        if (idx[a] < ext[a]) break;
        src -= field_strides[a] * ext[a];
        idx[a] = 0;
        if (--axis < 0) break;
      }
      if (axis < 0) break;
    }
  }

  // Tensor-product sweeps: load vector plus tridiagonal solve along each
  // axis in turn. Cross-axis sweeps run on batches of contiguous lines.
  Dims cur = ext;
  const std::size_t bs = ws.batch_size();
  std::size_t max_m = 0;
  for (int i = 0; i < d; ++i) max_m = std::max(max_m, nodal_count(ext[static_cast<std::size_t>(i)]));
  ws.batch.resize(bs * max_m);
  double* fb = ws.batch.data();

  for (int axis = 0; axis < d; ++axis) {
    const std::size_t n = cur[static_cast<std::size_t>(axis)];
    const std::size_t m = nodal_count(n);
    const std::size_t step = strides[static_cast<std::size_t>(axis)];
    const ThomasAux& aux = ws.aux_for(m);

    if (axis == d - 1) {
      // Contiguous lines: one at a time.
      std::vector<detail::AxisRange> outer;
      for (int i = 0; i < d - 1; ++i)
        outer.push_back({0, cur[static_cast<std::size_t>(i)], strides[static_cast<std::size_t>(i)]});
      outer.push_back({0, 1, 0});
      detail::for_each_row_of(outer, [&](std::size_t base) {
        detail::batched_load(buf + base, step, 1, n, fb);
        detail::batched_solve(fb, 1, m, aux);
        for (std::size_t i = 0; i < m; ++i) buf[base + i * step] = fb[i];
      });
    } else {
      // Batch across the trailing contiguous axis.
      const std::size_t row = cur[static_cast<std::size_t>(d - 1)];
      std::vector<detail::AxisRange> outer;
      for (int i = 0; i < d - 1; ++i)
        if (i != axis)
          outer.push_back({0, cur[static_cast<std::size_t>(i)], strides[static_cast<std::size_t>(i)]});
      outer.push_back({0, 1, 0});
      detail::for_each_row_of(outer, [&](std::size_t base) {
        for (std::size_t t0 = 0; t0 < row; t0 += bs) {
          const std::size_t b = std::min(bs, row - t0);
          detail::batched_load(buf + base + t0, step, b, n, fb);
          detail::batched_solve(fb, b, m, aux);
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t t = 0; t < b; ++t) buf[base + t0 + i * step + t] = fb[i * b + t];
        }
      });
    }
    cur[static_cast<std::size_t>(axis)] = m;
  }

  return Correction{coarse, strides, buf};
}

/// Adds (sign +1) or subtracts (sign -1) the correction on the nodal corner
/// block; coefficient entries are untouched.
template <typename T>
void apply_correction(TensorField<T>& f, const Correction& corr, int sign) {
  const int d = static_cast<int>(corr.extents.size());
  if (f.ndims() != d) fail(errc::shape_error, "rank mismatch");
  for (int i = 0; i < d; ++i)
    if (corr.extents[static_cast<std::size_t>(i)] > f.dims[static_cast<std::size_t>(i)])
      fail(errc::shape_error, "correction exceeds field");
  const std::vector<std::size_t> fs = row_major_strides(f.dims);
  const double s = sign >= 0 ? 1.0 : -1.0;
  T* data = f.data.data();
  const double* z = corr.data;

  std::vector<detail::AxisRange> rows(static_cast<std::size_t>(d));
  std::vector<detail::AxisRange> zrows(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    rows[static_cast<std::size_t>(i)] = {0, corr.extents[static_cast<std::size_t>(i)],
                                         fs[static_cast<std::size_t>(i)]};
    zrows[static_cast<std::size_t>(i)] = {0, corr.extents[static_cast<std::size_t>(i)],
                                          corr.strides[static_cast<std::size_t>(i)]};
  }
  const std::size_t row_len = corr.extents[static_cast<std::size_t>(d - 1)];
  // Walk both odometers in lockstep.
  std::vector<std::size_t> idx(static_cast<std::size_t>(d > 1 ? d - 1 : 1), 0);
  std::size_t foff = 0, zoff = 0;
  for (;;) {
    for (std::size_t j = 0; j < row_len; ++j)
      data[foff + j] = static_cast<T>(static_cast<double>(data[foff + j]) + s * z[zoff + j]);
    int axis = d - 2;
    if (axis < 0) break;
    for (;;) {
      std::size_t a = static_cast<std::size_t>(axis);
      ++idx[a];
      foff += rows[a].stride;
      zoff += zrows[a].stride;
      if (idx[a] < rows[a].count) break;
      foff -= rows[a].stride * rows[a].count;
      zoff -= zrows[a].stride * zrows[a].count;
      idx[a] = 0;
      if (--axis < 0) break;
    }
    if (axis < 0) break;
  }
}

/// Decision hook for adaptive decomposition: called with the level index and
/// the natural-order level block before that level is processed; returning
/// true stops the recursion at that level.
template <typename T>
using StopDecider = std::function<bool(int level, const BlockView<const T>&)>;

template <typename T>
MultilevelCoefficients<T> decompose_with(TensorField<T> field, const GridHierarchy& h,
                                         SolverWorkspace& ws, const StopDecider<T>& decider,
                                         int min_stop_level = 0) {
  const int L = h.num_levels();
  if (field.dims != h.level_dims(L)) fail(errc::shape_error, "field dims do not match hierarchy");
  std::vector<T> scratch;
  int stop = min_stop_level;
  int l = L;
  for (; l > min_stop_level; --l) {
    if (decider && decider(l, BlockView<const T>{field.data.data(), h.level_dims(l),
                                                 row_major_strides(field.dims)})) {
      stop = l;
      break;
    }
    reorder_level(field, h, l, scratch);
    compute_coefficients(field, h, l);
    Correction corr = compute_correction(field, h, l, ws);
    apply_correction(field, corr, +1);
  }
  return MultilevelCoefficients<T>{pack_level_centric(field, h, stop), h, stop};
}

/// Full decomposition down to stop_level (0 = all the way).
template <typename T>
MultilevelCoefficients<T> decompose(TensorField<T> field, const GridHierarchy& h, int stop_level,
                                    SolverWorkspace& ws) {
  if (stop_level < 0 || stop_level > h.num_levels())
    fail(errc::invalid_level, "stop level out of range");
  return decompose_with<T>(std::move(field), h, ws, nullptr, stop_level);
}

template <typename T>
TensorField<T> recompose(const MultilevelCoefficients<T>& coeffs, SolverWorkspace& ws) {
  const GridHierarchy& h = coeffs.hierarchy;
  const int L = h.num_levels();
  TensorField<T> field = unpack_level_centric(coeffs.buffer, h, coeffs.stop_level);
  std::vector<T> scratch;
  for (int l = coeffs.stop_level + 1; l <= L; ++l) {
    Correction corr = compute_correction(field, h, l, ws);
    apply_correction(field, corr, -1);
    add_interpolant(field, h, l);
    inverse_reorder_level(field, h, l, scratch);
  }
  return field;
}

} // namespace mgrx

#endif
