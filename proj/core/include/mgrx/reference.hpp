#ifndef MGRX_REFERENCE_HPP
#define MGRX_REFERENCE_HPP

#include <vector>

#include "mgrx/transform.hpp"

namespace mgrx {

// Straightforward strided implementation of the decomposition: levels stay at
// their original array positions (stride doubling per level), nothing is
// reordered, lines are processed one at a time and the elimination factors
// are rebuilt per line. Kept as the performance baseline and as an
// independent path for equivalence tests; it shares only the per-element
// arithmetic helpers with the optimized code, so results match bit for bit.

namespace detail {

template <typename T>
void reference_coefficients(TensorField<T>& f, const GridHierarchy& h, int level, bool subtract) {
  const Dims& ext = h.level_dims(level);
  const int d = static_cast<int>(ext.size());
  const std::vector<std::size_t> fs = row_major_strides(f.dims);
  const int L = h.num_levels();
  std::size_t S = std::size_t{1} << (L - level);
  T* data = f.data.data();

  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  for (;;) {
    // Set axes = odd level coordinates, ascending axis order (same corner
    // enumeration as the optimized path).
    unsigned k = 0;
    std::size_t corner = 0;
    std::size_t node = 0;
    std::size_t steps[8];
    for (int i = 0; i < d; ++i) {
      const std::size_t j = idx[static_cast<std::size_t>(i)];
      const std::size_t st = fs[static_cast<std::size_t>(i)] * S;
      node += j * st;
      if (j % 2 == 1) {
        corner += (j - 1) * st;
        steps[k++] = (j + 1 < ext[static_cast<std::size_t>(i)]) ? 2 * st : 0;
      } else {
        corner += j * st;
      }
    }
    if (k > 0) {
      const unsigned corners = 1u << k;
      std::size_t offs[1u << 8];
      for (unsigned cmask = 0; cmask < corners; ++cmask) {
        std::size_t o = 0;
        for (unsigned b = 0; b < k; ++b)
          if (cmask >> b & 1u) o += steps[b];
        offs[cmask] = o;
      }
      const double avg = mgrx::detail::corner_average(data + corner, offs, corners,
                                                      1.0 / static_cast<double>(corners));
      data[node] = static_cast<T>(subtract ? static_cast<double>(data[node]) - avg
                                           : static_cast<double>(data[node]) + avg);
    }
    int axis = d - 1;
    for (;;) {
      std::size_t a = static_cast<std::size_t>(axis);
      ++idx[a];
      if (idx[a] < ext[a]) break;
      idx[a] = 0;
      if (--axis < 0) return;
    }
  }
}

template <typename T>
void reference_level_step(TensorField<T>& f, const GridHierarchy& h, int level,
                          std::vector<double>& work, std::vector<double>& line) {
  const Dims& ext = h.level_dims(level);
  const int d = static_cast<int>(ext.size());
  const int L = h.num_levels();
  const std::size_t S = std::size_t{1} << (L - level);
  const std::vector<std::size_t> fs = row_major_strides(f.dims);

  reference_coefficients(f, h, level, true);

  // Multilevel component at the original strided positions.
  work.assign(f.size(), 0.0);
  {
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    for (;;) {
      bool nodal = true;
      std::size_t off = 0;
      for (int i = 0; i < d; ++i) {
        off += idx[static_cast<std::size_t>(i)] * S * fs[static_cast<std::size_t>(i)];
        nodal = nodal && idx[static_cast<std::size_t>(i)] % 2 == 0;
      }
      work[off] = nodal ? 0.0 : static_cast<double>(f.data[off]);
      int axis = d - 1;
      for (;;) {
        std::size_t a = static_cast<std::size_t>(axis);
        ++idx[a];
        if (idx[a] < ext[a]) break;
        idx[a] = 0;
        if (--axis < 0) break;
      }
      if (axis < 0) break;
    }
  }

  // Axis sweeps, one strided line at a time, elimination factors rebuilt per
  // line. Already-swept axes iterate over coarse coordinates only.
  for (int axis = 0; axis < d; ++axis) {
    const std::size_t n = ext[static_cast<std::size_t>(axis)];
    const std::size_t m = nodal_count(n);
    const std::size_t step = fs[static_cast<std::size_t>(axis)] * S;
    line.resize(m);

    std::vector<std::size_t> counts, steps;
    for (int i = 0; i < d; ++i) {
      if (i == axis) continue;
      const std::size_t st = fs[static_cast<std::size_t>(i)] * S;
      counts.push_back(i < axis ? nodal_count(ext[static_cast<std::size_t>(i)])
                                : ext[static_cast<std::size_t>(i)]);
      steps.push_back(i < axis ? 2 * st : st);
    }
    std::vector<std::size_t> idx(counts.size(), 0);
    std::size_t base = 0;
    for (;;) {
      const double* w = work.data() + base;
      for (std::size_t i = 0; i < m; ++i)
        line[i] = mgrx::detail::load_entry([&](std::size_t j) { return w[j * step]; }, i, n);
      ThomasAux aux = ThomasAux::build(m);
      mgrx::detail::batched_solve(line.data(), 1, m, aux);
      for (std::size_t i = 0; i < m; ++i) work[base + i * 2 * step] = line[i];

      int ax = static_cast<int>(counts.size()) - 1;
      if (ax < 0) break;
      for (;;) {
        std::size_t a = static_cast<std::size_t>(ax);
        ++idx[a];
        base += steps[a];
        if (idx[a] < counts[a]) break;
        base -= steps[a] * counts[a];
        idx[a] = 0;
        if (--ax < 0) break;
      }
      if (ax < 0) break;
    }
  }

  // Apply the correction on the coarse subgrid.
  {
    const Dims& coarse = h.level_dims(level - 1);
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    for (;;) {
      std::size_t off = 0;
      for (int i = 0; i < d; ++i)
        off += idx[static_cast<std::size_t>(i)] * 2 * S * fs[static_cast<std::size_t>(i)];
      f.data[off] = static_cast<T>(static_cast<double>(f.data[off]) + work[off]);
      int axis = d - 1;
      for (;;) {
        std::size_t a = static_cast<std::size_t>(axis);
        ++idx[a];
        if (idx[a] < coarse[a]) break;
        idx[a] = 0;
        if (--axis < 0) break;
      }
      if (axis < 0) break;
    }
  }
}

} // namespace detail

/// Gathers the strided in-place decomposition into the same level-centric
/// buffer layout the optimized path produces.
template <typename T>
std::vector<T> reference_pack(const TensorField<T>& f, const GridHierarchy& h, int stop_level) {
  const int L = h.num_levels();
  const int d = f.ndims();
  const std::vector<std::size_t> fs = row_major_strides(f.dims);
  std::vector<T> out;
  out.reserve(f.size());

  auto gather_block = [&](int l, bool skip_corner) {
    const Dims& ext = h.level_dims(l);
    const std::size_t S = std::size_t{1} << (L - l);
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    for (;;) {
      bool corner = true;
      std::size_t off = 0;
      for (int i = 0; i < d; ++i) {
        const std::size_t r = idx[static_cast<std::size_t>(i)];
        const std::size_t m = nodal_count(ext[static_cast<std::size_t>(i)]);
        // Reordered coordinate r maps to level coordinate 2r (nodal part) or
        // 2(r-m)+1 (coefficient part); matching the optimized pack order.
        const std::size_t coord = r < m ? 2 * r : 2 * (r - m) + 1;
        corner = corner && r < m;
        off += coord * S * fs[static_cast<std::size_t>(i)];
      }
      if (!(skip_corner && corner)) out.push_back(f.data[off]);
      int axis = d - 1;
      for (;;) {
        std::size_t a = static_cast<std::size_t>(axis);
        ++idx[a];
        if (idx[a] < ext[a]) break;
        idx[a] = 0;
        if (--axis < 0) break;
      }
      if (axis < 0) break;
    }
  };

  {
    // Coarse block: nodal coordinates only, row-major.
    const Dims& ext = h.level_dims(stop_level);
    const std::size_t S = std::size_t{1} << (L - stop_level);
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    for (;;) {
      std::size_t off = 0;
      for (int i = 0; i < d; ++i)
        off += idx[static_cast<std::size_t>(i)] * S * fs[static_cast<std::size_t>(i)];
      out.push_back(f.data[off]);
      int axis = d - 1;
      for (;;) {
        std::size_t a = static_cast<std::size_t>(axis);
        ++idx[a];
        if (idx[a] < ext[a]) break;
        idx[a] = 0;
        if (--axis < 0) break;
      }
      if (axis < 0) break;
    }
  }
  for (int l = stop_level + 1; l <= L; ++l) gather_block(l, true);
  return out;
}

/// Unoptimized decomposition (original MGARD-style access pattern).
template <typename T>
MultilevelCoefficients<T> reference_decompose(TensorField<T> field, const GridHierarchy& h,
                                              int stop_level) {
  const int L = h.num_levels();
  if (field.dims != h.level_dims(L)) fail(errc::shape_error, "field dims do not match hierarchy");
  if (stop_level < 0 || stop_level > L) fail(errc::invalid_level, "stop level out of range");
  std::vector<double> work;
  std::vector<double> line;
  for (int l = L; l > stop_level; --l) detail::reference_level_step(field, h, l, work, line);
  return MultilevelCoefficients<T>{reference_pack(field, h, stop_level), h, stop_level};
}

} // namespace mgrx

#endif
