#ifndef MGRX_GRID_HPP
#define MGRX_GRID_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "mgrx/error.hpp"

namespace mgrx {

using Dims = std::vector<std::size_t>;

inline std::size_t element_count(const Dims& dims) {
  std::size_t n = 1;
  for (std::size_t d : dims) n *= d;
  return n;
}

/// Decreasing sequence of subgrids used by the multilevel transform.
///
/// Level L is the input grid; each coarser level keeps the even-index nodes
/// along every axis, so the axis lengths shrink as ceil(n/2). Level 0 is the
/// coarsest grid. Immutable after construction.
class GridHierarchy {
public:
  /// Builds the hierarchy for `dims`. If `levels` is absent, coarsens as far
  /// as possible without dropping any axis below 2 nodes.
  static GridHierarchy create(const Dims& dims, std::optional<int> levels = std::nullopt);

  /// Deepest usable hierarchy for these dims: min over axes of floor(log2(n-1)).
  static int max_levels(const Dims& dims);

  int num_levels() const { return static_cast<int>(dims_per_level_.size()) - 1; }
  int ndims() const { return static_cast<int>(dims_per_level_.front().size()); }

  /// Extents of grid N_l (level 0 = coarsest, num_levels() = finest).
  const Dims& level_dims(int level) const {
    check_level(level);
    return dims_per_level_[static_cast<std::size_t>(num_levels() - level)];
  }

  /// Number of nodes in N_l.
  std::size_t node_count(int level) const {
    check_level(level);
    return node_counts_[static_cast<std::size_t>(level)];
  }

  /// #N*_l = #N_l - #N_{l-1}, the number of nodes introduced at level l.
  std::size_t delta_count(int level) const {
    check_level(level);
    return delta_counts_[static_cast<std::size_t>(level)];
  }

  std::size_t total_count() const { return node_counts_.back(); }

  /// Per-level extents, finest grid first.
  const std::vector<Dims>& dims_per_level() const { return dims_per_level_; }

  const std::vector<std::size_t>& delta_counts() const { return delta_counts_; }

  bool operator==(const GridHierarchy&) const = default;

private:
  GridHierarchy() = default;
  void check_level(int level) const {
    if (level < 0 || level > num_levels())
      fail(errc::invalid_level, "level " + std::to_string(level) + " out of range [0, " +
                                    std::to_string(num_levels()) + "]");
  }

  std::vector<Dims> dims_per_level_;          // finest first
  std::vector<std::size_t> delta_counts_;     // indexed by level, 0 = coarsest
  std::vector<std::size_t> node_counts_;      // indexed by level, 0 = coarsest
};

} // namespace mgrx

#endif
