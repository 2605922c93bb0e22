#include "mgrx/grid.hpp"

#include <algorithm>
#include <bit>
#include <limits>

namespace mgrx {

int GridHierarchy::max_levels(const Dims& dims) {
  if (dims.empty()) fail(errc::invalid_dims, "empty dimension list");
  int depth = std::numeric_limits<int>::max();
  for (std::size_t n : dims) {
    if (n < 2) fail(errc::invalid_dims, "dimension " + std::to_string(n) + " < 2");
    // floor(log2(n - 1)): coarsening n -> ceil(n/2) keeps every axis >= 2 for
    // exactly that many halvings.
    int k = std::bit_width(n - 1) - 1;
    depth = std::min(depth, k);
  }
  return depth;
}

GridHierarchy GridHierarchy::create(const Dims& dims, std::optional<int> levels) {
  int feasible = max_levels(dims);
  int L = levels.value_or(feasible);
  if (L < 0) fail(errc::invalid_level, "negative level count");
  if (L > feasible)
    fail(errc::depth_exceeded, "requested " + std::to_string(L) + " levels, at most " +
                                   std::to_string(feasible) + " feasible");

  GridHierarchy h;
  h.dims_per_level_.reserve(static_cast<std::size_t>(L) + 1);
  h.dims_per_level_.push_back(dims);
  for (int l = 0; l < L; ++l) {
    Dims coarser = h.dims_per_level_.back();
    for (std::size_t& n : coarser) n = (n + 1) / 2;
    h.dims_per_level_.push_back(std::move(coarser));
  }

  h.node_counts_.resize(static_cast<std::size_t>(L) + 1);
  h.delta_counts_.resize(static_cast<std::size_t>(L) + 1);
  for (int l = 0; l <= L; ++l) {
    h.node_counts_[static_cast<std::size_t>(l)] =
        element_count(h.dims_per_level_[static_cast<std::size_t>(L - l)]);
    std::size_t prev = l == 0 ? 0 : h.node_counts_[static_cast<std::size_t>(l - 1)];
    h.delta_counts_[static_cast<std::size_t>(l)] =
        h.node_counts_[static_cast<std::size_t>(l)] - prev;
  }
  return h;
}

} // namespace mgrx
