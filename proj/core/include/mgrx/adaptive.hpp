#ifndef MGRX_ADAPTIVE_HPP
#define MGRX_ADAPTIVE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "mgrx/tensor.hpp"

namespace mgrx {

/// Expected extra prediction error (as multiples of the level error bound)
/// caused by predicting from error-bounded instead of original values.
/// interp[k-1] applies to coefficient nodes with k odd coordinates; in 3D
/// these are the edge, plane and cube nodes.
struct PenaltyModel {
  double lorenzo = 1.22;
  std::vector<double> interp = {0.518, 0.366, 0.259};
  double correction_noise_sd = 0.8;  // x e, noise added to nodal nodes by the correction
  double kappa = 1.28;               // bin-width ratio between this level and the next coarser
};

inline PenaltyModel default_penalty_model_3d() { return PenaltyModel{}; }

/// Monte-Carlo estimate of the penalty factors for `ndims`-dimensional data
/// at error bound `e`. Coefficient-node errors are drawn from U(-e, e); nodal
/// node errors from U(-e/kappa, e/kappa) plus N(0, (0.8 e)^2).
PenaltyModel estimate_penalty_factors(int ndims, double kappa, std::size_t trials,
                                      std::uint64_t seed, double e = 1.0);

/// Cached model: 3D uses the calibrated constants above, other ranks are
/// simulated once per (ndims, kappa, seed).
const PenaltyModel& penalty_model_for(int ndims, double kappa, std::uint64_t seed);

struct BlockErrors {
  double lorenzo = 0.0;
  double interp = 0.0;
};

/// Penalty-adjusted prediction-error estimates for one 3^d sample block
/// (row-major values). The interpolation estimate covers all 3^d - 2^d
/// coefficient nodes; the Lorenzo estimate covers the coefficient nodes whose
/// full neighborhood lies inside the block.
BlockErrors estimate_block_errors(std::span<const double> block, int ndims, double e,
                                  const PenaltyModel& model);

namespace detail {

template <typename T>
bool accumulate_block_errors(const BlockView<const T>& level, std::size_t anchor_step, double e,
                             const PenaltyModel& model, BlockErrors& total) {
  const int d = level.ndims();
  std::size_t block_elems = 1;
  for (int i = 0; i < d; ++i) {
    if (level.extents[static_cast<std::size_t>(i)] < 3) return false;
    block_elems *= 3;
  }
  std::vector<double> block(block_elems);
  std::vector<std::size_t> anchor(static_cast<std::size_t>(d), 0);
  bool any = false;
  for (;;) {
    // Copy the 3^d block at this anchor.
    std::vector<std::size_t> t(static_cast<std::size_t>(d), 0);
    for (std::size_t p = 0; p < block_elems; ++p) {
      std::size_t off = 0;
      for (int i = 0; i < d; ++i)
        off += (anchor[static_cast<std::size_t>(i)] + t[static_cast<std::size_t>(i)]) *
               level.strides[static_cast<std::size_t>(i)];
      block[p] = static_cast<double>(level.data[off]);
      for (int i = d - 1; i >= 0; --i) {
        std::size_t a = static_cast<std::size_t>(i);
        if (++t[a] < 3) break;
        t[a] = 0;
      }
    }
    BlockErrors be = estimate_block_errors(block, d, e, model);
    total.lorenzo += be.lorenzo;
    total.interp += be.interp;
    any = true;

    int axis = d - 1;
    for (;;) {
      std::size_t a = static_cast<std::size_t>(axis);
      anchor[a] += anchor_step;
      if (anchor[a] + 3 <= level.extents[a]) break;
      anchor[a] = 0;
      if (--axis < 0) break;
    }
    if (axis < 0) break;
  }
  return any;
}

} // namespace detail

/// Decides whether to keep decomposing (false) or stop and hand the level to
/// the Lorenzo codec (true). Samples one out of four 3^d blocks along each
/// dimension; levels too small to sample default to stopping.
template <typename T>
bool choose_stop(const BlockView<const T>& level_block, double e, const PenaltyModel& model) {
  BlockErrors total;
  if (!detail::accumulate_block_errors(level_block, 8, e, model, total)) return true;
  return total.lorenzo < total.interp;
}

/// Full-enumeration variant (every block, anchor step 2); used to validate
/// the sampled decision.
template <typename T>
bool choose_stop_full(const BlockView<const T>& level_block, double e, const PenaltyModel& model) {
  BlockErrors total;
  if (!detail::accumulate_block_errors(level_block, 2, e, model, total)) return true;
  return total.lorenzo < total.interp;
}

} // namespace mgrx

#endif
