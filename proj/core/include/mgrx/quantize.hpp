#ifndef MGRX_QUANTIZE_HPP
#define MGRX_QUANTIZE_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "mgrx/grid.hpp"
#include "mgrx/transform.hpp"

namespace mgrx {

enum class QuantMode : std::uint8_t { uniform = 0, levelwise = 1 };

// Labels live in a signed alphabet of 2^16 values centered on zero; anything
// outside is stored losslessly as an outlier.
inline constexpr std::int32_t kLabelMin = -32768;
inline constexpr std::int32_t kLabelMax = 32767;

/// Per-level bin widths for a given error budget. The budget is the total
/// allowance for the sum over levels of the maximum quantization error, so
/// sum(q_l / 2) == budget in both modes.
struct QuantizationPlan {
  QuantMode mode = QuantMode::levelwise;
  double budget = 0.0;
  std::vector<double> bin_widths;  // q_l, level 0 (coarsest) first
  double range = 0.0;              // max - min of the quantized values, for reporting

  int num_levels() const { return static_cast<int>(bin_widths.size()) - 1; }
};

QuantizationPlan make_plan(QuantMode mode, double budget, const GridHierarchy& hierarchy);

/// Shannon-model estimate of the encoded size in bits: sum over levels of
/// #N*_l * log2(R / q_l), with negative per-level terms clamped to zero.
double estimated_cost(const QuantizationPlan& plan, const GridHierarchy& hierarchy, double range);

template <typename T>
struct Outlier {
  std::uint64_t position = 0;  // index into the level-centric buffer
  T value{};
};

/// Quantized multilevel coefficients: one label sequence per level plus the
/// losslessly kept outliers.
template <typename T>
struct LabelStream {
  std::vector<std::vector<std::int32_t>> labels;  // indexed by level, 0 = coarsest
  std::vector<Outlier<T>> outliers;
};

namespace detail {

// round-to-nearest, ties to even
inline double round_half_even(double x) { return std::nearbyint(x); }

template <typename T>
inline void quantize_span(std::span<const T> values, double q, std::uint64_t base_position,
                          std::vector<std::int32_t>& labels, std::vector<Outlier<T>>& outliers) {
  labels.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = static_cast<double>(values[i]);
    if (!std::isfinite(v)) fail(errc::nonfinite_data, "non-finite value in quantizer input");
    const double r = round_half_even(v / q);
    if (r < static_cast<double>(kLabelMin) || r > static_cast<double>(kLabelMax)) {
      outliers.push_back({base_position + i, values[i]});
      labels.push_back(0);
    } else {
      labels.push_back(static_cast<std::int32_t>(r));
    }
  }
}

} // namespace detail

/// Quantizes a fully decomposed coefficient buffer (stop_level must be 0) by
/// level with the plan's bin widths.
template <typename T>
LabelStream<T> quantize(const MultilevelCoefficients<T>& coeffs, const QuantizationPlan& plan) {
  const GridHierarchy& h = coeffs.hierarchy;
  if (coeffs.stop_level != 0) fail(errc::invalid_input, "quantize expects a fully decomposed buffer");
  if (plan.num_levels() != h.num_levels()) fail(errc::shape_error, "plan does not match hierarchy");
  LabelStream<T> out;
  out.labels.resize(static_cast<std::size_t>(h.num_levels()) + 1);
  std::uint64_t pos = 0;
  for (int l = 0; l <= h.num_levels(); ++l) {
    const std::size_t count = h.delta_count(l);
    detail::quantize_span<T>({coeffs.buffer.data() + pos, count},
                             plan.bin_widths[static_cast<std::size_t>(l)], pos,
                             out.labels[static_cast<std::size_t>(l)], out.outliers);
    pos += count;
  }
  return out;
}

/// Quantizes only the levels above `stop_level` (used when the coarse block
/// is handed to a different codec).
template <typename T>
LabelStream<T> quantize_tail(std::span<const T> buffer, const GridHierarchy& h, int stop_level,
                             const QuantizationPlan& plan) {
  LabelStream<T> out;
  out.labels.resize(static_cast<std::size_t>(h.num_levels() - stop_level));
  std::uint64_t pos = h.node_count(stop_level);
  for (int l = stop_level + 1; l <= h.num_levels(); ++l) {
    const std::size_t count = h.delta_count(l);
    detail::quantize_span<T>({buffer.data() + pos, count},
                             plan.bin_widths[static_cast<std::size_t>(l)], pos,
                             out.labels[static_cast<std::size_t>(l - stop_level - 1)],
                             out.outliers);
    pos += count;
  }
  return out;
}

/// Reconstructs coefficient values from labels: value = label * q_l, with
/// outliers restored exactly.
template <typename T>
MultilevelCoefficients<T> dequantize(const LabelStream<T>& stream, const QuantizationPlan& plan,
                                     const GridHierarchy& h) {
  if (stream.labels.size() != static_cast<std::size_t>(h.num_levels()) + 1)
    fail(errc::shape_error, "label stream does not match hierarchy");
  MultilevelCoefficients<T> out{std::vector<T>(h.total_count()), h, 0};
  std::size_t pos = 0;
  for (int l = 0; l <= h.num_levels(); ++l) {
    const double q = plan.bin_widths[static_cast<std::size_t>(l)];
    const auto& labels = stream.labels[static_cast<std::size_t>(l)];
    if (labels.size() != h.delta_count(l)) fail(errc::shape_error, "label count mismatch");
    for (std::size_t i = 0; i < labels.size(); ++i)
      out.buffer[pos + i] = static_cast<T>(static_cast<double>(labels[i]) * q);
    pos += labels.size();
  }
  for (const auto& o : stream.outliers) out.buffer[o.position] = o.value;
  return out;
}

template <typename T>
void dequantize_tail(std::span<T> buffer, const LabelStream<T>& stream, const GridHierarchy& h,
                     int stop_level, const QuantizationPlan& plan) {
  std::size_t pos = h.node_count(stop_level);
  for (int l = stop_level + 1; l <= h.num_levels(); ++l) {
    const double q = plan.bin_widths[static_cast<std::size_t>(l)];
    const auto& labels = stream.labels[static_cast<std::size_t>(l - stop_level - 1)];
    if (labels.size() != h.delta_count(l)) fail(errc::shape_error, "label count mismatch");
    for (std::size_t i = 0; i < labels.size(); ++i)
      buffer[pos + i] = static_cast<T>(static_cast<double>(labels[i]) * q);
    pos += labels.size();
  }
  for (const auto& o : stream.outliers) buffer[o.position] = o.value;
}

} // namespace mgrx

#endif
