#ifndef MGRX_PIPELINE_HPP
#define MGRX_PIPELINE_HPP

#include <cmath>
#include <optional>
#include <variant>

#include "mgrx/adaptive.hpp"
#include "mgrx/container.hpp"
#include "mgrx/huffman.hpp"
#include "mgrx/lorenzo.hpp"
#include "mgrx/quantize.hpp"
#include "mgrx/transform.hpp"

namespace mgrx {

struct CompressOptions {
  double budget = 1e-3;                 // absolute error budget (tolerance)
  QuantMode quant_mode = QuantMode::levelwise;
  std::optional<int> levels;            // decomposition depth, default = max feasible
  std::optional<int> force_stop_level;  // bypass the adaptive heuristic
  bool adaptive = true;                 // false -> always decompose fully
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
};

template <typename T>
constexpr ElementType element_type_of() {
  return sizeof(T) == 4 ? ElementType::f32 : ElementType::f64;
}

namespace detail {

template <typename T>
void write_outliers(ByteWriter& w, const std::vector<Outlier<T>>& outliers) {
  w.u64(outliers.size());
  for (const auto& o : outliers) {
    w.u64(o.position);
    if constexpr (sizeof(T) == 4)
      w.f32(static_cast<float>(o.value));
    else
      w.f64(static_cast<double>(o.value));
  }
}

template <typename T>
std::vector<Outlier<T>> read_outliers(ByteReader& r, std::uint64_t limit) {
  const std::uint64_t count = r.u64();
  if (count > limit) fail(errc::corrupt, "outlier count exceeds value count");
  std::vector<Outlier<T>> out;
  out.reserve(static_cast<std::size_t>(count));
  std::uint64_t prev = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    Outlier<T> o;
    o.position = r.u64();
    if (o.position >= limit || (i > 0 && o.position <= prev))
      fail(errc::corrupt, "outlier positions not strictly increasing");
    prev = o.position;
    if constexpr (sizeof(T) == 4)
      o.value = static_cast<T>(r.f32());
    else
      o.value = static_cast<T>(r.f64());
    if (!std::isfinite(static_cast<double>(o.value))) fail(errc::corrupt, "non-finite outlier");
    out.push_back(o);
  }
  return out;
}

template <typename T>
std::vector<std::uint8_t> label_section(const std::vector<std::int32_t>& labels) {
  ByteWriter w;
  w.u64(labels.size());
  std::vector<std::uint8_t> enc = encode_labels(labels);
  w.raw(enc);
  return std::move(w.bytes);
}

inline std::vector<std::int32_t> parse_label_section(std::span<const std::uint8_t> bytes,
                                                     std::size_t expected) {
  ByteReader r{bytes};
  const std::uint64_t count = r.u64();
  if (count != expected) fail(errc::corrupt, "label count mismatch");
  return decode_labels(bytes.subspan(r.pos), expected);
}

template <typename T>
std::vector<std::uint8_t> lorenzo_section(const LorenzoStream<T>& s) {
  ByteWriter w;
  w.f64(s.error_bound);
  w.u64(s.labels.size());
  std::vector<std::uint8_t> enc = encode_labels(s.labels);
  w.u64(enc.size());
  w.raw(enc);
  write_outliers(w, s.outliers);
  return std::move(w.bytes);
}

template <typename T>
LorenzoStream<T> parse_lorenzo_section(std::span<const std::uint8_t> bytes, std::size_t expected) {
  ByteReader r{bytes};
  LorenzoStream<T> s;
  s.error_bound = r.f64();
  if (!(s.error_bound > 0.0) || !std::isfinite(s.error_bound))
    fail(errc::corrupt, "bad error bound");
  const std::uint64_t count = r.u64();
  if (count != expected) fail(errc::corrupt, "label count mismatch");
  const std::uint64_t hlen = r.u64();
  s.labels = decode_labels(r.raw(static_cast<std::size_t>(hlen)), expected);
  s.outliers = read_outliers<T>(r, count);
  return s;
}

template <typename T>
void check_finite(const TensorField<T>& field) {
  for (std::size_t i = 0; i < field.size(); ++i)
    if (!std::isfinite(static_cast<double>(field.data[i])))
      fail(errc::nonfinite_data, "non-finite value at offset " + std::to_string(i));
}

} // namespace detail

/// Error bound handed to the coarse codec when decomposition stops at
/// `stop_level`: the budget of all levels at or below it.
inline double coarse_error_bound(const QuantizationPlan& plan, int stop_level) {
  double e = 0.0;
  for (int l = 0; l <= stop_level; ++l) e += plan.bin_widths[static_cast<std::size_t>(l)] / 2.0;
  return e;
}

template <typename T>
std::vector<std::uint8_t> compress(const TensorField<T>& field, const CompressOptions& opt) {
  detail::check_finite(field);
  const GridHierarchy h = GridHierarchy::create(field.dims, opt.levels);
  const int L = h.num_levels();
  const QuantizationPlan plan = make_plan(opt.quant_mode, opt.budget, h);

  SolverWorkspace ws(opt.batch_size);
  ws.prepare(h);

  int stop = 0;
  std::optional<MultilevelCoefficients<T>> coeffs;
  if (opt.force_stop_level) {
    stop = *opt.force_stop_level;
    if (stop < 0 || stop > L) fail(errc::invalid_level, "forced stop level out of range");
    if (stop < L) coeffs = decompose(field, h, stop, ws);
  } else if (!opt.adaptive) {
    coeffs = decompose(field, h, 0, ws);
  } else {
    const int d = static_cast<int>(field.dims.size());
    StopDecider<T> decider = [&](int level, const BlockView<const T>& block) {
      const double e_l = plan.bin_widths[static_cast<std::size_t>(level)] / 2.0;
      const double kappa = plan.bin_widths[static_cast<std::size_t>(level)] /
                           plan.bin_widths[static_cast<std::size_t>(level - 1)];
      return choose_stop(block, e_l, penalty_model_for(d, kappa, opt.seed));
    };
    coeffs = decompose_with(field, h, ws, decider);
    stop = coeffs->stop_level;
    if (stop == L) coeffs.reset();
  }

  Artifact a;
  a.element_type = element_type_of<T>();
  a.dims = field.dims;
  a.levels = static_cast<std::uint8_t>(L);
  a.stop_level = static_cast<std::uint8_t>(stop);
  a.quant_mode = plan.mode;
  a.budget = plan.budget;
  a.bin_widths = plan.bin_widths;

  if (stop == L) {
    a.method = Method::lorenzo_only;
    LorenzoStream<T> stream = compress_lorenzo(field, opt.budget);
    a.sections.push_back(detail::lorenzo_section(stream));
  } else if (stop == 0) {
    a.method = Method::multigrid_full;
    LabelStream<T> labels = quantize(*coeffs, plan);
    for (const auto& lv : labels.labels) a.sections.push_back(detail::label_section<T>(lv));
    ByteWriter w;
    detail::write_outliers(w, labels.outliers);
    a.sections.push_back(std::move(w.bytes));
  } else {
    a.method = Method::multigrid_lorenzo;
    LabelStream<T> labels = quantize_tail<T>(coeffs->buffer, h, stop, plan);
    for (const auto& lv : labels.labels) a.sections.push_back(detail::label_section<T>(lv));
    ByteWriter w;
    detail::write_outliers(w, labels.outliers);
    a.sections.push_back(std::move(w.bytes));
    TensorField<T> coarse(h.level_dims(stop),
                          std::vector<T>(coeffs->buffer.begin(),
                                         coeffs->buffer.begin() +
                                             static_cast<std::ptrdiff_t>(h.node_count(stop))));
    LorenzoStream<T> stream = compress_lorenzo(coarse, coarse_error_bound(plan, stop));
    a.sections.push_back(detail::lorenzo_section(stream));
  }
  return write_artifact(a);
}

template <typename T>
TensorField<T> decompress_field(const Artifact& a) {
  if (a.element_type != element_type_of<T>()) fail(errc::invalid_input, "element type mismatch");
  const GridHierarchy h = GridHierarchy::create(a.dims, static_cast<int>(a.levels));
  const int L = h.num_levels();
  const int stop = a.stop_level;

  if (a.method != Method::lorenzo_only)
    for (double q : a.bin_widths)
      if (!(q > 0.0) || !std::isfinite(q)) fail(errc::corrupt, "bad bin width");

  QuantizationPlan plan;
  plan.mode = a.quant_mode;
  plan.budget = a.budget;
  plan.bin_widths = a.bin_widths;

  if (a.method == Method::lorenzo_only) {
    if (a.sections.size() != 1) fail(errc::corrupt, "unexpected section count");
    LorenzoStream<T> stream =
        detail::parse_lorenzo_section<T>(a.sections[0], element_count(a.dims));
    return decompress_lorenzo(stream, a.dims);
  }

  SolverWorkspace ws;
  ws.prepare(h);

  if (a.method == Method::multigrid_full) {
    if (stop != 0) fail(errc::corrupt, "bad stop level for full method");
    if (a.sections.size() != static_cast<std::size_t>(L) + 2)
      fail(errc::corrupt, "unexpected section count");
    LabelStream<T> stream;
    stream.labels.resize(static_cast<std::size_t>(L) + 1);
    for (int l = 0; l <= L; ++l)
      stream.labels[static_cast<std::size_t>(l)] =
          detail::parse_label_section(a.sections[static_cast<std::size_t>(l)], h.delta_count(l));
    ByteReader r{a.sections.back()};
    stream.outliers = detail::read_outliers<T>(r, h.total_count());
    MultilevelCoefficients<T> coeffs = dequantize(stream, plan, h);
    return recompose(coeffs, ws);
  }

  // multigrid + lorenzo coarse block
  if (stop < 1 || stop > L) fail(errc::corrupt, "bad stop level");
  const std::size_t tail_levels = static_cast<std::size_t>(L - stop);
  if (a.sections.size() != tail_levels + 2) fail(errc::corrupt, "unexpected section count");
  MultilevelCoefficients<T> coeffs{std::vector<T>(h.total_count()), h, stop};
  LabelStream<T> stream;
  stream.labels.resize(tail_levels);
  for (std::size_t i = 0; i < tail_levels; ++i)
    stream.labels[i] =
        detail::parse_label_section(a.sections[i], h.delta_count(stop + 1 + static_cast<int>(i)));
  {
    ByteReader r{a.sections[tail_levels]};
    stream.outliers = detail::read_outliers<T>(r, h.total_count());
    for (const auto& o : stream.outliers)
      if (o.position < h.node_count(stop)) fail(errc::corrupt, "outlier inside coarse block");
  }
  dequantize_tail<T>(coeffs.buffer, stream, h, stop, plan);
  LorenzoStream<T> coarse_stream =
      detail::parse_lorenzo_section<T>(a.sections.back(), h.node_count(stop));
  TensorField<T> coarse = decompress_lorenzo(coarse_stream, h.level_dims(stop));
  std::copy(coarse.data.begin(), coarse.data.end(), coeffs.buffer.begin());
  return recompose(coeffs, ws);
}

using AnyField = std::variant<TensorField<float>, TensorField<double>>;

inline AnyField decompress(std::span<const std::uint8_t> bytes) {
  Artifact a = read_artifact(bytes);
  if (a.element_type == ElementType::f32) return decompress_field<float>(a);
  return decompress_field<double>(a);
}

} // namespace mgrx

#endif
