#ifndef MGRX_METRICS_HPP
#define MGRX_METRICS_HPP

#include <chrono>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mgrx/error.hpp"
#include "mgrx/pipeline.hpp"

namespace mgrx {

/// Running sums for PSNR over one or more fields; dataset-level values use
/// totals rather than means of per-field PSNRs.
struct PsnrAccumulator {
  double sq_err = 0.0;
  double vmin = std::numeric_limits<double>::infinity();
  double vmax = -std::numeric_limits<double>::infinity();
  std::size_t n = 0;

  template <typename T>
  void add(std::span<const T> original, std::span<const T> reconstructed) {
    if (original.size() != reconstructed.size()) fail(errc::shape_error, "length mismatch");
    for (std::size_t i = 0; i < original.size(); ++i) {
      const double a = static_cast<double>(original[i]);
      const double b = static_cast<double>(reconstructed[i]);
      vmin = std::min(vmin, a);
      vmax = std::max(vmax, a);
      sq_err += (a - b) * (a - b);
    }
    n += original.size();
  }

  double value() const {
    if (n == 0) fail(errc::invalid_input, "no samples");
    if (sq_err == 0.0) return std::numeric_limits<double>::infinity();
    const double range = vmax - vmin;
    if (range == 0.0) fail(errc::undefined_psnr, "zero range with nonzero error");
    return 20.0 * std::log10(range) - 10.0 * std::log10(sq_err / static_cast<double>(n));
  }
};

template <typename T>
double psnr(std::span<const T> original, std::span<const T> reconstructed) {
  PsnrAccumulator acc;
  acc.add(original, reconstructed);
  return acc.value();
}

template <typename T>
double linf(std::span<const T> original, std::span<const T> reconstructed) {
  if (original.size() != reconstructed.size()) fail(errc::shape_error, "length mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < original.size(); ++i)
    m = std::max(m, std::fabs(static_cast<double>(original[i]) -
                              static_cast<double>(reconstructed[i])));
  return m;
}

/// Average stored bits per value.
inline double rate_bits(std::size_t artifact_bytes, std::size_t value_count) {
  if (value_count == 0) fail(errc::invalid_input, "empty field");
  return 8.0 * static_cast<double>(artifact_bytes) / static_cast<double>(value_count);
}

inline double compression_ratio(std::size_t original_bytes, std::size_t artifact_bytes) {
  if (artifact_bytes == 0) fail(errc::invalid_input, "empty artifact");
  return static_cast<double>(original_bytes) / static_cast<double>(artifact_bytes);
}

struct QualityReport {
  double psnr_db = 0.0;
  double linf = 0.0;
  double rate_bits = 0.0;
  double ratio = 0.0;
  double compress_mbps = 0.0;
  double decompress_mbps = 0.0;
  int stop_level = 0;
  std::size_t artifact_bytes = 0;
};

std::string format_psnr(double psnr_db);  // "inf" for the infinite sentinel

struct SweepRow {
  double tolerance = 0.0;
  QualityReport report;
};

std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRow& row);
std::uint64_t config_hash(const std::string& canonical);

/// One full compress/decompress per tolerance; rows come back in input order.
template <typename T>
std::vector<SweepRow> rd_sweep(const TensorField<T>& field, std::span<const double> tolerances,
                               CompressOptions options) {
  using clock = std::chrono::steady_clock;
  std::vector<SweepRow> rows;
  const std::size_t original_bytes = field.size() * sizeof(T);
  double prev = 0.0;
  for (std::size_t i = 0; i < tolerances.size(); ++i) {
    const double tol = tolerances[i];
    if (!(tol > 0.0)) fail(errc::invalid_budget, "tolerances must be positive");
    if (i > 0 && tol < prev) fail(errc::invalid_input, "tolerances must be sorted ascending");
    prev = tol;
    options.budget = tol;

    auto t0 = clock::now();
    std::vector<std::uint8_t> artifact = compress(field, options);
    auto t1 = clock::now();
    Artifact parsed = read_artifact(artifact);
    TensorField<T> recon = decompress_field<T>(parsed);
    auto t2 = clock::now();

    SweepRow row;
    row.tolerance = tol;
    row.report.artifact_bytes = artifact.size();
    row.report.rate_bits = rate_bits(artifact.size(), field.size());
    row.report.ratio = compression_ratio(original_bytes, artifact.size());
    row.report.psnr_db = psnr<T>(field.data, recon.data);
    row.report.linf = linf<T>(field.data, recon.data);
    row.report.stop_level = parsed.stop_level;
    const double cs = std::chrono::duration<double>(t1 - t0).count();
    const double ds = std::chrono::duration<double>(t2 - t1).count();
    row.report.compress_mbps = cs > 0 ? static_cast<double>(original_bytes) / cs / 1e6 : 0.0;
    row.report.decompress_mbps = ds > 0 ? static_cast<double>(original_bytes) / ds / 1e6 : 0.0;
    rows.push_back(row);
  }
  return rows;
}

} // namespace mgrx

#endif
