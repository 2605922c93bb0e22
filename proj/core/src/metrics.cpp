#include "mgrx/metrics.hpp"

#include <cstdio>

namespace mgrx {

std::string format_psnr(double psnr_db) {
  if (std::isinf(psnr_db)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", psnr_db);
  return buf;
}

std::string sweep_csv_header() {
  return "tolerance,rate_bits,psnr_db,linf,ratio,compress_MBps,decompress_MBps,stop_level";
}

std::string sweep_csv_row(const SweepRow& row) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.9g,%.6g,%s,%.6g,%.6g,%.6g,%.6g,%d", row.tolerance,
                row.report.rate_bits, format_psnr(row.report.psnr_db).c_str(), row.report.linf,
                row.report.ratio, row.report.compress_mbps, row.report.decompress_mbps,
                row.report.stop_level);
  return buf;
}

std::uint64_t config_hash(const std::string& canonical) {
  // FNV-1a
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

} // namespace mgrx
