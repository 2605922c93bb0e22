#include "mgrx/adaptive.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <random>

#include "mgrx/error.hpp"

namespace mgrx {

PenaltyModel estimate_penalty_factors(int ndims, double kappa, std::size_t trials,
                                      std::uint64_t seed, double e) {
  if (ndims < 1 || ndims > 8) fail(errc::invalid_input, "ndims out of range");
  if (trials == 0) fail(errc::invalid_input, "trials must be positive");
  PenaltyModel model;
  model.kappa = kappa;
  model.interp.assign(static_cast<std::size_t>(ndims), 0.0);
  model.lorenzo = 0.0;
  if (e == 0.0) return model;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coeff_err(-e, e);
  std::uniform_real_distribution<double> nodal_quant(-e / kappa, e / kappa);
  std::normal_distribution<double> correction_noise(0.0, model.correction_noise_sd * e);

  const unsigned neighbors = (1u << ndims) - 1;
  // Neighbor sign from inclusion-exclusion: +1 for an odd number of offsets.
  std::vector<double> signs(neighbors);
  for (unsigned s = 1; s <= neighbors; ++s)
    signs[s - 1] = (static_cast<unsigned>(__builtin_popcount(s)) % 2 == 1) ? 1.0 : -1.0;

  double lorenzo_sum = 0.0;
  std::vector<double> interp_sum(static_cast<std::size_t>(ndims), 0.0);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    double p = 0.0;
    for (unsigned i = 0; i < neighbors; ++i) p += signs[i] * coeff_err(rng);
    lorenzo_sum += std::fabs(p);

    for (int k = 1; k <= ndims; ++k) {
      const unsigned corners = 1u << k;
      double mean = 0.0;
      for (unsigned i = 0; i < corners; ++i) mean += nodal_quant(rng) + correction_noise(rng);
      interp_sum[static_cast<std::size_t>(k - 1)] += std::fabs(mean / corners);
    }
  }

  model.lorenzo = lorenzo_sum / static_cast<double>(trials);
  for (int k = 0; k < ndims; ++k)
    model.interp[static_cast<std::size_t>(k)] =
        interp_sum[static_cast<std::size_t>(k)] / static_cast<double>(trials);
  return model;
}

const PenaltyModel& penalty_model_for(int ndims, double kappa, std::uint64_t seed) {
  static std::mutex mu;
  static std::map<std::tuple<int, long long, std::uint64_t>, PenaltyModel> cache;
  std::scoped_lock lock(mu);
  auto key = std::make_tuple(ndims, static_cast<long long>(std::llround(kappa * 1000.0)), seed);
  auto it = cache.find(key);
  if (it == cache.end()) {
    PenaltyModel model;
    if (ndims == 3) {
      model = default_penalty_model_3d();
      model.kappa = kappa;
    } else {
      model = estimate_penalty_factors(ndims, kappa, 200000, seed);
    }
    it = cache.emplace(key, std::move(model)).first;
  }
  return it->second;
}

BlockErrors estimate_block_errors(std::span<const double> block, int ndims, double e,
                                  const PenaltyModel& model) {
  const int d = ndims;
  std::size_t expect = 1;
  for (int i = 0; i < d; ++i) expect *= 3;
  if (block.size() != expect) fail(errc::shape_error, "block must hold 3^d values");
  if (static_cast<int>(model.interp.size()) < d)
    fail(errc::invalid_input, "penalty model rank too small");

  std::vector<std::size_t> strides(static_cast<std::size_t>(d), 1);
  for (int i = d - 2; i >= 0; --i)
    strides[static_cast<std::size_t>(i)] = strides[static_cast<std::size_t>(i) + 1] * 3;

  BlockErrors out;
  std::vector<std::size_t> t(static_cast<std::size_t>(d), 0);
  for (std::size_t p = 0; p < block.size(); ++p) {
    int k = 0;
    bool lorenzo_ok = true;
    for (int i = 0; i < d; ++i) {
      if (t[static_cast<std::size_t>(i)] % 2 == 1) ++k;
      if (t[static_cast<std::size_t>(i)] == 0) lorenzo_ok = false;
    }
    if (k > 0) {
      // Multilinear interpolation from the 2^k bracketing nodal values.
      double sum = 0.0;
      const unsigned corners = 1u << k;
      for (unsigned cmask = 0; cmask < corners; ++cmask) {
        std::size_t off = p;
        unsigned bit = 0;
        for (int i = 0; i < d; ++i)
          if (t[static_cast<std::size_t>(i)] % 2 == 1) {
            if (cmask >> bit & 1u)
              off += strides[static_cast<std::size_t>(i)];
            else
              off -= strides[static_cast<std::size_t>(i)];
            ++bit;
          }
        sum += block[off];
      }
      out.interp += std::fabs(block[p] - sum / corners) +
                    model.interp[static_cast<std::size_t>(k - 1)] * e;

      if (lorenzo_ok) {
        double pred = 0.0;
        for (unsigned s = 1; s < (1u << d); ++s) {
          std::size_t off = p;
          int bits = 0;
          for (int i = 0; i < d; ++i)
            if (s >> i & 1u) {
              off -= strides[static_cast<std::size_t>(i)];
              ++bits;
            }
          pred += (bits % 2 == 1) ? block[off] : -block[off];
        }
        out.lorenzo += std::fabs(block[p] - pred) + model.lorenzo * e;
      }
    }
    for (int i = d - 1; i >= 0; --i) {
      std::size_t a = static_cast<std::size_t>(i);
      if (++t[a] < 3) break;
      t[a] = 0;
    }
  }
  return out;
}

} // namespace mgrx
