// Independent reference implementations used only by the tests. These are
// deliberately written from first principles (quadrature, dense solves,
// brute-force enumeration) so they share no code with the library paths they
// check.
#ifndef MGRX_TEST_ORACLES_HPP
#define MGRX_TEST_ORACLES_HPP

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

namespace oracle {

// ---- exact quadrature for the load vector -------------------------------
//
// f_i = integral of (piecewise-linear interpolant of the line values at unit
// spacing) times the coarse hat function centered at node i (spacing 2).
// Two-point Gauss-Legendre per unit cell is exact for the quadratic
// integrand. Only defined for odd line lengths, where the coarse grid has a
// node at both ends.
inline std::vector<double> load_vector_quadrature(const std::vector<double>& line) {
  const std::size_t n = line.size();
  const std::size_t m = (n + 1) / 2;
  std::vector<double> out(m, 0.0);
  const double g = 1.0 / std::sqrt(3.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double center = 2.0 * static_cast<double>(i);
    auto hat = [&](double x) {
      const double t = std::fabs(x - center) / 2.0;
      return t >= 1.0 ? 0.0 : 1.0 - t;
    };
    double sum = 0.0;
    for (std::size_t cell = 0; cell + 1 < n; ++cell) {
      const double a = static_cast<double>(cell);
      if (a + 1.0 <= center - 2.0 || a >= center + 2.0) continue;
      auto u = [&](double x) { return line[cell] + (line[cell + 1] - line[cell]) * (x - a); };
      const double x0 = a + 0.5 * (1.0 - g);
      const double x1 = a + 0.5 * (1.0 + g);
      sum += 0.5 * (u(x0) * hat(x0) + u(x1) * hat(x1));
    }
    out[i] = sum;
  }
  return out;
}

// ---- two-pass load vector: fine mass matrix then restriction -------------
//
// The prior-work formulation: multiply by the fine-grid mass matrix (unit
// spacing), then restrict to the coarse grid with the [1/2, 1, 1/2] stencil.
// Odd lengths only (matches the quadrature convention at both ends).
inline std::vector<double> load_vector_two_pass(const std::vector<double>& line) {
  const std::size_t n = line.size();
  std::vector<double> fine(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = (j == 0 || j + 1 == n ? 1.0 / 3.0 : 2.0 / 3.0) * line[j];
    if (j > 0) acc += line[j - 1] / 6.0;
    if (j + 1 < n) acc += line[j + 1] / 6.0;
    fine[j] = acc;
  }
  const std::size_t m = (n + 1) / 2;
  std::vector<double> out(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double acc = fine[2 * i];
    if (2 * i >= 1) acc += 0.5 * fine[2 * i - 1];
    if (2 * i + 1 < n) acc += 0.5 * fine[2 * i + 1];
    out[i] = acc;
  }
  return out;
}

// ---- dense Gaussian elimination for the correction system ----------------
//
// Builds the coarse mass matrix with an explicit spacing h (both sides scale
// by h, so the solution must not depend on it) and solves with partial
// pivoting.
inline std::vector<double> dense_mass_solve(const std::vector<double>& f, double h = 1.0) {
  const std::size_t m = f.size();
  std::vector<std::vector<double>> a(m, std::vector<double>(m + 1, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    a[i][i] = (i == 0 || i + 1 == m ? 2.0 / 3.0 : 4.0 / 3.0) * h;
    if (i > 0) a[i][i - 1] = h / 3.0;
    if (i + 1 < m) a[i][i + 1] = h / 3.0;
    a[i][m] = f[i] * h;
  }
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    for (std::size_t r = col + 1; r < m; ++r) {
      const double factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= m; ++c) a[r][c] -= factor * a[col][c];
    }
  }
  std::vector<double> x(m, 0.0);
  for (std::size_t i = m; i-- > 0;) {
    double acc = a[i][m];
    for (std::size_t c = i + 1; c < m; ++c) acc -= a[i][c] * x[c];
    x[i] = acc / a[i][i];
  }
  return x;
}

// ---- multilinear interpolation residual, brute force ---------------------
//
// For a node of the (natural-order) level grid with at least one odd
// coordinate: average of the bracketing even-coordinate neighbors along every
// odd axis (single neighbor at an even-length axis end).
inline double interp_prediction(const std::vector<double>& grid, const std::vector<std::size_t>& dims,
                                const std::vector<std::size_t>& idx) {
  const int d = static_cast<int>(dims.size());
  std::vector<std::size_t> strides(static_cast<std::size_t>(d), 1);
  for (int i = d - 2; i >= 0; --i) strides[i] = strides[i + 1] * dims[i + 1];
  std::vector<std::vector<std::size_t>> choices;
  for (int i = 0; i < d; ++i) {
    if (idx[i] % 2 == 0) {
      choices.push_back({idx[i]});
    } else if (idx[i] + 1 < dims[i]) {
      choices.push_back({idx[i] - 1, idx[i] + 1});
    } else {
      choices.push_back({idx[i] - 1});
    }
  }
  double sum = 0.0;
  std::size_t count = 0;
  std::vector<std::size_t> pick(static_cast<std::size_t>(d), 0);
  for (;;) {
    std::size_t off = 0;
    for (int i = 0; i < d; ++i) off += choices[i][pick[i]] * strides[i];
    sum += grid[off];
    ++count;
    int ax = d - 1;
    while (ax >= 0) {
      if (++pick[ax] < choices[ax].size()) break;
      pick[ax] = 0;
      --ax;
    }
    if (ax < 0) break;
  }
  return sum / static_cast<double>(count);
}

// ---- Lorenzo prediction by explicit inclusion-exclusion -------------------
inline double lorenzo_prediction(const std::vector<double>& grid, const std::vector<std::size_t>& dims,
                                 const std::vector<std::size_t>& idx) {
  const int d = static_cast<int>(dims.size());
  std::vector<std::size_t> strides(static_cast<std::size_t>(d), 1);
  for (int i = d - 2; i >= 0; --i) strides[i] = strides[i + 1] * dims[i + 1];
  double pred = 0.0;
  for (unsigned s = 1; s < (1u << d); ++s) {
    int bits = 0;
    bool ok = true;
    std::size_t off = 0;
    for (int i = 0; i < d; ++i) {
      if (s >> i & 1u) {
        if (idx[i] == 0) {
          ok = false;
          break;
        }
        off += (idx[i] - 1) * strides[i];
        ++bits;
      } else {
        off += idx[i] * strides[i];
      }
    }
    if (!ok) continue;
    pred += (bits % 2 == 1 ? 1.0 : -1.0) * grid[off];
  }
  return pred;
}

// ---- random field helpers -------------------------------------------------
inline std::vector<double> random_values(std::size_t n, std::uint64_t seed, double lo = -1.0,
                                         double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

// Sum of up to `waves` random-frequency sinusoids over the index lattice.
inline std::vector<double> smooth_field(const std::vector<std::size_t>& dims, std::uint64_t seed,
                                        int waves = 5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(0.2, 1.0);
  std::uniform_real_distribution<double> freq(0.5, 3.0);
  std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
  const int d = static_cast<int>(dims.size());
  std::vector<std::vector<double>> ks(static_cast<std::size_t>(waves));
  std::vector<double> amps(static_cast<std::size_t>(waves));
  std::vector<double> phis(static_cast<std::size_t>(waves));
  for (int w = 0; w < waves; ++w) {
    amps[w] = amp(rng);
    phis[w] = phase(rng);
    ks[w].resize(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) ks[w][i] = freq(rng);
  }
  std::size_t total = 1;
  for (std::size_t n : dims) total *= n;
  std::vector<double> out(total);
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  for (std::size_t p = 0; p < total; ++p) {
    double v = 0.0;
    for (int w = 0; w < waves; ++w) {
      double arg = phis[w];
      for (int i = 0; i < d; ++i)
        arg += ks[w][i] * static_cast<double>(idx[i]) / static_cast<double>(dims[i] - 1) *
               6.283185307179586;
      v += amps[w] * std::sin(arg);
    }
    out[p] = v;
    for (int i = d - 1; i >= 0; --i) {
      if (++idx[i] < dims[i]) break;
      idx[i] = 0;
    }
  }
  return out;
}

} // namespace oracle

#endif
