#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mgrx/reference.hpp"
#include "mgrx/transform.hpp"
#include "oracles.hpp"

using mgrx::Dims;
using mgrx::GridHierarchy;
using mgrx::MultilevelCoefficients;
using mgrx::SolverWorkspace;
using mgrx::TensorField;

namespace {

double range_of(const std::vector<double>& v) {
  double lo = v[0], hi = v[0];
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return hi - lo;
}

// Reordered coordinate of an original index under the nodal-first partition.
std::size_t reordered_coord(std::size_t j, std::size_t n) {
  const std::size_t m = mgrx::nodal_count(n);
  return j % 2 == 0 ? j / 2 : m + j / 2;
}

} // namespace

TEST_CASE("load vector: stated examples") {
  std::vector<double> out3(3);
  mgrx::load_vector_1d(std::vector<double>{0, 0, 0, 0, 0}, out3);
  CHECK(out3 == std::vector<double>{0, 0, 0});

  mgrx::load_vector_1d(std::vector<double>{1, 1, 1, 1, 1}, out3);
  CHECK(out3[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(out3[1] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(out3[2] == doctest::Approx(1.0).epsilon(1e-15));

  // Pure 1D case: nodal entries zero.
  mgrx::load_vector_1d(std::vector<double>{0, 1, 0, 1, 0}, out3);
  CHECK(out3[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(out3[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(out3[2] == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(mgrx::load_vector_1d(std::vector<double>{1, 2}, out3), mgrx::Error);
}

TEST_CASE("load vector: even-length line uses available neighbors only") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> val(-3, 3);
  std::vector<double> c(6);
  for (auto& x : c) x = val(rng);
  std::vector<double> f(3);
  mgrx::load_vector_1d(c, f);
  CHECK(f[0] == doctest::Approx(5.0 / 12 * c[0] + 0.5 * c[1] + 1.0 / 12 * c[2]).epsilon(1e-15));
  CHECK(f[1] == doctest::Approx(1.0 / 12 * c[0] + 0.5 * c[1] + 5.0 / 6 * c[2] + 0.5 * c[3] +
                                1.0 / 12 * c[4])
                    .epsilon(1e-15));
  CHECK(f[2] == doctest::Approx(1.0 / 12 * c[2] + 0.5 * c[3] + 5.0 / 12 * c[4] + 0.5 * c[5])
                    .epsilon(1e-15));
}

TEST_CASE("load vector matches exact quadrature and the two-pass formulation") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> half(1, 32);
  std::uniform_real_distribution<double> val(-10, 10);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 * half(rng) + 1;
    std::vector<double> line(n);
    for (auto& x : line) x = val(rng);
    std::vector<double> got((n + 1) / 2);
    mgrx::load_vector_1d(line, got);
    const std::vector<double> quad = oracle::load_vector_quadrature(line);
    const std::vector<double> two_pass = oracle::load_vector_two_pass(line);
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i] == doctest::Approx(quad[i]).epsilon(1e-12));
      CHECK(got[i] == doctest::Approx(two_pass[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("mass/load consistency: M * restriction(const) equals load of the constant line") {
  for (std::size_t n : {3ul, 5ul, 9ul, 17ul, 33ul}) {
    const std::size_t m = (n + 1) / 2;
    std::vector<double> line(n, 3.25);
    std::vector<double> f(m);
    mgrx::load_vector_1d(line, f);
    for (std::size_t i = 0; i < m; ++i) {
      double row = (i == 0 || i + 1 == m) ? 2.0 / 3.0 : 4.0 / 3.0;
      if (i > 0) row += 1.0 / 3.0;
      if (i + 1 < m) row += 1.0 / 3.0;
      CHECK(f[i] == doctest::Approx(row * 3.25).epsilon(1e-14));
    }
  }
}

TEST_CASE("correction solve: constructed rhs, 2x2 row sums, dense oracle") {
  {
    // f = M * ones -> solution all ones.
    std::vector<double> ones(7, 1.0);
    std::vector<double> f(7);
    for (std::size_t i = 0; i < 7; ++i) {
      double row = (i == 0 || i == 6) ? 2.0 / 3.0 : 4.0 / 3.0;
      if (i > 0) row += 1.0 / 3.0;
      if (i < 6) row += 1.0 / 3.0;
      f[i] = row;
    }
    mgrx::solve_correction_1d(f);
    for (double z : f) CHECK(z == doctest::Approx(1.0).epsilon(1e-14));
  }
  {
    std::vector<double> f{1.0, 1.0};
    mgrx::solve_correction_1d(f);
    CHECK(f[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f[1] == doctest::Approx(1.0).epsilon(1e-14));
  }
  {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> val(-5, 5);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> f(9);
      for (auto& x : f) x = val(rng);
      std::vector<double> dense = oracle::dense_mass_solve(f);
      mgrx::solve_correction_1d(f);
      for (std::size_t i = 0; i < f.size(); ++i)
        CHECK(f[i] == doctest::Approx(dense[i]).epsilon(1e-10));
    }
  }
  std::vector<double> tiny{1.0};
  CHECK_THROWS_AS(mgrx::solve_correction_1d(tiny), mgrx::Error);
}

TEST_CASE("corrections do not depend on the assumed uniform spacing") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> val(-5, 5);
  std::vector<double> f(13);
  for (auto& x : f) x = val(rng);
  const std::vector<double> z1 = oracle::dense_mass_solve(f, 0.1);
  const std::vector<double> z2 = oracle::dense_mass_solve(f, 1.0);
  const std::vector<double> z3 = oracle::dense_mass_solve(f, 7.0);
  std::vector<double> ours = f;
  mgrx::solve_correction_1d(ours);
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(ours[i] == doctest::Approx(z1[i]).epsilon(1e-10));
    CHECK(ours[i] == doctest::Approx(z2[i]).epsilon(1e-10));
    CHECK(ours[i] == doctest::Approx(z3[i]).epsilon(1e-10));
  }
}

TEST_CASE("coefficient computation: constants and multilinear fields vanish") {
  // Odd axis lengths: every coefficient node has both bracketing neighbors,
  // so linear reproduction is exact. (The one-sided copy at the end of an
  // even axis keeps the ramp's slope as a residual by design.)
  for (const Dims& dims : {Dims{9, 9}, Dims{5, 5, 5}, Dims{17, 9, 5}}) {
    GridHierarchy h = GridHierarchy::create(dims);
    const int L = h.num_levels();
    TensorField<double> f(dims);
    std::vector<std::size_t> idx(dims.size(), 0);
    for (std::size_t p = 0; p < f.size(); ++p) {
      double v = 4.5;
      for (std::size_t i = 0; i < dims.size(); ++i)
        v += (1.5 + static_cast<double>(i)) * static_cast<double>(idx[i]);
      f.data[p] = v;
      for (int i = static_cast<int>(dims.size()) - 1; i >= 0; --i) {
        if (++idx[static_cast<std::size_t>(i)] < dims[static_cast<std::size_t>(i)]) break;
        idx[static_cast<std::size_t>(i)] = 0;
      }
    }
    SolverWorkspace ws;
    MultilevelCoefficients<double> mc = mgrx::decompose(f, h, 0, ws);
    const std::size_t coarse = h.node_count(0);
    for (std::size_t i = coarse; i < mc.buffer.size(); ++i)
      CHECK(std::fabs(mc.buffer[i]) <= 1e-9);
    (void)L;
  }
}

TEST_CASE("coefficient residuals match the brute-force neighbor averages") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> val(-2, 2);
  for (const Dims& dims : {Dims{5, 5, 5}, Dims{7, 4}, Dims{6, 5, 3}, Dims{9}}) {
    GridHierarchy h = GridHierarchy::create(dims);
    const int L = h.num_levels();
    TensorField<double> f(dims);
    for (auto& x : f.data) x = val(rng);
    const std::vector<double> original = f.data;

    mgrx::reorder_level(f, h, L);
    mgrx::compute_coefficients(f, h, L);

    const int d = static_cast<int>(dims.size());
    const auto strides = mgrx::row_major_strides(dims);
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    std::size_t total = f.size();
    for (std::size_t p = 0; p < total; ++p) {
      bool coeff_node = false;
      for (int i = 0; i < d; ++i) coeff_node = coeff_node || idx[static_cast<std::size_t>(i)] % 2 == 1;
      std::size_t rpos = 0;
      for (int i = 0; i < d; ++i)
        rpos += reordered_coord(idx[static_cast<std::size_t>(i)], dims[static_cast<std::size_t>(i)]) *
                strides[static_cast<std::size_t>(i)];
      if (coeff_node) {
        const double expect = original[p] - oracle::interp_prediction(original, dims, idx);
        CHECK(f.data[rpos] == doctest::Approx(expect).epsilon(1e-12));
      } else {
        CHECK(f.data[rpos] == original[p]);
      }
      for (int i = d - 1; i >= 0; --i) {
        if (++idx[static_cast<std::size_t>(i)] < dims[static_cast<std::size_t>(i)]) break;
        idx[static_cast<std::size_t>(i)] = 0;
      }
    }
    // add_interpolant undoes the residual computation (fp-exact: nodal values
    // are untouched, so predictions are identical on both passes).
    mgrx::add_interpolant(f, h, L);
    std::vector<std::size_t> idx2(static_cast<std::size_t>(d), 0);
    for (std::size_t p = 0; p < total; ++p) {
      std::size_t rpos = 0;
      for (int i = 0; i < d; ++i)
        rpos += reordered_coord(idx2[static_cast<std::size_t>(i)], dims[static_cast<std::size_t>(i)]) *
                strides[static_cast<std::size_t>(i)];
      CHECK(f.data[rpos] == doctest::Approx(original[p]).epsilon(1e-13));
      for (int i = d - 1; i >= 0; --i) {
        if (++idx2[static_cast<std::size_t>(i)] < dims[static_cast<std::size_t>(i)]) break;
        idx2[static_cast<std::size_t>(i)] = 0;
      }
    }
  }
}

TEST_CASE("1D correction equals the public load + solve kernels") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> val(-4, 4);
  for (std::size_t n : {9ul, 8ul, 17ul}) {
    GridHierarchy h = GridHierarchy::create({n});
    const int L = h.num_levels();
    TensorField<double> f({n});
    for (auto& x : f.data) x = val(rng);

    mgrx::reorder_level(f, h, L);
    mgrx::compute_coefficients(f, h, L);

    // Interleaved multilevel component: zeros at nodal slots.
    const std::size_t m = mgrx::nodal_count(n);
    std::vector<double> component(n, 0.0);
    for (std::size_t j = 1; j < n; j += 2) component[j] = f.data[m + j / 2];
    std::vector<double> expect(m);
    mgrx::load_vector_1d(component, expect);
    mgrx::solve_correction_1d(expect);

    SolverWorkspace ws;
    mgrx::Correction corr = mgrx::compute_correction(f, h, L, ws);
    REQUIRE(corr.extents == Dims{m});
    for (std::size_t i = 0; i < m; ++i) CHECK(corr.data[i] == expect[i]);
  }
}

TEST_CASE("correction of an all-zero field is zero; apply is an exact inverse pair") {
  GridHierarchy h = GridHierarchy::create({9, 9});
  const int L = h.num_levels();
  TensorField<double> f({9, 9});
  SolverWorkspace ws;
  mgrx::reorder_level(f, h, L);
  mgrx::compute_coefficients(f, h, L);
  mgrx::Correction corr = mgrx::compute_correction(f, h, L, ws);
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 5; ++c) CHECK(corr.data[r * corr.strides[0] + c] == 0.0);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> val(-4, 4);
  TensorField<double> g({9, 9});
  for (auto& x : g.data) x = val(rng);
  TensorField<double> before = g;
  mgrx::reorder_level(g, h, L);
  mgrx::compute_coefficients(g, h, L);
  mgrx::Correction corr2 = mgrx::compute_correction(g, h, L, ws);
  std::vector<double> snapshot = g.data;
  mgrx::apply_correction(g, corr2, +1);

  // Scalar oracle for the addition.
  const auto strides = mgrx::row_major_strides(g.dims);
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 5; ++c) {
      const double want = snapshot[r * strides[0] + c] + corr2.data[r * corr2.strides[0] + c];
      CHECK(g.data[r * strides[0] + c] == want);
    }

  mgrx::apply_correction(g, corr2, -1);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(g.data[i] == doctest::Approx(snapshot[i]).epsilon(1e-15));
  (void)before;
}

TEST_CASE("batched corrections are bitwise equal to unbatched") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> val(-6, 6);
  for (const Dims& dims : {Dims{9, 9}, Dims{17, 9, 5}, Dims{33, 17}, Dims{5, 5, 5, 5}}) {
    GridHierarchy h = GridHierarchy::create(dims);
    const int L = h.num_levels();
    TensorField<double> f(dims);
    for (auto& x : f.data) x = val(rng);
    mgrx::reorder_level(f, h, L);
    mgrx::compute_coefficients(f, h, L);

    SolverWorkspace ws1(1), ws32(32);
    mgrx::Correction c1 = mgrx::compute_correction(f, h, L, ws1);
    mgrx::Correction c32 = mgrx::compute_correction(f, h, L, ws32);
    const std::size_t count = mgrx::element_count(h.level_dims(L));
    for (std::size_t i = 0; i < count; ++i) CHECK(ws1.correction[i] == ws32.correction[i]);
    (void)c1;
    (void)c32;
  }
}

TEST_CASE("decompose with stop_level == L is the identity") {
  GridHierarchy h = GridHierarchy::create({9, 9});
  const int L = h.num_levels();
  TensorField<double> f({9, 9});
  std::mt19937_64 rng(8);
  for (auto& x : f.data) x = static_cast<double>(rng() % 1000);
  SolverWorkspace ws;
  MultilevelCoefficients<double> mc = mgrx::decompose(f, h, L, ws);
  CHECK(mc.stop_level == L);
  CHECK(mc.buffer == f.data);
  TensorField<double> back = mgrx::recompose(mc, ws);
  CHECK(back.data == f.data);
}

TEST_CASE("multilinear input: coarse block is the plane restriction") {
  GridHierarchy h = GridHierarchy::create({9, 9});
  TensorField<double> f({9, 9});
  for (std::size_t r = 0; r < 9; ++r)
    for (std::size_t c = 0; c < 9; ++c)
      f.data[r * 9 + c] = 2.0 + 0.5 * static_cast<double>(r) - 1.25 * static_cast<double>(c);
  SolverWorkspace ws;
  MultilevelCoefficients<double> mc = mgrx::decompose(f, h, 0, ws);
  // Coarse grid: stride-8 nodes of the original plane, 2x2.
  const double expect[4] = {f.data[0], f.data[8], f.data[8 * 9], f.data[8 * 9 + 8]};
  for (int i = 0; i < 4; ++i) CHECK(mc.buffer[i] == doctest::Approx(expect[i]).epsilon(1e-12));
  for (std::size_t i = 4; i < mc.buffer.size(); ++i) CHECK(std::fabs(mc.buffer[i]) <= 1e-9);
}

TEST_CASE("recompose of all-zero coefficients with a constant coarse block is constant") {
  GridHierarchy h = GridHierarchy::create({17, 17});
  MultilevelCoefficients<double> mc{std::vector<double>(h.total_count(), 0.0), h, 0};
  for (std::size_t i = 0; i < h.node_count(0); ++i) mc.buffer[i] = 7.5;
  SolverWorkspace ws;
  TensorField<double> f = mgrx::recompose(mc, ws);
  for (double v : f.data) CHECK(v == doctest::Approx(7.5).epsilon(1e-13));
}

TEST_CASE("roundtrip: recompose(decompose(x)) within 1e-9 of range") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> val(-100, 100);
  const std::vector<Dims> shapes = {{17, 17, 17}, {9, 33, 17},        {5, 5, 5, 5}, {33, 33},
                                    {65},         {12, 20},           {6, 6, 6},    {31, 14, 9},
                                    {2, 2},       {100, 11}};
  for (const Dims& dims : shapes) {
    GridHierarchy h = GridHierarchy::create(dims);
    TensorField<double> f(dims);
    for (auto& x : f.data) x = val(rng);
    SolverWorkspace ws;
    for (int stop : {0, std::min(1, h.num_levels())}) {
      MultilevelCoefficients<double> mc = mgrx::decompose(f, h, stop, ws);
      TensorField<double> back = mgrx::recompose(mc, ws);
      REQUIRE(back.dims == dims);
      double err = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i)
        err = std::max(err, std::fabs(back.data[i] - f.data[i]));
      CHECK(err <= 1e-9 * std::max(1.0, range_of(f.data)));
    }
  }
}

TEST_CASE("float fields roundtrip with float-scale error") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<float> val(-10, 10);
  TensorField<float> f({17, 17, 9});
  for (auto& x : f.data) x = val(rng);
  GridHierarchy h = GridHierarchy::create(f.dims);
  SolverWorkspace ws;
  MultilevelCoefficients<float> mc = mgrx::decompose(f, h, 0, ws);
  TensorField<float> back = mgrx::recompose(mc, ws);
  double err = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    err = std::max(err, std::fabs(static_cast<double>(back.data[i]) - f.data[i]));
  CHECK(err <= 2e-5 * 20.0);
}

TEST_CASE("optimized decomposition equals the strided reference bitwise") {
  std::mt19937_64 rng(555);
  std::uniform_real_distribution<double> val(-8, 8);
  for (const Dims& dims : {Dims{17, 17}, Dims{9, 9, 9}, Dims{33, 5}, Dims{6, 9, 4}}) {
    GridHierarchy h = GridHierarchy::create(dims);
    TensorField<double> f(dims);
    for (auto& x : f.data) x = val(rng);
    SolverWorkspace ws;
    MultilevelCoefficients<double> fast = mgrx::decompose(f, h, 0, ws);
    MultilevelCoefficients<double> slow = mgrx::reference_decompose(f, h, 0);
    REQUIRE(fast.buffer.size() == slow.buffer.size());
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < fast.buffer.size(); ++i)
      if (fast.buffer[i] != slow.buffer[i]) ++mismatches;
    CHECK(mismatches == 0);
  }
}
