#include <doctest.h>

#include <cmath>
#include <vector>

#include "genrank/validation.hpp"

using namespace genrank;

namespace {

DenseTensor normal_222(std::uint64_t seed) {
  SplitMix64 g(seed);
  DenseTensor t;
  t.dims = {2, 2, 2};
  t.values.resize(8);
  for (double &v : t.values)
    v = g.next_normal();
  return t;
}

DenseTensor from_slices(std::vector<double> a, std::vector<double> b) {
  // a and b are the two 2x2 slices along the last mode
  DenseTensor t;
  t.dims = {2, 2, 2};
  t.values = {a[0], b[0], a[1], b[1], a[2], b[2], a[3], b[3]};
  return t;
}

} // namespace

TEST_CASE("random members live in their structure subspace") {
  SplitMix64 g(2024);

  DenseTensor free = random_member(Free{{3, 4, 2}}, g);
  CHECK(free.dims == std::vector<std::int64_t>{3, 4, 2});
  CHECK(free.values.size() == 24);

  DenseTensor ss = random_member(SymmetricSlices{4, 3}, g);
  auto at = [&](const DenseTensor &t, std::int64_t x, std::int64_t y,
                std::int64_t z) {
    return t.values[static_cast<std::size_t>((x * 4 + y) * 3 + z)];
  };
  for (std::int64_t z = 0; z < 3; ++z)
    for (std::int64_t x = 0; x < 4; ++x)
      for (std::int64_t y = 0; y < 4; ++y)
        CHECK(at(ss, x, y, z) == at(ss, y, x, z));

  DenseTensor cs = random_member(CenteredSymmetricSlices{4, 3}, g);
  for (std::int64_t z = 0; z < 3; ++z)
    for (std::int64_t y = 0; y < 4; ++y) {
      double row_sum = 0.0, col_sum = 0.0;
      for (std::int64_t x = 0; x < 4; ++x) {
        row_sum += at(cs, x, y, z);
        col_sum += at(cs, y, x, z);
      }
      CHECK(std::abs(row_sum) < 1e-12);
      CHECK(std::abs(col_sum) < 1e-12);
    }

  DenseTensor sym = random_member(Symmetric{3, 3}, g);
  auto sat = [&](std::int64_t a, std::int64_t b, std::int64_t c) {
    return sym.values[static_cast<std::size_t>((a * 3 + b) * 3 + c)];
  };
  for (std::int64_t a = 0; a < 3; ++a)
    for (std::int64_t b = 0; b < 3; ++b)
      for (std::int64_t c = 0; c < 3; ++c) {
        CHECK(sat(a, b, c) == sat(b, a, c));
        CHECK(sat(a, b, c) == sat(a, c, b));
      }
}

TEST_CASE("pencil classifier on constructed examples") {
  // distinct real roots of det(A + x B)
  CHECK(classify_222(from_slices({1, 0, 0, 1}, {0, 1, 1, 0})) ==
        Rank222::RankTwo);
  // complex conjugate roots
  CHECK(classify_222(from_slices({1, 0, 0, 1}, {0, -1, 1, 0})) ==
        Rank222::RankThree);
  // repeated root
  CHECK(classify_222(from_slices({1, 0, 0, 1}, {1, 0, 0, 1})) ==
        Rank222::Boundary);
  // zero array
  CHECK(classify_222(from_slices({0, 0, 0, 0}, {0, 0, 0, 0})) ==
        Rank222::Boundary);
  // singular second slice sends one root to infinity
  CHECK(classify_222(from_slices({1, 0, 0, 1}, {0, 0, 0, 0})) ==
        Rank222::Boundary);

  DenseTensor bad;
  bad.dims = {2, 2};
  bad.values = {1, 0, 0, 1};
  CHECK_THROWS_AS(classify_222(bad), ValidationError);
}

TEST_CASE("classification is scale invariant") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    DenseTensor t = normal_222(seed);
    DenseTensor s = t;
    for (double &v : s.values)
      v *= 1e6;
    CHECK(classify_222(t) == classify_222(s));
  }
}

TEST_CASE("als recovers a rank-one tensor exactly") {
  SplitMix64 g(5);
  std::vector<double> u(3), v(4), w(2);
  for (auto *vec : {&u, &v, &w})
    for (double &x : *vec)
      x = g.next_normal();
  DenseTensor t;
  t.dims = {3, 4, 2};
  for (double x : u)
    for (double y : v)
      for (double z : w)
        t.values.push_back(x * y * z);

  AlsOptions opts;
  opts.restarts = 4;
  FitResult fit = als_fit(t, 1, opts);
  CHECK(fit.relative_residual < 1e-10);
  CHECK_FALSE(fit.degenerate);
  CHECK(fit.iterations_used >= 1);
}

TEST_CASE("als residual history is monotone") {
  DenseTensor t = normal_222(12);
  AlsOptions opts;
  opts.restarts = 3;
  FitResult fit = als_fit(t, 2, opts);
  REQUIRE(!fit.residual_history.empty());
  for (std::size_t i = 1; i < fit.residual_history.size(); ++i)
    CHECK(fit.residual_history[i] <=
          fit.residual_history[i - 1] + 1e-12);
  CHECK(fit.relative_residual ==
        fit.residual_history.back());
}

TEST_CASE("als input validation") {
  DenseTensor t = normal_222(1);
  CHECK_THROWS_AS(als_fit(t, 0), ValidationError);
  DenseTensor zero;
  zero.dims = {2, 2, 2};
  zero.values.assign(8, 0.0);
  CHECK_THROWS_AS(als_fit(zero, 1), ValidationError);
}

TEST_CASE("three terms always fit a 2x2x2 array") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    DenseTensor t = normal_222(seed);
    if (classify_222(t) == Rank222::Boundary)
      continue;
    FitResult fit = als_fit(t, 3);
    CHECK(fit.relative_residual < 1e-8);
  }
}

TEST_CASE("classifier and fitter agree on the rank split") {
  int checked2 = 0, checked3 = 0;
  for (std::uint64_t seed = 100; checked2 < 3 || checked3 < 3; ++seed) {
    DenseTensor t = normal_222(seed);
    Rank222 cls = classify_222(t);
    if (cls == Rank222::RankTwo && checked2 < 3) {
      FitResult fit = als_fit(t, 2);
      CHECK(fit.relative_residual < 1e-8);
      CHECK_FALSE(fit.degenerate);
      ++checked2;
    } else if (cls == Rank222::RankThree && checked3 < 3) {
      FitResult fit = als_fit(t, 2);
      CHECK((fit.degenerate || fit.relative_residual > 1e-4));
      ++checked3;
    }
  }
}

TEST_CASE("both generic 2x2x2 classes occur with visible frequency") {
  SplitMix64 g(31337);
  RankSplit split = rank_split_experiment(500, g);
  CHECK(split.rank2 + split.rank3 + split.boundary == doctest::Approx(1.0));
  CHECK(split.rank2 >= 0.05);
  CHECK(split.rank3 >= 0.05);
  CHECK(split.boundary < 0.05);
  CHECK_THROWS_AS(rank_split_experiment(0, g), ValidationError);
}
