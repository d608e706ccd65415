#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "vsaxmc/error.hpp"
#include "vsaxmc/hrr.hpp"

using namespace vsaxmc;
using hrr::RealHrrVector;

namespace {

std::vector<double> to_vec(const RealHrrVector& v) { return {v.components().begin(), v.components().end()}; }

double max_abs_diff(const RealHrrVector& a, const RealHrrVector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

RealHrrVector projected(std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  return hrr::project(hrr::sample_gaussian(d, rng));
}

}  // namespace

TEST_CASE("sample_gaussian is deterministic and has variance 1/d") {
  Rng r1(7), r2(7);
  CHECK(hrr::sample_gaussian(4, r1) == hrr::sample_gaussian(4, r2));

  Rng rng(11);
  const auto v = hrr::sample_gaussian(10000, rng);
  double mean = 0.0;
  for (double c : v.components()) mean += c;
  mean /= 10000.0;
  double var = 0.0;
  for (double c : v.components()) var += (c - mean) * (c - mean);
  var /= 9999.0;
  CHECK(std::abs(mean) < 0.05);
  CHECK(var == doctest::Approx(1e-4).epsilon(0.2));

  CHECK_THROWS_AS(hrr::sample_gaussian(0, rng), DimensionError);
  CHECK(hrr::sample_gaussian(1, rng).dim() == 1);
}

TEST_CASE("vector construction rejects empty and non-finite input") {
  CHECK_THROWS_AS(RealHrrVector(std::vector<double>{}), DimensionError);
  CHECK_THROWS_AS(RealHrrVector({1.0, NAN}), InvalidArgument);
  CHECK_THROWS_AS(RealHrrVector({INFINITY}), InvalidArgument);
}

TEST_CASE("dft matches the naive transform and idft round-trips") {
  Rng rng(3);
  for (std::size_t d = 1; d <= 64; ++d) {
    const auto x = hrr::sample_gaussian(d, rng);
    const auto spec = hrr::dft(x);
    const auto ref = oracle::naive_dft(to_vec(x));
    for (std::size_t j = 0; j < d; ++j) CHECK(std::abs(spec[j] - ref[j]) < 1e-9);
    const auto back = hrr::idft(spec);
    CHECK(max_abs_diff(back, x) <= 1e-9 * std::max(1.0, x.norm()));
  }
}

TEST_CASE("project yields unit spectrum and unit norm") {
  const auto x = projected(8, 3);
  CHECK(x.norm() == doctest::Approx(1.0).epsilon(1e-6));

  const auto y = projected(512, 5);
  const auto spectrum = hrr::dft(y);
  for (const auto& b : spectrum.bins()) CHECK(std::abs(b) == doctest::Approx(1.0).epsilon(1e-9));

  // idempotence
  CHECK(max_abs_diff(hrr::project(y), y) < 1e-9);
  CHECK(max_abs_diff(hrr::project(RealHrrVector::delta(16)), RealHrrVector::delta(16)) < 1e-9);
}

TEST_CASE("project preserves spectral phases") {
  Rng rng(21);
  const auto x = hrr::sample_gaussian(33, rng);
  const auto before = hrr::dft(x);
  const auto after = hrr::dft(hrr::project(x));
  for (std::size_t j = 0; j < before.size(); ++j) {
    if (std::abs(before[j]) < 1e-12) continue;
    const double diff = std::remainder(std::arg(after[j]) - std::arg(before[j]), 2.0 * M_PI);
    CHECK(std::abs(diff) < 1e-9);
  }
}

TEST_CASE("project replaces a zero bin by 1+0i") {
  // [1, 1, 1, 1] has spectrum [4, 0, 0, 0]; every zero bin becomes 1, so the
  // projection is the delta vector.
  const auto p = hrr::project(RealHrrVector({1.0, 1.0, 1.0, 1.0}));
  CHECK(max_abs_diff(p, RealHrrVector::delta(4)) < 1e-12);
  const auto z = hrr::project(RealHrrVector::zero(4));
  CHECK(max_abs_diff(z, RealHrrVector::delta(4)) < 1e-12);
}

TEST_CASE("bind matches the direct circular convolution") {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(trial % 64);
    const auto a = hrr::sample_gaussian(d, rng);
    const auto b = hrr::sample_gaussian(d, rng);
    const auto got = hrr::bind(a, b);
    const auto ref = oracle::circular_convolution(to_vec(a), to_vec(b));
    for (std::size_t i = 0; i < d; ++i) CHECK(std::abs(got[i] - ref[i]) < 1e-9);
  }
}

TEST_CASE("bind identities and shift example") {
  const auto a = projected(16, 1);
  const auto b = projected(16, 2);
  CHECK(max_abs_diff(hrr::bind(a, RealHrrVector::delta(16)), a) < 1e-9);
  CHECK(max_abs_diff(hrr::bind(a, b), hrr::bind(b, a)) < 1e-9);

  const auto shifted = hrr::bind(RealHrrVector({0, 1, 0, 0}), RealHrrVector({0, 1, 0, 0}));
  CHECK(max_abs_diff(shifted, RealHrrVector({0, 0, 1, 0})) < 1e-9);

  // distributes over superposition
  const auto c = projected(16, 3);
  CHECK(max_abs_diff(hrr::bind(a, hrr::superpose(b, c)), hrr::superpose(hrr::bind(a, b), hrr::bind(a, c))) < 1e-9);

  CHECK_THROWS_AS(hrr::bind(a, projected(8, 1)), DimensionError);
}

TEST_CASE("invert on projected vectors is exact unbinding") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = projected(64, seed);
    const auto b = projected(64, seed + 1000);
    const auto inv = hrr::invert(a);
    CHECK(max_abs_diff(hrr::bind(a, inv), RealHrrVector::delta(64)) < 1e-6);
    CHECK(max_abs_diff(hrr::bind(hrr::bind(a, b), inv), b) < 1e-6);
    CHECK(hrr::similarity(hrr::unbind(hrr::bind(a, b), a), b) >= 1.0 - 1e-6);

    // equals the spectral conjugate
    const auto fa = hrr::dft(a);
    const auto fi = hrr::dft(inv);
    for (std::size_t j = 0; j < 64; ++j) CHECK(std::abs(fi[j] - std::conj(fa[j])) < 1e-9);
  }
  CHECK(max_abs_diff(hrr::invert(RealHrrVector::delta(8)), RealHrrVector::delta(8)) < 1e-12);
}

TEST_CASE("invert reports the singular bin") {
  // Spectrum of [1, 1, 0, 0] is [2, 1-i, 0, 1+i]; bin 2 vanishes.
  try {
    hrr::invert(RealHrrVector({1.0, 1.0, 0.0, 0.0}));
    FAIL("expected SingularSpectrumError");
  } catch (const SingularSpectrumError& e) {
    CHECK(e.bin() == 2);
  }
}

TEST_CASE("unbinding with an unprojected cue is noisy but close") {
  double total = 0.0, worst = 1.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const auto a = hrr::sample_gaussian(256, rng);
    const auto b = hrr::sample_gaussian(256, rng);
    const double sim = hrr::similarity(hrr::bind(hrr::bind(a, b), hrr::invert(a)), b);
    total += sim;
    worst = std::min(worst, sim);
  }
  const double mean = total / 100.0;
  MESSAGE("mean recovery similarity over 100 seeds: " << mean << " (worst " << worst << ")");
  CHECK(mean > 0.9);
  CHECK(worst > 0.9);
}

TEST_CASE("similarity and dot") {
  const auto a = projected(32, 4);
  CHECK(hrr::similarity(a, a) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(hrr::similarity(a, hrr::scale(a, -1.0)) == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK_THROWS_AS(hrr::similarity(a, RealHrrVector::zero(32)), InvalidArgument);
  CHECK_THROWS_AS(hrr::dot(a, RealHrrVector::zero(31)), DimensionError);

  int small = 0;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    if (std::abs(hrr::similarity(projected(1024, 2 * t), projected(1024, 2 * t + 1))) < 0.15) ++small;
  }
  CHECK(small >= 990);
}

TEST_CASE("superpose is addition") {
  const auto a = projected(8, 1), b = projected(8, 2), c = projected(8, 3);
  CHECK(hrr::superpose(a, RealHrrVector::zero(8)) == a);
  CHECK(hrr::superpose(a, b) == hrr::superpose(b, a));
  CHECK(max_abs_diff(hrr::superpose(hrr::superpose(a, b), c), hrr::superpose(a, hrr::superpose(b, c))) < 1e-15);
  CHECK(hrr::dot(hrr::superpose(a, b), c) == doctest::Approx(hrr::dot(a, c) + hrr::dot(b, c)).epsilon(1e-9));
  const std::vector<RealHrrVector> abc{a, b, c};
  CHECK(max_abs_diff(hrr::superpose_many(abc), hrr::superpose(hrr::superpose(a, b), c)) == 0.0);
  CHECK_THROWS_AS(hrr::superpose(a, projected(4, 1)), DimensionError);
}

TEST_CASE("superposition of projected vectors leaves the unit spectrum") {
  const auto sum = hrr::superpose(projected(8, 1), projected(8, 2));
  double worst = 0.0;
  const auto spectrum = hrr::dft(sum);
  for (const auto& b : spectrum.bins()) worst = std::max(worst, std::abs(std::abs(b) - 1.0));
  CHECK(worst > 0.1);
}
