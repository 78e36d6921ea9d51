#include <doctest.h>

#include <cmath>
#include <vector>

#include "cacti/core.hpp"
#include "oracles.hpp"

using namespace cacti;

TEST_SUITE("core") {
  TEST_CASE("cube storage is frame-major then row-major") {
    Cube c(2, 3, 2);
    c(1, 2, 1) = 7.0;
    CHECK(c.values()[1 * 6 + 1 * 3 + 2] == 7.0);
    CHECK(c.frame(1)[5] == 7.0);
    CHECK(c.pixels() == 6);
    CHECK(c.size() == 12);
  }

  TEST_CASE("cube rejects zero dimensions") {
    CHECK_THROWS_AS(Cube(0, 1, 1), Error);
    CHECK_THROWS_AS(Cube(1, 0, 1), Error);
    CHECK_THROWS_AS(Cube(1, 1, 0), Error);
  }

  TEST_CASE("frames_slice keeps the listed frames in order") {
    Cube c(1, 2, 3);
    for (std::size_t k = 0; k < 3; ++k) c(0, 0, k) = static_cast<double>(k);
    const std::vector<std::size_t> pick{2, 0};
    const Cube s = c.frames_slice(pick);
    CHECK(s.frames() == 2);
    CHECK(s(0, 0, 0) == 2.0);
    CHECK(s(0, 0, 1) == 0.0);
    const std::vector<std::size_t> bad{3};
    CHECK_THROWS_AS(c.frames_slice(bad), Error);
  }

  TEST_CASE("finite and max helpers") {
    Cube c(2, 2, 1, -3.0);
    CHECK(c.all_finite());
    CHECK(c.max_value() == -3.0);
    c(0, 1) = std::nan("");
    CHECK_FALSE(c.all_finite());
  }

  TEST_CASE("dot, norm and diff") {
    Cube a(1, 2, 1), b(1, 2, 1);
    a(0, 0) = 3.0;
    a(0, 1) = 4.0;
    b(0, 0) = 1.0;
    b(0, 1) = -1.0;
    CHECK(dot(a, b) == doctest::Approx(-1.0));
    CHECK(norm2(a) == doctest::Approx(5.0));
    CHECK(max_abs_diff(a, b) == doctest::Approx(5.0));
    CHECK_THROWS_AS(dot(a, Cube(2, 1, 1)), Error);
  }

  TEST_CASE("rng is reproducible and uniform lies in [0, 1)") {
    Rng a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
      const double x = a.uniform();
      CHECK(x == b.uniform());
      CHECK(x >= 0.0);
      CHECK(x < 1.0);
      if (x != c.uniform()) differs = true;
    }
    CHECK(differs);
  }

  TEST_CASE("rng stream is pinned to mt19937_64 top 53 bits") {
    std::mt19937_64 ref(2024);
    Rng r(2024);
    for (int i = 0; i < 10; ++i) CHECK(r.uniform() == static_cast<double>(ref() >> 11) / 9007199254740992.0);
  }

  TEST_CASE("normal draws have unit moments") {
    Rng r(5);
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = r.normal();
      s += x;
      s2 += x * x;
    }
    // Standard errors are 1/sqrt(n) and sqrt(2/n); allow five of each.
    CHECK(std::abs(s / n) < 5.0 / std::sqrt(n));
    CHECK(std::abs(s2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
  }

  TEST_CASE("derive_seed matches splitmix64 and separates streams") {
    // splitmix64 of seed + (stream + 1) * golden gamma, written out longhand.
    auto splitmix = [](std::uint64_t z) {
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      return z ^ (z >> 31);
    };
    const std::uint64_t gamma = 0x9e3779b97f4a7c15ULL;
    CHECK(derive_seed(7, 0) == splitmix(7 + gamma));
    CHECK(derive_seed(7, 3) == splitmix(7 + 4 * gamma));
    CHECK(derive_seed(7, 0) != derive_seed(7, 1));
    CHECK(derive_seed(7, 0) != derive_seed(8, 0));
  }

  TEST_CASE("error codes have names") {
    CHECK(std::string(to_string(ErrorCode::format_truncated)) == "format_truncated");
    try {
      fail(ErrorCode::io, "boom");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::io);
      CHECK(std::string(e.what()) == "boom");
    }
  }
}
