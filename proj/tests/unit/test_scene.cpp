#include <doctest.h>

#include <cmath>

#include "cacti/scene.hpp"

using namespace cacti;

namespace {

std::pair<double, double> centroid(const Cube& c, std::size_t k) {
  double m = 0, r = 0, col = 0;
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) {
      m += c(i, j, k);
      r += c(i, j, k) * i;
      col += c(i, j, k) * j;
    }
  return {r / m, col / m};
}

}  // namespace

TEST_SUITE("scene") {
  TEST_CASE("scene kinds parse") {
    CHECK(parse_scene_kind("rotating_spokes") == SceneKind::rotating_spokes);
    CHECK(std::string(to_string(SceneKind::static_target)) == "static_target");
    CHECK_THROWS_AS(parse_scene_kind("car"), Error);
  }

  TEST_CASE("static square has identical frames") {
    SceneSpec s;
    s.velocity_col = 0;
    const Cube c = generate_scene(s).cube;
    for (std::size_t k = 1; k < c.frames(); ++k)
      for (std::size_t p = 0; p < c.pixels(); ++p) CHECK(c.frame(k)[p] == c.frame(0)[p]);
  }

  TEST_CASE("square advances exactly one pixel per frame") {
    SceneSpec s;
    const auto out = generate_scene(s);
    CHECK(out.warnings.empty());
    for (std::size_t k = 1; k < 14; ++k) {
      const auto a = centroid(out.cube, k - 1), b = centroid(out.cube, k);
      CHECK(b.second - a.second == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(b.first - a.first == doctest::Approx(0.0));
    }
  }

  TEST_CASE("sub-pixel motion keeps total intensity") {
    SceneSpec s;
    s.velocity_col = 0.4;
    const Cube c = generate_scene(s).cube;
    double first = 0;
    for (double v : c.frame(0)) first += v;
    for (std::size_t k = 1; k < c.frames(); ++k) {
      double sum = 0;
      for (double v : c.frame(k)) sum += v;
      CHECK(sum == doctest::Approx(first));
    }
  }

  TEST_CASE("objects leaving the frame are clipped with a warning") {
    SceneSpec s;
    s.start_col = 50;
    s.velocity_col = 3;
    CHECK_FALSE(generate_scene(s).warnings.empty());
  }

  TEST_CASE("spokes frames are rotations of frame 0") {
    SceneSpec s;
    s.kind = SceneKind::rotating_spokes;
    s.frames = 8;
    const Cube c = generate_scene(s).cube;
    const std::vector<std::size_t> zero{0};
    const Cube f0 = c.frames_slice(zero);
    for (std::size_t k = 0; k < 8; ++k) {
      const Cube rot = rotate_nearest(f0, s.angular_step * k);
      for (std::size_t p = 0; p < rot.size(); ++p) CHECK(c.frame(k)[p] == rot.values()[p]);
    }
  }

  TEST_CASE("rotating by zero is the identity") {
    Cube f(5, 7, 1);
    for (std::size_t p = 0; p < f.size(); ++p) f.values()[p] = static_cast<double>(p);
    CHECK(rotate_nearest(f, 0.0) == f);
  }

  TEST_CASE("all kinds are seeded, deterministic and in [0, 1]") {
    for (auto kind : {SceneKind::moving_square, SceneKind::rotating_spokes, SceneKind::two_blobs,
                      SceneKind::static_target}) {
      SceneSpec s;
      s.kind = kind;
      s.texture = 0.3;
      s.seed = 4;
      const Cube a = generate_scene(s).cube;
      CHECK(a == generate_scene(s).cube);
      for (double v : a.values()) CHECK((v >= 0.0 && v <= 1.0));
      s.seed = 5;
      CHECK_FALSE(a == generate_scene(s).cube);
    }
  }

  TEST_CASE("invalid geometry is rejected") {
    SceneSpec s;
    s.rows = 0;
    CHECK_THROWS_AS(generate_scene(s), Error);
    s.rows = 8;
    s.intensity = -1;
    CHECK_THROWS_AS(generate_scene(s), Error);
  }
}
