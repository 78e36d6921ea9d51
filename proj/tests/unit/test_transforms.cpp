#include <doctest.h>

#include <cmath>

#include "cacti/transforms.hpp"
#include "oracles.hpp"

using namespace cacti;

namespace {

double orthonormality_error(const Eigen::MatrixXd& q) {
  return (q.transpose() * q - Eigen::MatrixXd::Identity(q.rows(), q.cols())).cwiseAbs().maxCoeff();
}

const std::array<std::array<AxisKind, 3>, 4> kSpecs{{
    {AxisKind::dct, AxisKind::dct, AxisKind::dct},
    {AxisKind::haar, AxisKind::haar, AxisKind::dct},
    {AxisKind::identity, AxisKind::dct, AxisKind::haar},
    {AxisKind::haar, AxisKind::identity, AxisKind::identity},
}};

}  // namespace

TEST_SUITE("transforms") {
  TEST_CASE("axis kinds parse") {
    CHECK(parse_axis_kind("dct") == AxisKind::dct);
    CHECK(parse_axis_kind("haar") == AxisKind::haar);
    CHECK(parse_axis_kind("wavelet") == AxisKind::haar);
    CHECK(parse_axis_kind("identity") == AxisKind::identity);
    CHECK_THROWS_AS(parse_axis_kind("fft"), Error);
  }

  TEST_CASE("identity factor") {
    CHECK(build_axis_transform(AxisKind::identity, 5).isIdentity(0.0));
  }

  TEST_CASE("dct at n = 2 is the closed form") {
    const Eigen::MatrixXd q = build_axis_transform(AxisKind::dct, 2);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(q(0, 0) == doctest::Approx(s));
    CHECK(q(0, 1) == doctest::Approx(s));
    CHECK(q(1, 0) == doctest::Approx(s));
    CHECK(q(1, 1) == doctest::Approx(-s));
  }

  TEST_CASE("factors match textbook constructions") {
    for (std::size_t n : {1, 2, 3, 4, 7, 8, 16, 64}) {
      CHECK((build_axis_transform(AxisKind::dct, n) - oracle::dct_matrix(n)).cwiseAbs().maxCoeff() <= 1e-12);
    }
    for (std::size_t n : {1, 2, 4, 8, 16, 64}) {
      const Eigen::MatrixXd q = build_axis_transform(AxisKind::haar, n);
      CHECK((q - oracle::haar_matrix(n)).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(orthonormality_error(q) <= 1e-10);
    }
  }

  TEST_CASE("haar rejects non-power-of-two sizes") {
    CHECK_THROWS_AS(build_axis_transform(AxisKind::haar, 6), Error);
    CHECK_THROWS_AS(build_axis_transform(AxisKind::dct, 0), Error);
  }

  TEST_CASE("scale levels") {
    CHECK(axis_level(AxisKind::haar, 0) == 0);
    CHECK(axis_level(AxisKind::haar, 1) == 1);
    CHECK(axis_level(AxisKind::haar, 2) == 2);
    CHECK(axis_level(AxisKind::haar, 3) == 2);
    CHECK(axis_level(AxisKind::dct, 8) == 4);
    CHECK(axis_level(AxisKind::identity, 9) == 0);
  }

  TEST_CASE("identity transform is a no-op both ways") {
    oracle::Gen gen(1);
    const Cube f = gen.cube(3, 5, 2);
    const TransformSpec id({AxisKind::identity, AxisKind::identity, AxisKind::identity}, 3, 5, 2);
    CHECK(apply(id, f) == f);
    CHECK(apply_inverse(id, f) == f);
  }

  TEST_CASE("apply equals the Kronecker product of the factors") {
    oracle::Gen gen(2);
    const Cube f = gen.cube(4, 2, 4);
    const TransformSpec spec({AxisKind::haar, AxisKind::dct, AxisKind::dct}, 4, 2, 4);
    // Vector index is k * rows * cols + i * cols + j, so Q = Q3 (x) Q1 (x) Q2.
    const Eigen::MatrixXd q1 = oracle::haar_matrix(4), q2 = oracle::dct_matrix(2), q3 = oracle::dct_matrix(4);
    Eigen::MatrixXd q(32, 32);
    for (int a = 0; a < 32; ++a)
      for (int b = 0; b < 32; ++b)
        q(a, b) = q3(a / 8, b / 8) * q1((a / 2) % 4, (b / 2) % 4) * q2(a % 2, b % 2);
    const Eigen::VectorXd expect = q * oracle::vec(f);
    const Cube w = apply(spec, f);
    for (int n = 0; n < 32; ++n) CHECK(std::abs(w.values()[n] - expect(n)) <= 1e-12);
  }

  TEST_CASE("constant cube puts all energy in the DC coefficient") {
    const Cube f(8, 4, 6, 0.7);
    const Cube w = apply(TransformSpec::moving(8, 4, 6), f);
    CHECK(w(0, 0, 0) == doctest::Approx(0.7 * std::sqrt(192.0)));
    double rest = 0.0;
    for (std::size_t n = 1; n < w.size(); ++n) rest = std::max(rest, std::abs(w.values()[n]));
    CHECK(rest <= 1e-12);
  }

  TEST_CASE("round trip, isometry and zero input on random cubes") {
    oracle::Gen gen(3);
    for (const auto& kinds : kSpecs) {
      for (int trial = 0; trial < 5; ++trial) {
        const Cube f = gen.cube(16, 16, 8);
        const TransformSpec spec(kinds, 16, 16, 8);
        const Cube w = apply(spec, f);
        CHECK(std::abs(norm2(w) - norm2(f)) <= 1e-10 * norm2(f));
        CHECK(max_abs_diff(apply_inverse(spec, w), f) <= 1e-10);
      }
      const TransformSpec spec(kinds, 4, 4, 2);
      const Cube zero = apply_inverse(spec, Cube(4, 4, 2));
      for (double v : zero.values()) CHECK(v == 0.0);
    }
  }

  TEST_CASE("axis passes commute") {
    oracle::Gen gen(4);
    const Cube f = gen.cube(8, 4, 8);
    const TransformSpec spec({AxisKind::haar, AxisKind::dct, AxisKind::haar}, 8, 4, 8);
    const Cube ref = apply(spec, f);
    const std::array<std::array<Axis, 3>, 3> orders{{
        {Axis::rows, Axis::cols, Axis::frames},
        {Axis::frames, Axis::rows, Axis::cols},
        {Axis::cols, Axis::frames, Axis::rows},
    }};
    for (const auto& order : orders) {
      Cube w = f;
      for (Axis a : order) w = apply_axis(spec, w, a);
      CHECK(max_abs_diff(w, ref) <= 1e-12);
    }
  }

  TEST_CASE("transform size mismatch is rejected") {
    const TransformSpec spec = TransformSpec::moving(4, 4, 2);
    CHECK_THROWS_AS(apply(spec, Cube(4, 4, 3)), Error);
    CHECK(TransformSpec::mostly_static(4, 4, 2).kinds()[0] == AxisKind::haar);
    CHECK(TransformSpec::mostly_static(4, 4, 2).kinds()[2] == AxisKind::dct);
  }
}
