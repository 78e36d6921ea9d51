#include <doctest.h>

#include <cmath>

#include "cacti/analysis.hpp"
#include "oracles.hpp"

using namespace cacti;

TEST_SUITE("analysis") {
  TEST_CASE("psnr formula, cap and invariances") {
    Cube ref(10, 10, 1, 0.5), est(10, 10, 1, 0.5);
    const auto same = psnr(ref, est, 1.0);
    CHECK(same.db[0] == kPsnrCap);
    CHECK(same.identical[0]);

    for (double& v : est.values()) v += 0.1;  // MSE = 0.01
    CHECK(psnr(ref, est, 1.0).db[0] == doctest::Approx(20.0));
    CHECK_FALSE(psnr(ref, est, 1.0).identical[0]);

    Cube ref2 = ref, est2 = est;
    for (double& v : ref2.values()) v *= 2;
    for (double& v : est2.values()) v *= 2;
    CHECK(psnr(ref2, est2, 2.0).db[0] == doctest::Approx(20.0));
    CHECK(psnr(est, ref, 1.0).db[0] == doctest::Approx(psnr(ref, est, 1.0).db[0]));

    CHECK_THROWS_AS(psnr(ref, Cube(10, 10, 2), 1.0), Error);
    CHECK_THROWS_AS(psnr(ref, est, 0.0), Error);
  }

  TEST_CASE("psnr default peak is the reference maximum") {
    Cube ref(4, 4, 2, 0.25), est(4, 4, 2, 0.25);
    ref(0, 0, 0) = 0.5;
    est(1, 1, 1) = 0.35;
    CHECK(psnr(ref, est).db[1] == doctest::Approx(psnr(ref, est, 0.5).db[1]));
  }

  TEST_CASE("sum_frames examples") {
    oracle::Gen gen(1);
    const Cube one = gen.cube(3, 3, 1);
    CHECK(sum_frames(one) == one);
    const Snapshot threes = sum_frames(Cube(4, 4, 3, 1.0));
    for (double v : threes.values()) CHECK(v == 3.0);
    const Cube f = gen.cube(5, 4, 6);
    const ForwardOperator ones(Cube(5, 4, 6, 1.0));
    CHECK(max_abs_diff(sum_frames(f), forward(ones, f)) <= 1e-14);
  }

  TEST_CASE("baseline replicate") {
    oracle::Gen gen(2);
    const Cube g = gen.cube(4, 5, 1, 0, 3);
    CHECK(baseline_replicate(g, 1) == g);
    CHECK(max_abs_diff(sum_frames(baseline_replicate(g, 7)), g) <= 1e-14);
    CHECK_THROWS_AS(baseline_replicate(Cube(2, 2, 2), 3), Error);
  }

  TEST_CASE("static scene: baseline through an all-open aperture is exact") {
    // With T = 1 everywhere a static scene is recovered exactly by the
    // motion-blind baseline, so no reconstruction can beat it.
    SceneSpec s;
    s.kind = SceneKind::static_target;
    s.rows = s.cols = 16;
    s.frames = 4;
    const Cube truth = generate_scene(s).cube;
    const ForwardOperator open(Cube(16, 16, 4, 1.0));
    const auto p = psnr(truth, baseline_replicate(forward(open, truth), 4));
    for (std::size_t k = 0; k < 4; ++k) CHECK(p.db[k] >= 250.0);
  }

  TEST_CASE("line fit") {
    const auto exact = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
    CHECK(exact.slope == doctest::Approx(2.0));
    CHECK(exact.intercept == doctest::Approx(1.0));
    CHECK(exact.r_squared == doctest::Approx(1.0));
    // Hand-computed: x = 0..3, y = (0, 2, 1, 3): slope 0.8, intercept 0.3, R^2 = 0.64.
    const auto noisy = fit_line({0, 1, 2, 3}, {0, 2, 1, 3});
    CHECK(noisy.slope == doctest::Approx(0.8));
    CHECK(noisy.intercept == doctest::Approx(0.3));
    CHECK(noisy.r_squared == doctest::Approx(0.64));
    CHECK_THROWS_AS(fit_line({1}, {1}), Error);
    CHECK_THROWS_AS(fit_line({1, 1}, {1, 2}), Error);
  }

  TEST_CASE("make_report scores a finished solve") {
    SceneSpec s;
    s.rows = s.cols = 16;
    s.frames = 4;
    s.seed = 1;
    const Cube truth = generate_scene(s).cube;
    const auto op = build_operator(generate_mask(12, 16, 0.5, 1), triangle_positions(4, 1), 16, 16);
    const Snapshot g = forward(op, truth);
    const auto result = solve(op, g, SolverConfig::defaults_for(op));
    const auto r = make_report(op, g, truth, result, 2.0);
    CHECK(r.psnr_db.size() == 4);
    CHECK(r.iterations == result.state.iteration);
    CHECK(r.seconds_per_iteration == doctest::Approx(2.0 / r.iterations));
    CHECK(r.residual <= 1e-10);
    CHECK(r.mean_psnr == doctest::Approx(psnr(truth, result.estimate).mean()));
  }

  TEST_CASE("residual sweep covers critical and interpolating points") {
    SceneSpec s;
    s.rows = s.cols = 16;
    s.frames = 4;
    s.seed = 2;
    const Cube truth = generate_scene(s).cube;
    SolverSettings settings;
    settings.max_iterations = 30;
    const auto rows = residual_vs_nf_sweep(truth, generate_mask(12, 16, 0.5, 1), 4, {2, 1, 0.5}, settings);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].frames == 2);
    CHECK(rows[1].frames == 4);
    CHECK(rows[2].frames == 8);
    for (const auto& r : rows) CHECK(r.estimate_residual <= 1e-10);
    const auto again = residual_vs_nf_sweep(truth, generate_mask(12, 16, 0.5, 1), 4, {2, 1, 0.5}, settings);
    for (std::size_t i = 0; i < 3; ++i) CHECK(again[i].residual == rows[i].residual);
    CHECK_THROWS_AS(residual_vs_nf_sweep(truth, generate_mask(12, 16, 0.5, 1), 5, {1}, settings), Error);
  }

  TEST_CASE("static single-frame sweep point is determined") {
    SceneSpec s;
    s.kind = SceneKind::static_target;
    s.rows = s.cols = 16;
    s.frames = 1;
    const Cube truth = generate_scene(s).cube;
    Mask open;
    open.rows = open.cols = 16;
    open.bits.assign(256, 1);
    SolverSettings settings;
    const auto rows = residual_vs_nf_sweep(truth, open, 1, {1}, settings);
    CHECK(rows[0].frames == 1);
    CHECK(rows[0].residual <= 1e-12);
  }

  TEST_CASE("runtime sweep sanity") {
    SceneSpec s;
    s.rows = s.cols = 32;
    s.seed = 3;
    SolverSettings settings;
    const auto zero = runtime_vs_nf_sweep(s, 0.5, 1, {2, 4}, settings, 0, 1);
    for (const auto& r : zero.rows) CHECK(r.seconds_per_iteration == 0.0);
    const auto some = runtime_vs_nf_sweep(s, 0.5, 1, {2, 4, 8}, settings, 3, 3);
    REQUIRE(some.rows.size() == 3);
    CHECK(some.rows[2].frames == 8);
    CHECK(some.rows[2].samples.size() == 3);
    for (const auto& r : some.rows) CHECK(r.seconds_per_iteration > 0.0);
  }

  TEST_CASE("coding comparison is deterministic and reports both strategies") {
    SceneSpec s;
    s.rows = s.cols = 16;
    s.frames = 4;
    s.seed = 4;
    const Cube truth = generate_scene(s).cube;
    SolverSettings settings;
    settings.max_iterations = 40;
    const auto a = coding_strategy_compare(truth, 4, 0.5, 9, settings);
    const auto b = coding_strategy_compare(truth, 4, 0.5, 9, settings);
    CHECK(a.translated.db == b.translated.db);
    CHECK(a.rerandomized.db == b.rerandomized.db);
    CHECK(a.mean_gap == doctest::Approx(a.mean_translated - a.mean_rerandomized));
    CHECK(a.translated.db.size() == 4);
    const auto recon = coding_strategy_compare(truth, 4, 0.5, 9, settings, true);
    CHECK(recon.rerandomized.db.size() == 4);
  }

  TEST_CASE("2D DFT matches the direct sum") {
    oracle::Gen gen(5);
    Eigen::MatrixXd f(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) f(i, j) = gen.real(-1, 1);
    const Eigen::MatrixXcd fast = dft2(f.cast<std::complex<double>>());
    CHECK((fast - oracle::direct_dft2(f)).cwiseAbs().maxCoeff() <= 1e-10);
  }

  TEST_CASE("unmodulated spectrum is the object spectrum times the box kernel") {
    oracle::Gen gen(6);
    for (std::size_t n : {8, 16, 32}) {
      Eigen::MatrixXd f(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) f(i, j) = gen.real(0, 1);
      const std::vector<double> ones(n, 1.0);
      for (std::size_t w : {1, 2, 3}) {
        const auto r = temporal_spectrum_check(f, ones, 2, w, w);
        CHECK(r.discrepancy <= 1e-10);
        CHECK(r.kernel_only_discrepancy <= 1e-10);
      }
    }
  }

  TEST_CASE("static mask spreads the spectrum along u only") {
    oracle::Gen gen(7);
    const std::size_t n = 16;
    Eigen::MatrixXd f(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) f(i, j) = gen.real(0, 1);
    std::vector<double> code(n);
    for (double& c : code) c = gen.rng.bernoulli(0.5) ? 1.0 : 0.0;
    const auto r = temporal_spectrum_check(f, code, 0);
    CHECK(r.discrepancy <= 1e-10);

    // Independent oracle: DFT of the coded video computed directly.
    Eigen::MatrixXd coded(n, n);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t t = 0; t < n; ++t) coded(x, t) = f(x, t) * code[x];
    CHECK((r.measured - oracle::direct_dft2(coded)).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(r.kernel_only_discrepancy > 1e-3);
  }

  TEST_CASE("moving code shears a single tone") {
    const std::size_t n = 64;
    Eigen::MatrixXd f(n, n);
    const int u0 = 3, v0 = 5;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t t = 0; t < n; ++t)
        f(x, t) = std::cos(2.0 * std::numbers::pi * (u0 * static_cast<double>(x) + v0 * static_cast<double>(t)) / n);
    std::vector<double> code(n, 0.0);
    code[0] = code[1] = 1.0;
    const long nu = 1;
    const auto r = temporal_spectrum_check(f, code, nu);
    CHECK(r.discrepancy <= 1e-10);
    // Energy sits on (u0 + w, v0 - nu w) and its mirror, for code frequencies w.
    const double peak = r.measured.cwiseAbs().maxCoeff();
    for (int w = 0; w < static_cast<int>(n); ++w) {
      const auto u = static_cast<Eigen::Index>((u0 + w) % n);
      const auto v = static_cast<Eigen::Index>(((v0 - nu * w) % static_cast<long>(n) + n) % n);
      if (std::abs(r.predicted(u, v)) > 1e-6 * peak)
        CHECK(std::abs(r.measured(u, v)) == doctest::Approx(std::abs(r.predicted(u, v))));
    }
    // Off the sheared lines the measurement is empty.
    CHECK(std::abs(r.measured(static_cast<Eigen::Index>(u0), static_cast<Eigen::Index>(v0 + 1))) <= 1e-9 * peak);
  }

  TEST_CASE("spectrum check rejects non-square input") {
    CHECK_THROWS_AS(temporal_spectrum_check(Eigen::MatrixXd::Zero(4, 5), std::vector<double>(4, 1.0), 1), Error);
    CHECK_THROWS_AS(temporal_spectrum_check(Eigen::MatrixXd::Zero(4, 4), std::vector<double>(3, 1.0), 1), Error);
  }
}
