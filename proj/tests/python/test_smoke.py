import os
import subprocess

import numpy as np
import pytest

import cacti


def square_problem(frames=8):
    truth = cacti.generate_scene("moving_square", 32, 32, frames, seed=1)
    mask = cacti.generate_mask(32 - frames, 32, seed=2)
    op = cacti.build_operator(mask, frames, 1.0, 32, 32)
    return truth, op, op.forward(truth)


def test_shapes_and_operator():
    truth, op, g = square_problem()
    assert truth.shape == (8, 32, 32)
    assert g.shape == (32, 32)
    assert (op.frames, op.rows, op.cols) == (8, 32, 32)
    assert cacti.triangle_positions(4, 0.5) == [0, 0.5, 1, 1.5, 2, 2.5, 3, 3.5]


def test_adjoint_identity():
    rng = np.random.default_rng(0)
    _, op, _ = square_problem()
    f = rng.standard_normal((8, 32, 32))
    y = rng.standard_normal((32, 32))
    lhs = float(np.sum(op.forward(f) * y))
    rhs = float(np.sum(f * op.adjoint(y)))
    assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), 1.0)


def test_solve_beats_baseline():
    truth, op, g = square_problem()
    out = cacti.solve(op, g, max_iterations=100)
    assert out["estimate"].shape == truth.shape
    assert len(out["gap_norms"]) == out["iterations"]
    gain = np.mean(cacti.psnr(truth, out["estimate"])) - np.mean(
        cacti.psnr(truth, cacti.baseline_replicate(g, 8))
    )
    assert gain > 0
    assert cacti.normalized_residual(op, out["estimate"], g) < 1e-10


def test_projection_is_feasible():
    rng = np.random.default_rng(1)
    _, op, g = square_problem()
    f = cacti.project_linear_manifold(op, g, rng.standard_normal((8, 32, 32)))
    assert np.allclose(op.forward(f), g, atol=1e-10)


def test_transform_round_trip():
    rng = np.random.default_rng(2)
    x = rng.standard_normal((4, 8, 8))
    for kinds in ("dct", "haar", "mostly_static"):
        w = cacti.transform(x, kinds)
        assert np.isclose(np.linalg.norm(w), np.linalg.norm(x))
        assert np.allclose(cacti.transform(w, kinds, inverse=True), x)


def test_ccv1_round_trip_and_errors(tmp_path):
    x = np.arange(24, dtype=np.float32).reshape(2, 3, 4).astype(np.float64)
    path = str(tmp_path / "x.ccv1")
    cacti.write_ccv1(path, x)
    assert np.array_equal(cacti.read_ccv1(path), x)
    blob = cacti.encode_ccv1(x)
    assert blob[:4] == b"CCV1"
    assert np.array_equal(cacti.decode_ccv1(blob), x)
    with pytest.raises(cacti.CactiError):
        cacti.decode_ccv1(b"XXXX" + blob[4:])
    with pytest.raises(cacti.CactiError):
        cacti.decode_ccv1(blob[:-1])


def test_spectrum_check_static_mask():
    rng = np.random.default_rng(3)
    video = rng.random((16, 16))
    code = list(rng.integers(0, 2, 16).astype(float))
    discrepancy, _ = cacti.temporal_spectrum_check(video, code, 0)
    assert discrepancy < 1e-10


def test_invalid_arguments_raise():
    with pytest.raises(cacti.CactiError):
        cacti.triangle_positions(3, 2)
    with pytest.raises(cacti.CactiError):
        cacti.generate_scene("car", 8, 8, 2, seed=0)


@pytest.mark.skipif("CACTI_CLI" not in os.environ, reason="CLI binary not provided")
def test_cli_round_trip(tmp_path):
    cli = os.environ["CACTI_CLI"]
    g, f, e = (str(tmp_path / n) for n in ("g.ccv1", "f.ccv1", "e.ccv1"))
    subprocess.run(
        [cli, "simulate", "--rows", "32", "--cols", "32", "--frames", "8", "--C", "8",
         "--seed", "1", "--out", g, "--truth", f],
        check=True,
    )
    subprocess.run([cli, "reconstruct", "--in", g, "--max-iterations", "20", "--out", e], check=True)
    assert cacti.read_ccv1(e).shape == cacti.read_ccv1(f).shape
    bad = subprocess.run([cli, "simulate", "--C", "4", "--out", g], capture_output=True)
    assert bad.returncode == 4
