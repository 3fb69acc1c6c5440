"""Hot-path kernels: accelerated and plain implementations must agree."""

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from snm import _kernels as ker
from snm.errors import ValidationError

NEEDS_NUMBA = pytest.mark.skipif(not ker.HAS_NUMBA, reason="numba not importable")


def test_kernel_path_reports_something_sane():
    assert ker.KERNEL_PATH in ("numba", "numpy")


def test_bad_path_override_rejected():
    vs = np.eye(3)
    with pytest.raises(ValidationError):
        ker.decode_batch(vs, vs, path="cuda")


def test_decode_batch_matches_brute_force():
    rng = np.random.default_rng(7)
    vs = rng.normal(size=(9, 5))
    ys = rng.normal(size=(40, 5))
    got = ker.decode_batch(vs, ys, path="numpy")
    want = [oracles.decode_brute(vs, y) for y in ys]
    assert got.tolist() == want
    w = rng.uniform(0.0, 2.0, size=5)
    got_w = ker.decode_batch(vs, ys, weights=w, path="numpy")
    want_w = [oracles.decode_brute(vs, y, weights=w) for y in ys]
    assert got_w.tolist() == want_w


@NEEDS_NUMBA
@settings(max_examples=25)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_paths_agree_on_decode(seed):
    rng = np.random.default_rng(seed)
    m, d, n = int(rng.integers(2, 12)), int(rng.integers(1, 6)), int(rng.integers(1, 50))
    vs = rng.normal(size=(m, d))
    ys = rng.normal(size=(n, d))
    w = rng.uniform(0.0, 3.0, size=d)
    assert np.array_equal(
        ker.decode_batch(vs, ys, path="numba"), ker.decode_batch(vs, ys, path="numpy")
    )
    assert np.array_equal(
        ker.decode_batch(vs, ys, weights=w, path="numba"),
        ker.decode_batch(vs, ys, weights=w, path="numpy"),
    )


@NEEDS_NUMBA
def test_paths_break_ties_identically():
    # y sits exactly between two hypotheses; the earlier index must win
    vs = np.array([[0.0, 0.0], [2.0, 0.0], [4.0, 0.0]])
    ys = np.array([[1.0, 0.0], [3.0, 0.0], [1.0, 0.0]])
    for path in ("numba", "numpy"):
        assert ker.decode_batch(vs, ys, path=path).tolist() == [0, 1, 0]


def test_numpy_decode_blocking_boundary():
    # more trials than one block so the blocked path has to stitch results
    rng = np.random.default_rng(11)
    vs = rng.normal(size=(3, 2))
    ys = rng.normal(size=(10000, 2))
    got = ker.decode_batch(vs, ys, path="numpy")
    sample = rng.integers(0, 10000, size=64)
    for i in sample:
        assert got[i] == oracles.decode_brute(vs, ys[i])


@NEEDS_NUMBA
def test_paths_agree_on_pairwise_distances():
    rng = np.random.default_rng(3)
    vs = rng.normal(size=(14, 6))
    w = rng.uniform(0.0, 2.0, size=6)
    a = ker.pairwise_sq_dists(vs, path="numba")
    b = ker.pairwise_sq_dists(vs, path="numpy")
    assert np.allclose(a, b, atol=1e-10)
    aw = ker.pairwise_sq_dists(vs, weights=w, path="numba")
    bw = ker.pairwise_sq_dists(vs, weights=w, path="numpy")
    assert np.allclose(aw, bw, atol=1e-10)


def test_pairwise_distances_well_formed():
    rng = np.random.default_rng(5)
    vs = rng.normal(size=(8, 4))
    d2 = ker.pairwise_sq_dists(vs, path="numpy")
    assert np.all(np.diag(d2) == 0.0)
    assert np.all(d2 >= 0.0)
    assert np.allclose(d2, d2.T)
    assert np.allclose(d2, oracles.pairwise_sq(vs), atol=1e-10)


def test_env_flag_selects_numpy_path():
    env = dict(os.environ, SNM_KERNELS="numpy")
    out = subprocess.run(
        [sys.executable, "-c", "import snm; print(snm.KERNEL_PATH)"],
        env=env,
        capture_output=True,
        text=True,
    )
    assert out.returncode == 0
    assert out.stdout.strip() == "numpy"


def test_env_flag_rejects_unknown_value():
    env = dict(os.environ, SNM_KERNELS="gpu")
    out = subprocess.run(
        [sys.executable, "-c", "import snm"],
        env=env,
        capture_output=True,
        text=True,
    )
    assert out.returncode != 0
    assert "SNM_KERNELS" in out.stderr


def test_thread_env_is_clamped_not_fatal():
    env = dict(os.environ, SNM_THREADS="64")
    out = subprocess.run(
        [sys.executable, "-c", "import snm; print(snm.KERNEL_PATH)"],
        env=env,
        capture_output=True,
        text=True,
    )
    assert out.returncode == 0
