"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

Path selection happens once at import from the ``SNM_KERNELS`` environment
variable: ``numba`` forces the compiled path, ``numpy`` forces the fallback,
and ``auto`` (the default) uses numba when it imports cleanly.  Every public
kernel also takes an explicit ``path=`` override so tests and benchmarks can
compare both implementations in one process.

``SNM_THREADS`` caps the numba thread pool; it is clamped to what the host
actually exposes.  Results are independent of the thread count because the
parallel loops write disjoint output slots.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import ValidationError

_ENV_PATH = os.environ.get("SNM_KERNELS", "auto").strip().lower()
if _ENV_PATH not in ("auto", "numba", "numpy"):
    raise ValidationError(
        f"SNM_KERNELS must be one of auto|numba|numpy, got {_ENV_PATH!r}"
    )

HAS_NUMBA = False
if _ENV_PATH != "numpy":
    try:
        import numba
        from numba import njit, prange

        HAS_NUMBA = True
    except ImportError:
        if _ENV_PATH == "numba":
            raise ValidationError("SNM_KERNELS=numba but numba is not importable")

if HAS_NUMBA:
    _requested = os.environ.get("SNM_THREADS")
    if _requested is not None:
        n = max(1, int(_requested))
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))

KERNEL_PATH = "numba" if HAS_NUMBA else "numpy"

# Rows per block in the numpy decode fallback; keeps the (block, M) score
# matrix and the (block, d) scratch well inside cache-friendly territory.
_DECODE_BLOCK = 8192


def _as_matrix(vectors: np.ndarray) -> np.ndarray:
    v = np.ascontiguousarray(vectors, dtype=np.float64)
    if v.ndim != 2:
        raise ValidationError(f"expected a (M, d) matrix, got shape {v.shape}")
    return v


def _as_weights(weights, d: int) -> np.ndarray:
    if weights is None:
        return np.ones(d, dtype=np.float64)
    w = np.ascontiguousarray(weights, dtype=np.float64)
    if w.shape != (d,):
        raise ValidationError(f"weights must have shape ({d},), got {w.shape}")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValidationError("weights must be finite and nonnegative")
    return w


def _resolve(path: str | None) -> str:
    if path is None:
        return KERNEL_PATH
    if path not in ("numba", "numpy"):
        raise ValidationError(f"kernel path must be numba or numpy, got {path!r}")
    if path == "numba" and not HAS_NUMBA:
        raise ValidationError("numba path requested but unavailable")
    return path


# ---------------------------------------------------------------------------
# decode: nearest hypothesis under a weighted squared-Euclidean metric


def _decode_batch_numpy(vectors, ys, weights):
    # argmin_j sum_i w_i (v_ji - y_ti)^2.  Expanding the square, the y^2 term
    # is constant in j, so ranking by  c_j - 2 <y*w, v_j>  gives the same
    # argmin via one matmul per block.
    vw = vectors * weights
    c = np.einsum("ji,ji->j", vw, vectors)
    out = np.empty(ys.shape[0], dtype=np.int64)
    for lo in range(0, ys.shape[0], _DECODE_BLOCK):
        hi = min(lo + _DECODE_BLOCK, ys.shape[0])
        scores = c - 2.0 * (ys[lo:hi] @ vw.T)
        out[lo:hi] = np.argmin(scores, axis=1)
    return out


if HAS_NUMBA:

    @njit(parallel=True, cache=True)
    def _decode_batch_numba(vectors, ys, weights):  # pragma: no cover - compiled
        n_obs = ys.shape[0]
        m, d = vectors.shape
        out = np.empty(n_obs, dtype=np.int64)
        for t in prange(n_obs):
            best = np.inf
            best_j = 0
            for j in range(m):
                acc = 0.0
                for i in range(d):
                    diff = vectors[j, i] - ys[t, i]
                    acc += weights[i] * diff * diff
                if acc < best:
                    best = acc
                    best_j = j
            out[t] = best_j
        return out


def decode_batch(vectors, ys, weights=None, path: str | None = None) -> np.ndarray:
    """Nearest-vector indices for a batch of observations.

    Parameters
    ----------
    vectors : (M, d) array
        Candidate mean vectors.
    ys : (N, d) array
        Observations to decode.
    weights : (d,) array, optional
        Per-coordinate nonnegative weights; omitted means all ones.
        A zero weight removes that coordinate from the metric.
    path : {"numba", "numpy"}, optional
        Force one implementation; defaults to the import-time selection.

    Returns
    -------
    (N,) int64 array of hypothesis indices.  Exact score ties resolve to the
    lowest index.
    """
    v = _as_matrix(vectors)
    y = _as_matrix(ys)
    if y.shape[1] != v.shape[1]:
        raise ValidationError(
            f"observation dimension {y.shape[1]} != family dimension {v.shape[1]}"
        )
    w = _as_weights(weights, v.shape[1])
    if _resolve(path) == "numba":
        return _decode_batch_numba(v, y, w)
    return _decode_batch_numpy(v, y, w)


# ---------------------------------------------------------------------------
# pairwise weighted squared distances


def _pairwise_sq_dists_numpy(vectors, weights):
    vw = vectors * weights
    sq = np.einsum("ji,ji->j", vw, vectors)
    g = vectors @ vw.T
    d2 = sq[:, None] + sq[None, :] - 2.0 * g
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return d2


if HAS_NUMBA:

    @njit(parallel=True, cache=True)
    def _pairwise_sq_dists_numba(vectors, weights):  # pragma: no cover - compiled
        m, d = vectors.shape
        out = np.zeros((m, m), dtype=np.float64)
        for j in prange(m):
            for k in range(j + 1, m):
                acc = 0.0
                for i in range(d):
                    diff = vectors[j, i] - vectors[k, i]
                    acc += weights[i] * diff * diff
                out[j, k] = acc
                out[k, j] = acc
        return out


def pairwise_sq_dists(vectors, weights=None, path: str | None = None) -> np.ndarray:
    """(M, M) matrix of weighted squared Euclidean distances, zero diagonal."""
    v = _as_matrix(vectors)
    w = _as_weights(weights, v.shape[1])
    if _resolve(path) == "numba":
        return _pairwise_sq_dists_numba(v, w)
    return _pairwise_sq_dists_numpy(v, w)
