"""Observation models, sampling, and maximum-likelihood decoding.

Randomness discipline: every consumer owns an RngHandle, a (seed, stream)
pair feeding a counter-based Philox generator.  Distinct streams under one
master seed are independent, and a (seed, stream) pair reproduces its draws
exactly across runs and platforms.  Normal variates come from numpy's
ziggurat sampler, so "reproducible" means "same numpy bit-generator
contract", which Philox pins down.

Observation model: under hypothesis j and a measurement-energy profile B,
coordinate i returns  v_j(i) + B(i)^{-1/2} Z  with Z standard normal.
B(i) = 0 means coordinate i is never measured; its observation is 0 and the
decoder gives it zero weight.  Isotropic sampling is B = all-ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import family as fam
from ._kernels import decode_batch
from .errors import CapabilityError, ValidationError

#: Refuse nearest-vector decoding against more hypotheses than this.
DECODE_CAP = 10**6


@dataclass(frozen=True)
class RngHandle:
    """Named, forkable source of randomness."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        if self.seed < 0 or self.stream < 0:
            raise ValidationError(
                f"seed and stream must be nonnegative, got ({self.seed}, {self.stream})"
            )
        key = np.array([self.seed, self.stream], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def substream(self, offset: int) -> "RngHandle":
        return RngHandle(seed=self.seed, stream=self.stream + int(offset))


@dataclass(frozen=True)
class DesignStrategy:
    """Nonnegative per-coordinate measurement energies B with budget tau."""

    B: np.ndarray
    tau: float = field(init=False)

    def __post_init__(self):
        b = np.ascontiguousarray(self.B, dtype=np.float64)
        if b.ndim != 1 or b.shape[0] < 1:
            raise ValidationError(f"B must be a nonempty 1-d array, got {b.shape}")
        if not np.all(np.isfinite(b)) or np.any(b < 0):
            raise ValidationError("B must be finite and nonnegative")
        b.flags.writeable = False
        object.__setattr__(self, "B", b)
        object.__setattr__(self, "tau", float(b.sum()))

    def to_dict(self) -> dict:
        return {"tau": self.tau, "B": self.B.tolist()}


def design_from_dict(data: dict) -> DesignStrategy:
    try:
        ds = DesignStrategy(B=np.asarray(data["B"], dtype=np.float64))
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"bad design document: {exc}") from exc
    declared = data.get("tau")
    if declared is not None and abs(ds.tau - float(declared)) > 1e-9 * max(
        1.0, abs(ds.tau)
    ):
        raise ValidationError(
            f"declared budget {declared} does not match sum(B) = {ds.tau}"
        )
    return ds


def uniform_design(d: int, tau: float) -> DesignStrategy:
    d = int(d)
    if d < 1 or tau <= 0:
        raise ValidationError(f"need d >= 1 and tau > 0, got d={d} tau={tau}")
    return DesignStrategy(B=np.full(d, tau / d))


def _design_weights(f: fam.Family, design: DesignStrategy | None) -> np.ndarray:
    if design is None:
        return np.ones(f.d)
    if design.B.shape[0] != f.d:
        raise ValidationError(
            f"design has {design.B.shape[0]} coordinates, family has {f.d}"
        )
    return design.B


@dataclass(frozen=True)
class Observation:
    """One noisy view of a hypothesis; design None means isotropic."""

    y: np.ndarray
    hypothesis: int
    design: DesignStrategy | None = None

    def to_dict(self) -> dict:
        b = "isotropic" if self.design is None else self.design.B.tolist()
        return {"y": self.y.tolist(), "hypothesis": self.hypothesis, "B": b}


def _noisy(v: np.ndarray, B: np.ndarray, z: np.ndarray) -> np.ndarray:
    y = np.zeros_like(z)
    measured = B > 0
    y[..., measured] = v[measured] + z[..., measured] / np.sqrt(B[measured])
    return y


def sample_observation(
    f: fam.Family,
    j: int,
    rng: RngHandle,
    design: DesignStrategy | None = None,
) -> Observation:
    """Draw one observation of hypothesis j.

    One normal per coordinate is consumed regardless of zeros in B, so the
    (seed, stream) pair alone fixes the draw pattern.
    """
    B = _design_weights(f, design)
    v = fam.hypothesis_vector(f, j)
    z = rng.generator().standard_normal(f.d)
    return Observation(y=_noisy(v, B, z), hypothesis=int(j), design=design)


def sample_batch(
    f: fam.Family,
    j: int,
    n: int,
    rng: RngHandle,
    design: DesignStrategy | None = None,
) -> np.ndarray:
    """(n, d) independent observations of hypothesis j from one stream."""
    n = int(n)
    if n < 1:
        raise ValidationError(f"batch size must be positive, got {n}")
    B = _design_weights(f, design)
    v = fam.hypothesis_vector(f, j)
    z = rng.generator().standard_normal((n, f.d))
    return _noisy(v, B, z)


def mle_decode(
    f: fam.Family,
    y,
    design: DesignStrategy | None = None,
    cap: int | None = None,
    path: str | None = None,
):
    """Nearest-hypothesis decoding under the design-weighted metric.

    Accepts an Observation, a single length-d vector, or a (N, d) batch.
    Returns an int for single inputs, an int64 array for batches.  Exact
    ties resolve to the lowest hypothesis index.  An explicit ``design``
    argument overrides the one recorded on an Observation.
    """
    if isinstance(y, Observation):
        if design is None:
            design = y.design
        y = y.y
    arr = np.asarray(y, dtype=np.float64)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != f.d:
        raise ValidationError(
            f"observations must have {f.d} coordinates, got shape {arr.shape}"
        )
    cap = DECODE_CAP if cap is None else int(cap)
    if f.M > cap:
        raise CapabilityError(
            f"decoding against {f.M} hypotheses exceeds the cap {cap}"
        )
    vecs = fam.vectors(f, cap=cap)
    weights = _design_weights(f, design)
    idx = decode_batch(vecs, arr, weights=weights, path=path)
    return int(idx[0]) if single else idx
