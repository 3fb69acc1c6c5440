"""Monte Carlo estimation of decoder risk, one error frequency per hypothesis.

Each hypothesis j draws its trials from stream j of the master seed, so the
estimate is reproducible trial-for-trial, independent of evaluation order,
and extending one hypothesis's trial count never disturbs another's draws.

Intervals are Wilson 95% throughout: they stay inside [0, 1] and behave at
the extreme frequencies this code meets constantly (risks near 0 at large
signal, near 1 - 1/M at small signal).
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass

import numpy as np

from . import bounds as bnd
from . import family as fam
from ._kernels import decode_batch
from .errors import CapabilityError, ValidationError
from .sampling import DesignStrategy, RngHandle, _design_weights

#: Refuse Monte Carlo jobs larger than this many total decodes.
TRIAL_CAP = 10**8

_Z95 = 1.959963984540054


def wilson_interval(errors: int, n: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n < 1:
        raise ValidationError("interval needs at least one trial")
    phat = errors / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (phat + z2 / (2 * n)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / n + z2 / (4 * n * n)) / denom
    # rounding can push the bracket a hair past phat at the 0/n extremes
    lo = min(max(0.0, center - half), phat)
    hi = max(min(1.0, center + half), phat)
    return lo, hi


@dataclass(frozen=True)
class RiskEstimate:
    """Per-hypothesis Monte Carlo error frequencies with 95% Wilson bands."""

    N: int
    seed: int
    errors: np.ndarray
    phat: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    design: DesignStrategy | None = None

    @property
    def M(self) -> int:
        return self.errors.shape[0]

    @property
    def max_risk(self) -> float:
        return float(self.phat.max())

    @property
    def argmax(self) -> int:
        return int(self.phat.argmax())

    def to_dict(self) -> dict:
        out = {
            "N": self.N,
            "seed": self.seed,
            "errors": self.errors.tolist(),
            "phat": self.phat.tolist(),
            "lo": self.lo.tolist(),
            "hi": self.hi.tolist(),
            "max_risk": self.max_risk,
            "argmax": self.argmax,
        }
        if self.design is not None:
            out["B"] = self.design.B.tolist()
            out["tau"] = self.design.tau
        else:
            out["isotropic"] = True
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("j,errors,N,phat,lo,hi\n")
        for j in range(self.M):
            buf.write(
                f"{j},{int(self.errors[j])},{self.N},"
                f"{float(self.phat[j])!r},{float(self.lo[j])!r},{float(self.hi[j])!r}\n"
            )
        return buf.getvalue()


def estimate_risk(
    family: fam.Family,
    n_trials: int,
    seed: int,
    design: DesignStrategy | None = None,
    trial_cap: int = TRIAL_CAP,
    path: str | None = None,
) -> RiskEstimate:
    """Monte Carlo risk of the nearest-vector decoder, every hypothesis.

    ``path`` forces a kernel implementation (tests and benchmarks); leave it
    None for the environment-selected default.
    """
    n_trials = int(n_trials)
    if n_trials < 1:
        raise ValidationError(f"trial count must be positive, got {n_trials}")
    m = family.M
    if m * n_trials > trial_cap:
        raise CapabilityError(
            f"{m} hypotheses x {n_trials} trials exceeds the trial cap {trial_cap}"
        )
    vecs = fam.vectors(family)
    weights = _design_weights(family, design)
    measured = weights > 0
    root = np.zeros_like(weights)
    root[measured] = 1.0 / np.sqrt(weights[measured])

    errors = np.zeros(m, dtype=np.int64)
    for j in range(m):
        gen = RngHandle(seed=int(seed), stream=j).generator()
        z = gen.standard_normal((n_trials, family.d))
        ys = np.where(measured, vecs[j] + z * root, 0.0)
        dec = decode_batch(vecs, ys, weights=weights, path=path)
        errors[j] = int(np.sum(dec != j))

    phat = errors / n_trials
    lo = np.empty(m)
    hi = np.empty(m)
    for j in range(m):
        lo[j], hi[j] = wilson_interval(int(errors[j]), n_trials)
    return RiskEstimate(
        N=n_trials,
        seed=int(seed),
        errors=errors,
        phat=phat,
        lo=lo,
        hi=hi,
        design=design,
    )


@dataclass(frozen=True)
class FlatnessReport:
    """Is the risk landscape flat across hypotheses, at Monte Carlo precision?

    ``spread`` is max - min of the per-hypothesis frequencies.  The yardstick
    is the standard error of a difference of two proportions at the pooled
    rate,  sqrt(2 pbar (1 - pbar) / N);  the landscape passes when the spread
    stays within 4 of those.
    """

    spread: float
    pooled_se: float
    threshold: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "spread": self.spread,
            "pooled_se": self.pooled_se,
            "threshold": self.threshold,
            "passed": self.passed,
        }


def risk_landscape_flatness(est: RiskEstimate) -> FlatnessReport:
    spread = float(est.phat.max() - est.phat.min())
    pbar = float(est.errors.sum()) / (est.M * est.N)
    pooled_se = math.sqrt(2.0 * pbar * (1.0 - pbar) / est.N)
    threshold = 4.0 * pooled_se
    return FlatnessReport(
        spread=spread,
        pooled_se=pooled_se,
        threshold=threshold,
        passed=spread <= threshold,
    )


@dataclass(frozen=True)
class TensionFlag:
    """Records disagreement between a certified lower bound and an estimate.

    When the divergence functional certifies risk >= 1/2 but the Monte Carlo
    upper confidence limit sits below 1/2, something is off (bad design
    bookkeeping, a broken decoder, or astronomically unlucky sampling).  The
    flag records the finding for review; it never gates anything.
    """

    lower_bound_holds: bool
    max_hi: float
    tension: bool

    def to_dict(self) -> dict:
        return {
            "lower_bound_holds": self.lower_bound_holds,
            "max_hi": self.max_hi,
            "tension": self.tension,
        }


def flag_lower_bound_tension(
    family: fam.Family,
    est: RiskEstimate,
    cap: int | None = None,
) -> TensionFlag:
    verdict = bnd.lower_bound_verdict(family, 0.5, est.design, cap=cap)
    max_hi = float(est.hi.max())
    return TensionFlag(
        lower_bound_holds=verdict.holds,
        max_hi=max_hi,
        tension=verdict.holds and max_hi < 0.5,
    )


def risk_estimate_to_json(est: RiskEstimate, path) -> None:
    with open(path, "w") as fh:
        json.dump(est.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
