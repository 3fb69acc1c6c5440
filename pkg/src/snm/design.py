"""Measurement-energy allocation: minimize the divergence functional over
budgeted designs.

The objective  B -> W(V, alpha, B) = max_j sum_{k != j} exp(-||v_j-v_k||_B^2
/ alpha)  is a max of convex (log-convex, even) functions of B, hence convex.
Each term is strictly decreasing in every coordinate the family actually
uses, so the optimum saturates the budget; the feasible set is the simplex
{B >= 0, sum B = tau} with equality, not an inequality ball.

Optimality at a candidate B is certified via the first-order condition: for
some distribution pi on the worst-case hypotheses, the aggregated sensitivity

    g(i) = sum_j pi(j) sum_{k != j} (v_k(i) - v_j(i))^2 exp(-||v_k-v_j||_B^2 / alpha)

must be constant across coordinates (any non-constant g admits a budget
shift that improves the worst case).
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from . import family as fam
from .bounds import ARGMAX_RTOL
from .errors import CapabilityError, ValidationError
from .sampling import DesignStrategy, RngHandle, uniform_design

#: Refuse optimization when M^2 * d exceeds this (the pair-difference tensor).
PAIR_TENSOR_CAP = 2 * 10**8


@dataclass(frozen=True)
class OptimizerConfig:
    """Projected subgradient settings.

    step_scale is the c in the classic diminishing step  c * tau /
    (sqrt(t) * ||g_t||).  Convergence is declared when the best objective
    has not improved for ``patience`` consecutive iterations, where an
    improvement must clear both tol relatively and 1e-12 absolutely (the
    objective bounds an error probability, so shifts below 1e-12 carry no
    meaning and would otherwise stall the plateau detector at strong
    signals).  Running out of max_iters first is reported as INCONCLUSIVE
    rather than pretending.
    """

    tau: float
    alpha: float = 1.0
    max_iters: int = 2000
    step_scale: float = 0.5
    tol: float = 1e-10
    patience: int = 200
    tie_seed: int | None = None

    def __post_init__(self):
        if self.tau <= 0 or self.alpha <= 0:
            raise ValidationError("tau and alpha must be positive")
        if self.max_iters < 1 or self.patience < 1:
            raise ValidationError("max_iters and patience must be positive")
        if self.step_scale <= 0:
            raise ValidationError("step_scale must be positive")


def project_budget_simplex(v, tau: float) -> np.ndarray:
    """Euclidean projection onto {B >= 0, sum B = tau} (sorted-threshold)."""
    if tau <= 0:
        raise ValidationError(f"tau must be positive, got {tau}")
    x = np.asarray(v, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] < 1:
        raise ValidationError(f"expected a nonempty vector, got shape {x.shape}")
    u = np.sort(x)[::-1]
    css = np.cumsum(u) - tau
    idx = np.arange(1, x.shape[0] + 1)
    rho = int(np.nonzero(u - css / idx > 0)[0][-1])
    theta = css[rho] / (rho + 1.0)
    return np.maximum(x - theta, 0.0)


def _pair_tensor(family: fam.Family, cap: int | None) -> np.ndarray:
    m = family.M
    if m * m * family.d > PAIR_TENSOR_CAP:
        raise CapabilityError(
            f"pairwise tensor {m}^2 x {family.d} exceeds {PAIR_TENSOR_CAP} entries"
        )
    v = fam.vectors(family, cap=cap)
    diff = v[:, None, :] - v[None, :, :]
    return diff * diff  # (M, M, d)


def _wj_and_exp(d2: np.ndarray, b: np.ndarray, alpha: float):
    z = d2 @ b
    e = np.exp(-z / alpha)
    np.fill_diagonal(e, 0.0)
    return e.sum(axis=1), e


@dataclass(frozen=True)
class OptimizeResult:
    design: DesignStrategy
    objective: float
    status: str  # CONVERGED | INCONCLUSIVE
    iterations: int
    trace: np.ndarray  # rows of (iteration, objective, best objective)

    def trace_csv(self) -> str:
        buf = io.StringIO()
        buf.write("iter,objective,best\n")
        for row in self.trace:
            buf.write(f"{int(row[0])},{float(row[1])!r},{float(row[2])!r}\n")
        return buf.getvalue()


def optimize_design(
    family: fam.Family,
    cfg: OptimizerConfig,
    init: DesignStrategy | None = None,
    cap: int | None = None,
) -> OptimizeResult:
    """Projected subgradient descent on B -> W(V, alpha, B).

    Starts from the uniform allocation unless ``init`` says otherwise and
    returns the best iterate seen.  For families whose symmetry makes uniform
    optimal, that start is already the optimum and the method reports
    convergence once the patience window confirms no progress.
    """
    d2 = _pair_tensor(family, cap)
    d = family.d
    if init is not None and init.B.shape[0] != d:
        raise ValidationError(f"init design has wrong dimension {init.B.shape[0]}")
    if init is not None and abs(init.tau - cfg.tau) > 1e-9 * max(1.0, cfg.tau):
        raise ValidationError(
            f"init budget {init.tau} does not match configured tau {cfg.tau}"
        )
    b = np.array(init.B) if init is not None else np.full(d, cfg.tau / d)
    tie_rng = (
        RngHandle(seed=cfg.tie_seed, stream=0).generator()
        if cfg.tie_seed is not None
        else None
    )

    best_b = b.copy()
    best_f = math.inf
    last_improve = 0
    trace = np.empty((cfg.max_iters, 3))
    status = "INCONCLUSIVE"
    t = 0
    for t in range(1, cfg.max_iters + 1):
        wj, e = _wj_and_exp(d2, b, cfg.alpha)
        f = float(wj.max())
        if best_f - f > max(cfg.tol * best_f, 1e-12) or not math.isfinite(best_f):
            best_f = f
            best_b = b.copy()
            last_improve = t
        trace[t - 1] = (t, f, best_f)
        if t - last_improve >= cfg.patience:
            status = "CONVERGED"
            break

        ties = np.flatnonzero(wj >= f - ARGMAX_RTOL * abs(f)) if f > 0 else [0]
        if tie_rng is not None and len(ties) > 1:
            j_star = int(ties[int(tie_rng.integers(0, len(ties)))])
        else:
            j_star = int(ties[0])
        g = -(e[j_star] @ d2[j_star]) / cfg.alpha
        gnorm = float(np.linalg.norm(g))
        if gnorm == 0.0:
            status = "CONVERGED"  # exactly stationary, nothing to move
            break
        step = cfg.step_scale * cfg.tau / (math.sqrt(t) * gnorm)
        b = project_budget_simplex(b - step * g, cfg.tau)

    return OptimizeResult(
        design=DesignStrategy(B=best_b),
        objective=best_f,
        status=status,
        iterations=t,
        trace=trace[:t].copy(),
    )


@dataclass(frozen=True)
class StationarityCertificate:
    """First-order optimality check at a candidate design.

    verdict PASS means the aggregated sensitivity g is constant across
    coordinates within ``tol`` (relative to its mean); FAIL means some
    coordinate is measurably more valuable than another, so the design
    cannot be optimal; INCONCLUSIVE means g vanished identically and the
    condition carries no information.
    """

    verdict: str
    g: np.ndarray
    spread: float
    mean: float
    tol: float
    argmax: list[int]

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "g": self.g.tolist(),
            "spread": self.spread,
            "mean": self.mean,
            "tol": self.tol,
            "argmax": self.argmax,
        }


def certify_stationarity(
    family: fam.Family,
    alpha: float,
    design: DesignStrategy,
    pi: np.ndarray | None = None,
    tol: float = 1e-6,
    cap: int | None = None,
) -> StationarityCertificate:
    """Evaluate the constancy condition at ``design``.

    ``pi`` is a distribution over hypotheses supported on the worst-case set
    (the argmax of W_j at this design); the default is uniform over that set.
    """
    alpha = float(alpha)
    if alpha <= 0:
        raise ValidationError(f"alpha must be positive, got {alpha}")
    if design.B.shape[0] != family.d:
        raise ValidationError(
            f"design has {design.B.shape[0]} coordinates, family has {family.d}"
        )
    d2 = _pair_tensor(family, cap)
    wj, e = _wj_and_exp(d2, design.B, alpha)
    wmax = float(wj.max())
    if wmax > 0:
        argmax = [int(j) for j in np.flatnonzero(wj >= wmax - ARGMAX_RTOL * abs(wmax))]
    else:
        argmax = list(range(family.M))

    m = family.M
    if pi is None:
        weights = np.zeros(m)
        weights[argmax] = 1.0 / len(argmax)
    else:
        weights = np.asarray(pi, dtype=np.float64)
        if weights.shape != (m,):
            raise ValidationError(f"pi must have shape ({m},), got {weights.shape}")
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-9:
            raise ValidationError("pi must be a probability vector")
        off_support = np.flatnonzero(weights > 0)
        if not set(off_support.tolist()) <= set(argmax):
            raise ValidationError(
                "pi puts mass outside the worst-case hypothesis set"
            )

    g = np.einsum("j,jk,jki->i", weights, e, d2)
    spread = float(g.max() - g.min())
    mean = float(g.mean())
    if mean == 0.0:
        verdict = "INCONCLUSIVE"
    elif spread <= tol * mean:
        verdict = "PASS"
    else:
        verdict = "FAIL"
    return StationarityCertificate(
        verdict=verdict, g=g, spread=spread, mean=mean, tol=tol, argmax=argmax
    )


__all__ = [
    "OptimizerConfig",
    "OptimizeResult",
    "StationarityCertificate",
    "certify_stationarity",
    "optimize_design",
    "project_budget_simplex",
    "uniform_design",
]
