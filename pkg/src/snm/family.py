"""Finite hypothesis families of mean vectors.

A family is a finite set of vectors in R^d together with a signal scale mu.
Two representations coexist:

* explicit   -- the scaled vectors are stored as a (M, d) array;
* structured -- a combinatorial recipe (see the zoo module) that can answer
  distance queries and count hypotheses without materializing anything.

Structured counts may be astronomically large, so M is always a Python int
and every operation that needs actual vectors takes a materialization cap.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import numpy as np

from .errors import CapabilityError, ValidationError

#: Default bound on how many hypotheses may be materialized or decoded.
MATERIALIZE_CAP = 10_000


@runtime_checkable
class Structure(Protocol):
    """Recipe for a structured family at unit signal scale (mu = 1)."""

    kind: str

    def params(self) -> dict: ...

    def dimension(self) -> int: ...

    def count(self) -> int: ...

    def uniform_spectrum(self) -> bool:
        """True when every hypothesis sees the same distance spectrum."""
        ...

    def unit_spectrum(self, j: int) -> list[tuple[float, int]]:
        """(squared distance, multiplicity) pairs from hypothesis j, mu = 1."""
        ...

    def materialize_unit(self) -> np.ndarray:
        """All base vectors as a (count, dimension) array, mu = 1."""
        ...


@dataclass(frozen=True)
class Family:
    """A hypothesis family; construct via from_vectors / from_structure."""

    mu: float
    d: int
    structure: Structure | None = None
    _vectors: np.ndarray | None = field(default=None, repr=False)

    @property
    def M(self) -> int:
        if self.structure is not None:
            return self.structure.count()
        return self._vectors.shape[0]

    @property
    def kind(self) -> str:
        return self.structure.kind if self.structure is not None else "explicit"


@dataclass(frozen=True)
class DistanceSpectrum:
    """Squared distances from one hypothesis to all others, with counts.

    ``entries`` is sorted by ascending squared distance; multiplicities are
    Python ints and sum to M - 1.
    """

    hypothesis: int
    entries: tuple[tuple[float, int], ...]

    def __post_init__(self):
        for val, mult in self.entries:
            if mult < 1:
                raise ValidationError(f"spectrum entry at {val} has count {mult}")
        vals = [v for v, _ in self.entries]
        if vals != sorted(vals):
            raise ValidationError("spectrum entries are not sorted")

    def total(self) -> int:
        return sum(m for _, m in self.entries)

    def min_sq_distance(self) -> float:
        if not self.entries:
            raise ValidationError("spectrum of a single-hypothesis family is empty")
        return self.entries[0][0]


def _check_mu(mu: float) -> float:
    mu = float(mu)
    if not np.isfinite(mu) or mu <= 0:
        raise ValidationError(f"signal scale mu must be finite and positive, got {mu}")
    return mu


def from_vectors(vectors, mu: float = 1.0) -> Family:
    """Explicit family from a (M, d) array of already-scaled mean vectors."""
    v = np.array(vectors, dtype=np.float64)
    if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
        raise ValidationError(f"vectors must be a nonempty (M, d) array, got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValidationError("vectors must be finite")
    v.flags.writeable = False
    return Family(mu=_check_mu(mu), d=v.shape[1], _vectors=v)


def from_structure(structure: Structure, mu: float = 1.0) -> Family:
    return Family(mu=_check_mu(mu), d=structure.dimension(), structure=structure)


def _check_index(family: Family, j: int) -> int:
    j = int(j)
    if not 0 <= j < family.M:
        raise ValidationError(f"hypothesis index {j} out of range [0, {family.M})")
    return j


def vectors(family: Family, cap: int | None = None) -> np.ndarray:
    """Scaled mean vectors as a (M, d) array.

    Raises CapabilityError when M exceeds the cap (default MATERIALIZE_CAP);
    structured counts can dwarf anything that should be turned into an array.
    """
    cap = MATERIALIZE_CAP if cap is None else int(cap)
    if family.M > cap:
        raise CapabilityError(
            f"family has {family.M} hypotheses, above the materialization cap {cap}"
        )
    if family.structure is not None:
        return family.structure.materialize_unit() * family.mu
    return np.array(family._vectors)


def hypothesis_vector(family: Family, j: int) -> np.ndarray:
    """Scaled mean vector of one hypothesis.

    Structured kinds that can build a single vector from its index do so
    without materializing the family, so this works at any M for those.
    """
    j = _check_index(family, j)
    if family.structure is not None:
        if hasattr(family.structure, "unit_vector"):
            return family.structure.unit_vector(j) * family.mu
        return vectors(family)[j]
    return np.array(family._vectors[j])


def to_explicit(family: Family, cap: int | None = None) -> Family:
    """Materialized copy of a structured family (same mu, same order)."""
    if family.structure is None:
        return family
    return from_vectors(vectors(family, cap=cap), mu=family.mu)


def scale_signal(family: Family, mu: float) -> Family:
    """Same family shape at a different signal scale."""
    mu = _check_mu(mu)
    if family.structure is not None:
        return Family(mu=mu, d=family.d, structure=family.structure)
    scaled = family._vectors * (mu / family.mu)
    scaled.flags.writeable = False
    return Family(mu=mu, d=family.d, _vectors=scaled)


def pairwise_sq_distance(family: Family, i: int, j: int) -> float:
    """Squared Euclidean distance between hypotheses i and j."""
    i, j = _check_index(family, i), _check_index(family, j)
    if family.structure is not None and hasattr(family.structure, "unit_pair_sq_dist"):
        return family.mu**2 * family.structure.unit_pair_sq_dist(i, j)
    v = vectors(family)
    diff = v[i] - v[j]
    return float(diff @ diff)


def distance_spectrum(family: Family, j: int) -> DistanceSpectrum:
    """Distance spectrum from hypothesis j.

    For structured families this uses the closed-form counting rule and never
    materializes vectors, so it works at any M.
    """
    j = _check_index(family, j)
    if family.structure is not None:
        mu2 = family.mu**2
        entries = tuple(
            (mu2 * val, int(mult)) for val, mult in family.structure.unit_spectrum(j)
        )
    else:
        diff = family._vectors - family._vectors[j]
        row = np.einsum("ki,ki->k", diff, diff)
        groups: dict[float, int] = {}
        for k, val in enumerate(row):
            if k == j:
                continue
            groups[float(val)] = groups.get(float(val), 0) + 1
        entries = tuple(sorted(groups.items()))
    return DistanceSpectrum(hypothesis=j, entries=entries)


def min_sq_distance(family: Family) -> float:
    """Minimum squared distance over all hypothesis pairs."""
    if family.M < 2:
        raise ValidationError("minimum distance needs at least two hypotheses")
    if family.structure is not None and family.structure.uniform_spectrum():
        return distance_spectrum(family, 0).min_sq_distance()
    return min(
        distance_spectrum(family, j).min_sq_distance() for j in range(family.M)
    )


# ---------------------------------------------------------------------------
# permutation invariance


def permutation_set(generators) -> list[np.ndarray]:
    """Validate coordinate permutations given as integer index arrays."""
    out = []
    for g_idx, gen in enumerate(generators):
        p = np.asarray(gen, dtype=np.int64)
        if p.ndim != 1:
            raise ValidationError(f"generator {g_idx} is not a 1-d index array")
        if not np.array_equal(np.sort(p), np.arange(p.shape[0])):
            raise ValidationError(f"generator {g_idx} is not a permutation")
        out.append(p)
    return out


@dataclass(frozen=True)
class InvarianceCertificate:
    verdict: str  # PASS | FAIL
    residual: tuple[int, int] | None  # (generator index, hypothesis index)
    orbit_size: int
    detail: str


def check_unitary_invariance(
    family: Family,
    generators,
    cap: int | None = None,
    budget: int = 10**6,
) -> InvarianceCertificate:
    """Decide whether coordinate permutations witness family symmetry.

    PASS requires both (a) closure: applying each generator to each vector
    lands back in the family, and (b) transitivity: the orbit of hypothesis 0
    under the generated group covers every hypothesis.  A PASS certifies that
    all hypotheses share one distance spectrum and that the minimax problem
    is symmetric under relabeling.

    ``budget`` caps the number of permutation applications spent on the orbit
    walk; exceeding it raises CapabilityError rather than returning a verdict.
    """
    perms = permutation_set(generators)
    v = vectors(family, cap=cap)
    m, d = v.shape
    for g_idx, p in enumerate(perms):
        if p.shape[0] != d:
            raise ValidationError(
                f"generator {g_idx} permutes {p.shape[0]} coordinates, family has {d}"
            )

    # -0.0 and 0.0 must hash alike for the byte-level membership test.
    canon = np.where(v == 0.0, 0.0, v)
    index_of = {canon[j].tobytes(): j for j in range(m)}

    for g_idx, p in enumerate(perms):
        for j in range(m):
            if canon[j][p].tobytes() not in index_of:
                return InvarianceCertificate(
                    verdict="FAIL",
                    residual=(g_idx, j),
                    orbit_size=0,
                    detail=f"generator {g_idx} maps hypothesis {j} outside the family",
                )

    # Closure holds, so each generator acts as a permutation of hypothesis
    # indices; transitivity is a BFS over those index maps.
    maps = [
        np.array([index_of[canon[j][p].tobytes()] for j in range(m)]) for p in perms
    ]
    seen = {0}
    frontier = [0]
    spent = 0
    while frontier:
        nxt = []
        for j in frontier:
            for mp in maps:
                spent += 1
                if spent > budget:
                    raise CapabilityError(
                        f"orbit walk exceeded the group-element budget {budget}"
                    )
                t = int(mp[j])
                if t not in seen:
                    seen.add(t)
                    nxt.append(t)
        frontier = nxt

    if len(seen) == m:
        return InvarianceCertificate(
            verdict="PASS",
            residual=None,
            orbit_size=m,
            detail="closed and transitive on hypotheses",
        )
    return InvarianceCertificate(
        verdict="FAIL",
        residual=None,
        orbit_size=len(seen),
        detail=f"orbit of hypothesis 0 covers {len(seen)} of {m} hypotheses",
    )


# ---------------------------------------------------------------------------
# JSON serialization

_STRUCTURE_BUILDERS: dict[str, object] = {}


def register_structure_kind(kind: str, builder) -> None:
    """Register ``builder(params: dict, mu: float) -> Family`` for a kind."""
    _STRUCTURE_BUILDERS[kind] = builder


def family_to_dict(family: Family) -> dict:
    if family.structure is not None:
        return {
            "kind": family.structure.kind,
            "params": family.structure.params(),
            "mu": family.mu,
        }
    return {
        "d": family.d,
        "mu": family.mu,
        "vectors": family._vectors.tolist(),
    }


def family_from_dict(data: dict) -> Family:
    if not isinstance(data, dict):
        raise ValidationError("family document must be a JSON object")
    if "vectors" in data:
        try:
            v = data["vectors"]
            d = int(data["d"])
            mu = float(data["mu"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"bad explicit family document: {exc}") from exc
        fam = from_vectors(v, mu=mu)
        if fam.d != d:
            raise ValidationError(
                f"declared dimension {d} does not match vectors of width {fam.d}"
            )
        return fam
    if "kind" in data:
        kind = data["kind"]
        builder = _STRUCTURE_BUILDERS.get(kind)
        if builder is None:
            raise ValidationError(f"unknown structured family kind {kind!r}")
        params = data.get("params")
        if not isinstance(params, dict):
            raise ValidationError("structured family document needs a params object")
        try:
            mu = float(data["mu"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"bad structured family document: {exc}") from exc
        return builder(params, mu)
    raise ValidationError("family document needs either 'vectors' or 'kind'")


def save_family(family: Family, path) -> None:
    with open(path, "w") as fh:
        json.dump(family_to_dict(family), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_family(path) -> Family:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"family file is not valid JSON: {exc}") from exc
    return family_from_dict(data)
