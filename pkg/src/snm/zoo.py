"""Structured family constructors: k-sets, biclusters, hierarchies, stars.

Each constructor returns a Family whose structure object answers counting
and distance-spectrum queries in closed form, so divergence bounds work even
when the hypothesis count is far too large to materialize.

Hypothesis orderings are part of the contract (CSV rows and decodes refer to
them):

* k-sets: colexicographic order of the support sets, i.e. the combinatorial
  number system rank  sum_i C(c_i, i)  for support {c_1 < ... < c_k};
* biclusters: row-major over (row-set rank, column-set rank), both colex;
* hierarchies: a canonical recursion (the cluster containing the minimum
  element is always the left child, its remaining members enumerated in
  lexicographic order);
* stars: vertex order of the underlying graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from . import family as fam
from .errors import CapabilityError, ValidationError
from .sampling import RngHandle

# ---------------------------------------------------------------------------
# colexicographic subset ranking


def colex_rank(subset) -> int:
    """Rank of a k-subset of {0..d-1} in colexicographic order."""
    c = sorted(int(x) for x in subset)
    if len(set(c)) != len(c):
        raise ValidationError(f"subset has repeated elements: {subset}")
    return sum(math.comb(ci, i + 1) for i, ci in enumerate(c))


def colex_unrank(rank: int, k: int) -> tuple[int, ...]:
    """Inverse of colex_rank; elements returned in increasing order."""
    r = int(rank)
    if r < 0:
        raise ValidationError("rank must be nonnegative")
    out = []
    for i in range(k, 0, -1):
        x = i - 1
        while math.comb(x + 1, i) <= r:
            x += 1
        out.append(x)
        r -= math.comb(x, i)
    return tuple(reversed(out))


def _colex_subsets(d: int, k: int):
    """All k-subsets of {0..d-1} in colexicographic order."""
    if k == 0:
        yield ()
        return
    for top in range(k - 1, d):
        for rest in _colex_subsets(top, k - 1):
            yield rest + (top,)


# ---------------------------------------------------------------------------
# k-sets: supports of size k, signal mu on the support


@dataclass(frozen=True)
class KSets:
    d: int
    k: int
    kind: str = field(default="ksets", init=False)

    def params(self) -> dict:
        return {"d": self.d, "k": self.k}

    def dimension(self) -> int:
        return self.d

    def count(self) -> int:
        return math.comb(self.d, self.k)

    def uniform_spectrum(self) -> bool:
        return True

    def unit_spectrum(self, j: int) -> list[tuple[float, int]]:
        # Overlap k - s leaves 2s coordinates differing by mu; the number of
        # alternatives at overlap deficit s is C(k, s) * C(d - k, s), which
        # vanishes once s exceeds d - k
        d, k = self.d, self.k
        return [
            (2.0 * s, math.comb(k, s) * math.comb(d - k, s))
            for s in range(1, min(k, d - k) + 1)
        ]

    def support(self, j: int) -> tuple[int, ...]:
        return colex_unrank(j, self.k)

    def unit_pair_sq_dist(self, i: int, j: int) -> float:
        s = self.k - len(set(self.support(i)) & set(self.support(j)))
        return 2.0 * s

    def unit_vector(self, j: int) -> np.ndarray:
        v = np.zeros(self.d)
        v[list(self.support(j))] = 1.0
        return v

    def materialize_unit(self) -> np.ndarray:
        out = np.zeros((self.count(), self.d))
        for j, sub in enumerate(_colex_subsets(self.d, self.k)):
            out[j, list(sub)] = 1.0
        return out


def make_ksets(d: int, k: int, mu: float = 1.0) -> fam.Family:
    d, k = int(d), int(k)
    if d < 2 or not 1 <= k <= d - 1:
        raise ValidationError(f"k-sets needs d >= 2 and 1 <= k <= d-1, got d={d} k={k}")
    return fam.from_structure(KSets(d, k), mu=mu)


# ---------------------------------------------------------------------------
# biclusters: k x k all-ones blocks inside a d x d matrix, flattened row-major


@dataclass(frozen=True)
class Biclusters:
    d: int
    k: int
    kind: str = field(default="biclusters", init=False)

    def params(self) -> dict:
        return {"d": self.d, "k": self.k}

    def dimension(self) -> int:
        return self.d * self.d

    def count(self) -> int:
        return math.comb(self.d, self.k) ** 2

    def uniform_spectrum(self) -> bool:
        return True

    def _split(self, h: int) -> tuple[int, int]:
        c = math.comb(self.d, self.k)
        return divmod(int(h), c)

    def unit_spectrum(self, j: int) -> list[tuple[float, int]]:
        # Row overlap deficit s_r and column deficit s_c flip
        # 2 (k s_r + k s_c - s_r s_c) cells; distinct (s_r, s_c) pairs can
        # collide on that value, so multiplicities are merged.
        d, k = self.d, self.k
        groups: dict[float, int] = {}
        for sr in range(k + 1):
            mr = math.comb(k, sr) * math.comb(d - k, sr)
            for sc in range(k + 1):
                if sr == 0 and sc == 0:
                    continue
                mult = mr * math.comb(k, sc) * math.comb(d - k, sc)
                if mult == 0:  # deficit larger than the off-support pool
                    continue
                val = 2.0 * (k * sr + k * sc - sr * sc)
                groups[val] = groups.get(val, 0) + mult
        return sorted(groups.items())

    def supports(self, h: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        r, c = self._split(h)
        return colex_unrank(r, self.k), colex_unrank(c, self.k)

    def unit_pair_sq_dist(self, i: int, j: int) -> float:
        (ri, ci), (rj, cj) = self.supports(i), self.supports(j)
        sr = self.k - len(set(ri) & set(rj))
        sc = self.k - len(set(ci) & set(cj))
        return 2.0 * (self.k * sr + self.k * sc - sr * sc)

    def unit_vector(self, h: int) -> np.ndarray:
        rs, cs = self.supports(h)
        row = np.zeros(self.d)
        row[list(rs)] = 1.0
        col = np.zeros(self.d)
        col[list(cs)] = 1.0
        return np.outer(row, col).ravel()

    def materialize_unit(self) -> np.ndarray:
        subs = list(_colex_subsets(self.d, self.k))
        out = np.zeros((self.count(), self.d * self.d))
        h = 0
        for rs in subs:
            row = np.zeros(self.d)
            row[list(rs)] = 1.0
            for cs in subs:
                col = np.zeros(self.d)
                col[list(cs)] = 1.0
                out[h] = np.outer(row, col).ravel()
                h += 1
        return out


def make_biclusters(d: int, k: int, mu: float = 1.0) -> fam.Family:
    d, k = int(d), int(k)
    if d < 2 or not 1 <= k <= d - 1:
        raise ValidationError(
            f"biclusters needs d >= 2 and 1 <= k <= d-1, got d={d} k={k}"
        )
    return fam.from_structure(Biclusters(d, k), mu=mu)


# ---------------------------------------------------------------------------
# balanced binary hierarchies over n communities, minimum cluster size m
#
# A hypothesis assigns pair (x, y) the similarity (depth of their lowest
# common cluster + 1); coordinates are the n(n-1) ordered off-diagonal pairs
# in row-major order.  Diagonal entries are identical across hypotheses and
# carry no information, so they are not part of the ambient space.


@dataclass(frozen=True)
class CbmParams:
    n: int
    m: int
    mu: float = 1.0


def _is_pow2(x: int) -> bool:
    return x >= 1 and (x & (x - 1)) == 0


def hierarchy_count(n: int, m: int) -> int:
    """Number of balanced binary hierarchies; exact integer."""
    if n == m:
        return 1
    return math.comb(n - 1, n // 2 - 1) * hierarchy_count(n // 2, m) ** 2


def _enum_hierarchies(members: tuple[int, ...], m: int):
    """Canonical recursive enumeration over a sorted member tuple."""
    if len(members) == m:
        yield members
        return
    first, rest = members[0], members[1:]
    half = len(members) // 2
    for extra in combinations(rest, half - 1):
        left = (first,) + extra
        taken = set(left)
        right = tuple(x for x in members if x not in taken)
        for lt in _enum_hierarchies(left, m):
            for rt in _enum_hierarchies(right, m):
                yield (lt, rt)


def _tree_min(tree) -> int:
    while not isinstance(tree[0], int):
        tree = tree[0]
    return tree[0]


def _tree_canon(tree):
    """Canonical form: children sorted so the min element is on the left."""
    if isinstance(tree[0], int):
        return tuple(sorted(tree))
    a, b = _tree_canon(tree[0]), _tree_canon(tree[1])
    return (a, b) if _tree_min(a) < _tree_min(b) else (b, a)


def _tree_relabel(tree, a: int, b: int):
    if isinstance(tree[0], int):
        return tuple(b if x == a else a if x == b else x for x in tree)
    return (_tree_relabel(tree[0], a, b), _tree_relabel(tree[1], a, b))


def _tree_members(tree) -> list[int]:
    if isinstance(tree[0], int):
        return list(tree)
    return _tree_members(tree[0]) + _tree_members(tree[1])


@dataclass(frozen=True)
class Cbm:
    n: int
    m: int
    kind: str = field(default="cbm", init=False)

    def params(self) -> dict:
        return {"n": self.n, "m": self.m}

    def dimension(self) -> int:
        return self.n * (self.n - 1)

    def count(self) -> int:
        return hierarchy_count(self.n, self.m)

    def uniform_spectrum(self) -> bool:
        # Item relabelings act transitively on hierarchies and permute pair
        # coordinates, so all hypotheses share one spectrum.
        return True

    def _guard(self):
        if self.count() > fam.MATERIALIZE_CAP:
            raise CapabilityError(
                f"{self.count()} hierarchies exceed the materialization cap "
                f"{fam.MATERIALIZE_CAP}; counting and closed-form rates still work"
            )

    @lru_cache(maxsize=None)
    def _trees(self) -> tuple:
        self._guard()
        return tuple(_enum_hierarchies(tuple(range(self.n)), self.m))

    def tree(self, j: int):
        return self._trees()[j]

    def index_of(self, tree) -> int:
        return self._index()[_tree_canon(tree)]

    @lru_cache(maxsize=None)
    def _index(self) -> dict:
        return {t: j for j, t in enumerate(self._trees())}

    def _pair_index(self, x: int, y: int) -> int:
        return x * (self.n - 1) + (y - 1 if y > x else y)

    def _unit_vector_from_tree(self, tree) -> np.ndarray:
        # pair (x, y) gets (depth of the smallest cluster containing both)+1,
        # the root sitting at depth 0
        v = np.zeros(self.dimension())

        def fill(node, depth):
            if isinstance(node[0], int):
                for x in node:
                    for y in node:
                        if x != y:
                            v[self._pair_index(x, y)] = depth + 1.0
                return list(node)
            left = fill(node[0], depth + 1)
            right = fill(node[1], depth + 1)
            for x in left:
                for y in right:
                    v[self._pair_index(x, y)] = depth + 1.0
                    v[self._pair_index(y, x)] = depth + 1.0
            return left + right

        fill(tree, 0)
        return v

    @lru_cache(maxsize=None)
    def _unit_vectors(self) -> np.ndarray:
        out = np.stack([self._unit_vector_from_tree(t) for t in self._trees()])
        out.flags.writeable = False
        return out

    def unit_spectrum(self, j: int) -> list[tuple[float, int]]:
        v = self._unit_vectors()
        diff = v - v[j]
        row = np.einsum("ki,ki->k", diff, diff)
        groups: dict[float, int] = {}
        for k, val in enumerate(row):
            if k == j:
                continue
            groups[float(val)] = groups.get(float(val), 0) + 1
        return sorted(groups.items())

    def unit_pair_sq_dist(self, i: int, j: int) -> float:
        v = self._unit_vectors()
        diff = v[i] - v[j]
        return float(diff @ diff)

    def unit_vector(self, j: int) -> np.ndarray:
        return self._unit_vector_from_tree(self.tree(j))

    def materialize_unit(self) -> np.ndarray:
        return np.array(self._unit_vectors())


def make_cbm_family(params: CbmParams) -> fam.Family:
    n, m = int(params.n), int(params.m)
    if not (_is_pow2(n) and _is_pow2(m) and m <= n):
        raise ValidationError(
            f"hierarchies need powers of two with m <= n, got n={n} m={m}"
        )
    return fam.from_structure(Cbm(n, m), mu=params.mu)


def cbm_swap_perturbations(f: fam.Family, j: int) -> list[int]:
    """Hypothesis indices reached by one elementary swap from hypothesis j.

    An elementary swap exchanges one member of a leaf cluster with one member
    of its sibling leaf cluster.  There are n*m/2 swaps; the returned list has
    that length and keeps duplicates, because at m = 2 complementary swaps
    land on the same hierarchy.
    """
    if not isinstance(f.structure, Cbm):
        raise ValidationError("swap perturbations are defined for hierarchy families")
    s: Cbm = f.structure
    tree = s.tree(j)

    pairs = []

    def visit(node):
        if isinstance(node[0], int):
            return
        l, r = node
        if isinstance(l[0], int) and isinstance(r[0], int):
            pairs.append((l, r))
        visit(l)
        visit(r)

    if isinstance(tree[0], int):
        return []  # n == m: a single cluster has no sibling to swap with
    visit(tree)

    out = []
    for left, right in pairs:
        for a in left:
            for b in right:
                out.append(s.index_of(_tree_relabel(tree, a, b)))
    return out


def cbm_swap_sq_distance(m: int, mu: float) -> float:
    """Squared distance created by one elementary swap.

    The swapped pair keeps its similarity; each of the 2(m-1) other members
    of the two leaf clusters changes similarity with both swapped items, so
    4(m-1) unordered pairs move by mu, i.e. 8(m-1) mu^2 over ordered pairs.
    """
    return 8.0 * (m - 1) * mu**2


# ---------------------------------------------------------------------------
# stars: one hypothesis per vertex, signal on the incident edges


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph; edges keep insertion order (they index the
    ambient coordinates of a star family)."""

    n: int
    edges: tuple[tuple[int, int], ...]

    @lru_cache(maxsize=None)
    def _deg(self) -> tuple[int, ...]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return tuple(deg)

    def degrees(self) -> np.ndarray:
        return np.array(self._deg(), dtype=np.int64)

    def adjacent(self, u: int, v: int) -> bool:
        return (u, v) in self._edge_set() or (v, u) in self._edge_set()

    @lru_cache(maxsize=None)
    def _edge_set(self) -> frozenset:
        return frozenset(self.edges)


def make_graph(n: int, edges) -> Graph:
    n = int(n)
    if n < 1:
        raise ValidationError("graph needs at least one vertex")
    seen = set()
    clean = []
    for e in edges:
        u, v = int(e[0]), int(e[1])
        if not (0 <= u < n and 0 <= v < n):
            raise ValidationError(f"edge ({u}, {v}) out of vertex range [0, {n})")
        if u == v:
            raise ValidationError(f"self-loop at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ValidationError(f"duplicate edge ({u}, {v})")
        seen.add(key)
        clean.append((u, v))
    return Graph(n=n, edges=tuple(clean))


def graph_to_dict(g: Graph) -> dict:
    return {"n": g.n, "edges": [list(e) for e in g.edges]}


def graph_from_dict(data: dict) -> Graph:
    try:
        return make_graph(int(data["n"]), data["edges"])
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"bad graph document: {exc}") from exc


@dataclass(frozen=True)
class Stars:
    graph: Graph
    kind: str = field(default="stars", init=False)

    def params(self) -> dict:
        return graph_to_dict(self.graph)

    def dimension(self) -> int:
        return len(self.graph.edges)

    def count(self) -> int:
        return self.graph.n

    def uniform_spectrum(self) -> bool:
        return False

    def unit_pair_sq_dist(self, i: int, j: int) -> float:
        deg = self.graph._deg()
        shared = 2.0 if self.graph.adjacent(i, j) else 0.0
        return float(deg[i] + deg[j]) - shared

    def unit_spectrum(self, j: int) -> list[tuple[float, int]]:
        groups: dict[float, int] = {}
        for k in range(self.count()):
            if k == j:
                continue
            val = self.unit_pair_sq_dist(j, k)
            groups[val] = groups.get(val, 0) + 1
        return sorted(groups.items())

    def unit_vector(self, j: int) -> np.ndarray:
        v = np.zeros(len(self.graph.edges))
        for e_idx, (a, b) in enumerate(self.graph.edges):
            if a == j or b == j:
                v[e_idx] = 1.0
        return v

    def materialize_unit(self) -> np.ndarray:
        out = np.zeros((self.graph.n, len(self.graph.edges)))
        for e_idx, (u, v) in enumerate(self.graph.edges):
            out[u, e_idx] = 1.0
            out[v, e_idx] = 1.0
        return out


def make_stars(graph: Graph, mu: float = 1.0) -> fam.Family:
    deg = graph.degrees()
    if graph.n < 2:
        raise ValidationError("star family needs at least two vertices")
    if np.any(deg == 0):
        lonely = int(np.argmin(deg))
        raise ValidationError(
            f"vertex {lonely} is isolated; its star carries no signal"
        )
    return fam.from_structure(Stars(graph), mu=mu)


def barabasi_albert(n: int, attach: int, seed: int) -> Graph:
    """Preferential-attachment graph: a complete seed on attach+2 vertices,
    then each new vertex draws ``attach`` distinct neighbors with probability
    proportional to degree (rejection resampling on repeats).

    For n <= attach + 2 this is simply the complete graph on n vertices.
    """
    n, attach = int(n), int(attach)
    if attach < 1 or n < 2:
        raise ValidationError(f"need n >= 2 and attach >= 1, got n={n} attach={attach}")
    rng = RngHandle(seed=int(seed), stream=0).generator()
    m0 = min(n, attach + 2)
    edges = [(u, v) for u in range(m0) for v in range(u + 1, m0)]
    endpoints: list[int] = []
    for u, v in edges:
        endpoints.extend((u, v))
    for v in range(m0, n):
        chosen: set[int] = set()
        while len(chosen) < attach:
            t = endpoints[int(rng.integers(0, len(endpoints)))]
            if t not in chosen:
                chosen.add(t)
        for u in sorted(chosen):
            edges.append((u, v))
            endpoints.extend((u, v))
    return make_graph(n, edges)


# ---------------------------------------------------------------------------
# closed-form separation rates (orders of mu, natural log)


@dataclass(frozen=True)
class RateDescriptor:
    kind: str
    isotropic: float
    budgeted: float | None
    notes: str


def closed_form_rate(kind: str, tau: float | None = None, **params) -> RateDescriptor:
    """Signal scale at which the minimax error transitions, by family kind.

    ``tau`` adds the budgeted variant where one is known.  These are
    order-of-magnitude rates (constants omitted), intended for sanity checks
    and experiment scaling, not as certified bounds.
    """
    if tau is not None and tau <= 0:
        raise ValidationError(f"tau must be positive, got {tau}")
    if kind == "ksets":
        d, k = int(params["d"]), int(params["k"])
        if not 1 <= k <= d - 1:
            raise ValidationError(f"need 1 <= k <= d-1, got d={d} k={k}")
        lg = math.log(k * (d - k)) if k * (d - k) > 1 else 0.0
        iso = math.sqrt(lg)
        bud = math.sqrt(d / tau * lg) if tau is not None else None
        return RateDescriptor(kind, iso, bud, "exact recovery of a k-subset")
    if kind == "biclusters":
        d, k = int(params["d"]), int(params["k"])
        if not 1 <= k <= d - 1:
            raise ValidationError(f"need 1 <= k <= d-1, got d={d} k={k}")
        lg = math.log(k * (d - k)) if k * (d - k) > 1 else 0.0
        iso = math.sqrt(lg / k)
        bud = math.sqrt(d * d / (tau * k) * lg) if tau is not None else None
        return RateDescriptor(kind, iso, bud, "k x k block in a d x d matrix")
    if kind == "cbm":
        n, m = int(params["n"]), int(params["m"])
        if not (_is_pow2(n) and _is_pow2(m) and m <= n):
            raise ValidationError(f"need powers of two with m <= n, got n={n} m={m}")
        lg = math.log(n * m)
        iso = math.sqrt(lg / m)
        bud = math.sqrt(n * n * lg / (m * tau)) if tau is not None else None
        return RateDescriptor(kind, iso, bud, "balanced binary hierarchies")
    if kind == "stars":
        g: Graph = params["graph"]
        deg = g.degrees()
        dmin, dmax = int(deg.min()), int(deg.max())
        if dmin < 1:
            raise ValidationError("star rate needs minimum degree >= 1")
        lg = math.log(g.n - dmin) if g.n - dmin > 1 else 0.0
        iso = math.sqrt(lg / dmin)
        notes = (
            f"assumes bounded degree ratio; here max/min = {dmax / dmin:.3g}"
        )
        return RateDescriptor(kind, iso, None, notes)
    raise ValidationError(f"unknown family kind {kind!r}")


# ---------------------------------------------------------------------------
# JSON registration so family files round-trip through the generic loader


def _build_ksets(params: dict, mu: float) -> fam.Family:
    try:
        return make_ksets(int(params["d"]), int(params["k"]), mu=mu)
    except KeyError as exc:
        raise ValidationError(f"ksets params need d and k: {exc}") from exc


def _build_biclusters(params: dict, mu: float) -> fam.Family:
    try:
        return make_biclusters(int(params["d"]), int(params["k"]), mu=mu)
    except KeyError as exc:
        raise ValidationError(f"biclusters params need d and k: {exc}") from exc


def _build_cbm(params: dict, mu: float) -> fam.Family:
    try:
        return make_cbm_family(CbmParams(n=int(params["n"]), m=int(params["m"]), mu=mu))
    except KeyError as exc:
        raise ValidationError(f"cbm params need n and m: {exc}") from exc


def _build_stars(params: dict, mu: float) -> fam.Family:
    return make_stars(graph_from_dict(params), mu=mu)


fam.register_structure_kind("ksets", _build_ksets)
fam.register_structure_kind("biclusters", _build_biclusters)
fam.register_structure_kind("cbm", _build_cbm)
fam.register_structure_kind("stars", _build_stars)
