"""Family zoo: k-sets, biclusters, block hierarchies, stars, rates."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from snm import family as fam
from snm import zoo
from snm.errors import CapabilityError, ValidationError


# --- colexicographic indexing ----------------------------------------------


def test_colex_first_ranks():
    # 2-subsets of {0..3} in colex order
    order = [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)]
    for r, s in enumerate(order):
        assert zoo.colex_rank(s) == r
        assert zoo.colex_unrank(r, 2) == s


@given(st.sets(st.integers(min_value=0, max_value=30), min_size=1, max_size=5))
def test_colex_round_trip(subset):
    s = tuple(sorted(subset))
    assert zoo.colex_unrank(zoo.colex_rank(s), len(s)) == s


def test_colex_matches_sorted_enumeration():
    subsets = sorted(itertools.combinations(range(7), 3), key=zoo.colex_rank)
    for r, s in enumerate(subsets):
        assert zoo.colex_rank(s) == r
    assert len(subsets) == math.comb(7, 3)


# --- k-sets -----------------------------------------------------------------


def test_ksets_validation():
    with pytest.raises(ValidationError):
        zoo.make_ksets(4, 0)
    with pytest.raises(ValidationError):
        zoo.make_ksets(4, 4)
    with pytest.raises(ValidationError):
        zoo.make_ksets(1, 1)


def test_ksets_count_and_order():
    f = zoo.make_ksets(5, 2)
    assert f.M == 10
    vs = fam.vectors(f)
    # row r is the indicator of the r-th colex subset
    for r in range(10):
        sup = tuple(np.flatnonzero(vs[r]))
        assert zoo.colex_rank(sup) == r
        assert vs[r].sum() == 2


def test_ksets_distance_is_twice_symmetric_difference():
    mu = 1.7
    f = zoo.make_ksets(6, 3, mu=mu)
    vs = fam.vectors(f)
    for a in range(f.M):
        for b in range(f.M):
            sa = set(np.flatnonzero(vs[a]))
            sb = set(np.flatnonzero(vs[b]))
            s = len(sa - sb)
            want = 2.0 * s * mu * mu
            assert fam.pairwise_sq_distance(f, a, b) == pytest.approx(want)


def test_ksets_spectrum_small_case():
    # d=5, k=2: 6 neighbors at one swap, 3 at two swaps
    f = zoo.make_ksets(5, 2)
    assert fam.distance_spectrum(f, 0).entries == ((2.0, 6), (4.0, 3))


def test_ksets_spectrum_counts_are_binomial_products():
    for d, k in [(6, 2), (8, 3), (9, 1)]:
        f = zoo.make_ksets(d, k)
        want = tuple(
            (2.0 * s, math.comb(k, s) * math.comb(d - k, s))
            for s in range(1, min(k, d - k) + 1)
        )
        assert fam.distance_spectrum(f, 0).entries == want


# --- biclusters -------------------------------------------------------------


def test_biclusters_count_and_row_major_order():
    f = zoo.make_biclusters(4, 2)
    c = math.comb(4, 2)
    assert f.M == c * c
    # hypothesis index = row_rank * C + col_rank, vector = outer product
    for h in (0, 7, 20, 35):
        rr, cc = divmod(h, c)
        rows = zoo.colex_unrank(rr, 2)
        cols = zoo.colex_unrank(cc, 2)
        want = np.zeros((4, 4))
        for i in rows:
            for j in cols:
                want[i, j] = 1.0
        assert np.array_equal(fam.hypothesis_vector(f, h), want.ravel())


def test_biclusters_spectrum_matches_brute_force():
    f = zoo.make_biclusters(4, 2, mu=0.9)
    vs = fam.vectors(f)
    for j in (0, 17, 35):
        want = oracles.brute_spectrum(vs, j)
        got = fam.distance_spectrum(f, j).entries
        assert len(got) == len(want)
        for (gv, gc), (wv, wc) in zip(got, want):
            assert gc == wc and gv == pytest.approx(wv, rel=1e-12)


def test_biclusters_spectrum_values_strictly_increase():
    # (sr, sc) pairs with equal k*sr + k*sc - sr*sc must be merged
    f = zoo.make_biclusters(6, 2)
    vals = [v for v, _ in fam.distance_spectrum(f, 0).entries]
    assert all(b > a for a, b in zip(vals, vals[1:]))


# --- block hierarchies ------------------------------------------------------


def test_hierarchy_count_values():
    assert zoo.hierarchy_count(4, 2) == 3
    assert zoo.hierarchy_count(8, 4) == 35
    assert zoo.hierarchy_count(16, 8) == 6435
    assert zoo.hierarchy_count(8, 2) == 315
    assert zoo.hierarchy_count(2, 2) == 1
    assert zoo.hierarchy_count(4, 4) == 1


def test_cbm_validation():
    with pytest.raises(ValidationError):
        zoo.make_cbm_family(zoo.CbmParams(6, 2, 1.0))  # n not a power of two
    with pytest.raises(ValidationError):
        zoo.make_cbm_family(zoo.CbmParams(4, 8, 1.0))  # m > n


def test_cbm_dimension_is_ordered_offdiagonal_pairs():
    f = zoo.make_cbm_family(zoo.CbmParams(4, 2, 1.0))
    assert f.d == 4 * 3
    assert f.M == 3


def test_cbm_first_vector_frozen():
    # similarity 2 for the sibling of each leaf, 1 across the root split
    f = zoo.make_cbm_family(zoo.CbmParams(4, 2, 1.0))
    v0 = fam.hypothesis_vector(f, 0)
    assert v0.tolist() == [2, 1, 1, 2, 1, 1, 1, 1, 2, 1, 1, 2]


def test_cbm_entries_symmetric_and_scaled():
    mu = 2.5
    f = zoo.make_cbm_family(zoo.CbmParams(8, 4, mu))
    vs = fam.vectors(f)
    n = 8

    def pair_index(x, y):
        return x * (n - 1) + (y - 1 if y > x else y)

    for v in vs:
        for x in range(n):
            for y in range(n):
                if x == y:
                    continue
                assert v[pair_index(x, y)] == v[pair_index(y, x)]
        # n=8, m=4 has two merge levels: across the root (value mu) and
        # within a block of four (value 2 mu)
        assert set(np.unique(v).tolist()) == {mu, 2 * mu}


def test_cbm_trees_distinct_and_counted():
    for n, m in [(4, 2), (8, 4), (8, 2)]:
        f = zoo.make_cbm_family(zoo.CbmParams(n, m, 1.0))
        vs = fam.vectors(f)
        assert vs.shape[0] == zoo.hierarchy_count(n, m)
        seen = {v.tobytes() for v in vs}
        assert len(seen) == vs.shape[0]


def test_cbm_swap_count_and_distance():
    for n, m in [(4, 2), (8, 2), (8, 4)]:
        mu = 1.25
        f = zoo.make_cbm_family(zoo.CbmParams(n, m, mu))
        vs = fam.vectors(f)
        want = zoo.cbm_swap_sq_distance(m, mu)
        assert want == pytest.approx(8 * (m - 1) * mu * mu)
        for j in range(f.M):
            neigh = zoo.cbm_swap_perturbations(f, j)
            assert len(neigh) == n * m // 2
            for k in neigh:
                assert k != j
                got = float(np.sum((vs[j] - vs[k]) ** 2))
                assert got == pytest.approx(want, rel=1e-12)


def test_cbm_swap_multiplicity_at_smallest_block():
    # with two leaves per block, swapping either pairing lands on the same
    # hierarchy, so the nm/2 perturbations cover nm/4 distinct neighbors
    f = zoo.make_cbm_family(zoo.CbmParams(4, 2, 1.0))
    neigh = zoo.cbm_swap_perturbations(f, 0)
    assert len(neigh) == 4
    assert len(set(neigh)) == 2
    g = zoo.make_cbm_family(zoo.CbmParams(8, 4, 1.0))
    neigh = zoo.cbm_swap_perturbations(g, 0)
    assert len(neigh) == 16
    assert len(set(neigh)) == 16


def test_cbm_materialization_guard():
    f = zoo.make_cbm_family(zoo.CbmParams(16, 2, 1.0))  # ~6.4e8 hierarchies
    assert f.M == 638512875
    with pytest.raises(CapabilityError):
        fam.vectors(f)


# --- graphs and stars -------------------------------------------------------


def test_make_graph_validation():
    with pytest.raises(ValidationError):
        zoo.make_graph(3, [(0, 0)])
    with pytest.raises(ValidationError):
        zoo.make_graph(3, [(0, 1), (1, 0)])
    with pytest.raises(ValidationError):
        zoo.make_graph(3, [(0, 3)])


def test_stars_vectors_are_incident_edges():
    g = zoo.make_graph(3, [(0, 1), (1, 2)])
    f = zoo.make_stars(g, mu=2.0)
    assert f.d == 2 and f.M == 3
    assert fam.vectors(f).tolist() == [[2, 0], [2, 2], [0, 2]]


def test_stars_distances_follow_degree_formula():
    g = zoo.make_graph(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
    mu = 1.5
    f = zoo.make_stars(g, mu=mu)
    deg = g.degrees()
    for a in range(4):
        for b in range(a + 1, 4):
            adj = 2 if g.adjacent(a, b) else 0
            want = mu * mu * (deg[a] + deg[b] - adj)
            assert fam.pairwise_sq_distance(f, a, b) == pytest.approx(want)


def test_stars_reject_isolated_vertex():
    g = zoo.make_graph(3, [(0, 1)])
    with pytest.raises(ValidationError):
        zoo.make_stars(g)


def test_barabasi_albert_size_and_shape():
    g = zoo.barabasi_albert(13, 3, seed=7)
    assert g.n == 13
    assert len(g.edges) == 34  # complete 5-seed (10) plus 8 arrivals x 3
    flat = [v for e in g.edges for v in e]
    assert all(0 <= v < 13 for v in flat)
    assert len(set(g.edges)) == 34
    assert all(a < b for a, b in g.edges)
    assert int(g.degrees().sum()) == 68


def test_barabasi_albert_deterministic_per_seed():
    a = zoo.barabasi_albert(13, 3, seed=11)
    b = zoo.barabasi_albert(13, 3, seed=11)
    c = zoo.barabasi_albert(13, 3, seed=12)
    assert a.edges == b.edges
    assert a.edges != c.edges


def test_graph_json_round_trip():
    g = zoo.barabasi_albert(9, 2, seed=3)
    h = zoo.graph_from_dict(zoo.graph_to_dict(g))
    assert g.n == h.n and g.edges == h.edges


# --- closed-form rates ------------------------------------------------------


def test_rate_ksets_formulas():
    r = zoo.closed_form_rate("ksets", d=8, k=2)
    assert r.isotropic == pytest.approx(math.sqrt(math.log(2 * 6)))
    assert r.budgeted is None
    r = zoo.closed_form_rate("ksets", tau=4.0, d=8, k=2)
    assert r.budgeted == pytest.approx(math.sqrt(8 / 4.0 * math.log(12)))


def test_rate_biclusters_and_cbm():
    r = zoo.closed_form_rate("biclusters", tau=32.0, d=8, k=2)
    assert r.isotropic == pytest.approx(math.sqrt(math.log(12) / 2))
    assert r.budgeted == pytest.approx(math.sqrt(64 / (32.0 * 2) * math.log(12)))
    r = zoo.closed_form_rate("cbm", tau=10.0, n=8, m=4)
    assert r.isotropic == pytest.approx(math.sqrt(math.log(32) / 4))
    assert r.budgeted == pytest.approx(math.sqrt(64 * math.log(32) / (4 * 10.0)))


def test_rate_stars_uses_min_degree():
    g = zoo.make_graph(3, [(0, 1), (1, 2)])
    r = zoo.closed_form_rate("stars", graph=g)
    assert r.isotropic == pytest.approx(math.sqrt(math.log(2) / 1))
    assert "max/min" in r.notes


def test_rate_validation():
    with pytest.raises(ValidationError):
        zoo.closed_form_rate("ksets", tau=-1.0, d=4, k=1)
    with pytest.raises(ValidationError):
        zoo.closed_form_rate("nothing", d=4)
