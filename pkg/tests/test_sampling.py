"""Seeded observation sampling and weighted maximum-likelihood decoding."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from snm import family as fam
from snm import sampling as smp
from snm import zoo
from snm.errors import CapabilityError, ValidationError

SEED = 90210


def two_point(delta):
    return fam.from_vectors(np.array([[0.0, 0.0], [delta, 0.0]]))


# --- rng handles ------------------------------------------------------------


def test_rng_same_key_same_draws():
    a = smp.RngHandle(SEED, 3).generator().normal(size=16)
    b = smp.RngHandle(SEED, 3).generator().normal(size=16)
    assert np.array_equal(a, b)


def test_rng_streams_differ():
    a = smp.RngHandle(SEED, 0).generator().normal(size=16)
    b = smp.RngHandle(SEED, 1).generator().normal(size=16)
    assert not np.array_equal(a, b)


def test_rng_rejects_negative_keys():
    with pytest.raises(ValidationError):
        smp.RngHandle(-1, 0).generator()
    with pytest.raises(ValidationError):
        smp.RngHandle(0, -5).generator()


def test_substream_is_stable():
    h = smp.RngHandle(SEED, 0)
    assert h.substream(7) == smp.RngHandle(SEED, 7)


# --- design strategies ------------------------------------------------------


def test_design_validation():
    with pytest.raises(ValidationError):
        smp.DesignStrategy(np.array([1.0, -0.5]))
    with pytest.raises(ValidationError):
        smp.DesignStrategy(np.array([np.nan, 1.0]))


def test_design_budget_is_the_sum():
    b = smp.DesignStrategy(np.array([0.5, 1.5, 0.0]))
    assert b.tau == pytest.approx(2.0)
    with pytest.raises(ValueError):
        b.B[0] = 9.0  # stored array is read-only


def test_uniform_design_examples():
    b = smp.uniform_design(4, 8.0)
    assert b.B.tolist() == [2.0, 2.0, 2.0, 2.0]
    assert b.tau == 8.0
    with pytest.raises(ValidationError):
        smp.uniform_design(0, 1.0)
    with pytest.raises(ValidationError):
        smp.uniform_design(4, -1.0)


def test_design_dict_round_trip():
    b = smp.DesignStrategy(np.array([1.0, 3.0]))
    d = b.to_dict()
    assert smp.design_from_dict(d).B.tolist() == [1.0, 3.0]
    d["tau"] = 99.0  # declared budget must match the weights
    with pytest.raises(ValidationError):
        smp.design_from_dict(d)


# --- observation sampling ---------------------------------------------------


def test_zero_energy_coordinate_is_exactly_zero():
    f = two_point(3.0)
    b = smp.DesignStrategy(np.array([2.0, 0.0]))
    ys = smp.sample_batch(f, 1, 500, smp.RngHandle(SEED, 0), design=b)
    assert np.all(ys[:, 1] == 0.0)
    assert np.all(ys[:, 0] != 0.0)


def test_observation_moments_match_design():
    # mean within 4 / sqrt(B * n), variance within 10% of 1/B
    n, bval, mean = 10**5, 2.0, 3.0
    f = fam.from_vectors(np.array([[mean, 0.0]]))
    b = smp.DesignStrategy(np.array([bval, 1.0]))
    ys = smp.sample_batch(f, 0, n, smp.RngHandle(SEED, 1), design=b)
    assert abs(ys[:, 0].mean() - mean) < 4.0 / math.sqrt(bval * n)
    assert abs(ys[:, 0].var() - 1.0 / bval) < 0.1 / bval


def test_isotropic_unit_variance():
    n = 10**5
    f = fam.from_vectors(np.array([[0.0, 0.0]]))
    ys = smp.sample_batch(f, 0, n, smp.RngHandle(SEED, 2))
    assert abs(ys[:, 0].var() - 1.0) < 0.02
    assert abs(ys[:, 1].mean()) < 4.0 / math.sqrt(n)


def test_sampling_reproducible_bit_exact():
    f = zoo.make_ksets(5, 2, mu=1.0)
    h = smp.RngHandle(SEED, 4)
    a = smp.sample_batch(f, 3, 64, h)
    b = smp.sample_batch(f, 3, 64, smp.RngHandle(SEED, 4))
    assert a.tobytes() == b.tobytes()


def test_observation_serialization():
    f = two_point(1.0)
    obs = smp.sample_observation(f, 1, smp.RngHandle(SEED, 5))
    d = obs.to_dict()
    assert d["hypothesis"] == 1
    assert d["B"] == "isotropic"
    b = smp.DesignStrategy(np.array([1.0, 2.0]))
    d2 = smp.sample_observation(f, 0, smp.RngHandle(SEED, 6), design=b).to_dict()
    assert d2["B"] == [1.0, 2.0]


# --- decoding ---------------------------------------------------------------


def test_decode_exact_vector_returns_its_index():
    f = zoo.make_ksets(6, 2, mu=1.5)
    vs = fam.vectors(f)
    for j in (0, 4, 14):
        assert smp.mle_decode(f, vs[j]) == j


def test_decode_simple_comparison():
    f = two_point(2.0)
    assert smp.mle_decode(f, np.array([0.9, 0.0])) == 0
    assert smp.mle_decode(f, np.array([1.1, 0.0])) == 1


def test_decode_tie_goes_to_lowest_index():
    f = fam.from_vectors(np.array([[0.0], [2.0]]))
    assert smp.mle_decode(f, np.array([1.0])) == 0


def test_decode_dimension_mismatch():
    f = two_point(1.0)
    with pytest.raises(ValidationError):
        smp.mle_decode(f, np.array([1.0, 2.0, 3.0]))


def test_decode_accepts_observation_and_design_override():
    f = two_point(2.0)
    b = smp.DesignStrategy(np.array([0.0, 1.0]))  # coordinate 0 carries nothing
    obs = smp.sample_observation(f, 1, smp.RngHandle(SEED, 7), design=b)
    j = smp.mle_decode(f, obs)
    # under that design both hypotheses project to the same point; tie -> 0
    assert j == 0
    assert smp.mle_decode(f, np.array([1.9, 0.0]), design=None) == 1


@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_decode_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    vs = rng.normal(size=(6, 4))
    f = fam.from_vectors(vs)
    y = rng.normal(size=4)
    w = rng.uniform(0.1, 2.0, size=4)
    assert smp.mle_decode(f, y) == oracles.decode_brute(vs, y)
    b = smp.DesignStrategy(w)
    assert smp.mle_decode(f, y, design=b) == oracles.decode_brute(vs, y, weights=w)


@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_decode_translation_invariant(seed):
    rng = np.random.default_rng(seed)
    vs = rng.normal(size=(5, 3))
    shift = rng.normal(size=3) * 10.0
    y = rng.normal(size=3)
    f = fam.from_vectors(vs)
    g = fam.from_vectors(vs + shift)
    assert smp.mle_decode(f, y) == smp.mle_decode(g, y + shift)


@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_uniform_weights_decode_like_isotropic(seed):
    rng = np.random.default_rng(seed)
    vs = rng.normal(size=(5, 3))
    y = rng.normal(size=3)
    f = fam.from_vectors(vs)
    b = smp.DesignStrategy(np.full(3, 2.7))
    assert smp.mle_decode(f, y, design=b) == smp.mle_decode(f, y)


def test_decode_cap_refusal():
    f = zoo.make_cbm_family(zoo.CbmParams(16, 2, 1.0))  # M ~ 6.4e8
    with pytest.raises(CapabilityError):
        smp.mle_decode(f, np.zeros(16 * 15))


def test_two_hypothesis_error_rate_matches_gaussian_tail():
    # at separation 2 the decode error rate is Phi(-1)
    delta, n = 2.0, 20000
    f = two_point(delta)
    ys = smp.sample_batch(f, 0, n, smp.RngHandle(SEED, 8))
    wrong = sum(smp.mle_decode(f, y) != 0 for y in ys)
    p = wrong / n
    target = oracles.phi(-delta / 2)
    se = math.sqrt(target * (1 - target) / n)
    assert abs(p - target) <= 3 * se
