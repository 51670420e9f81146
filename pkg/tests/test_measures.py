import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import oracle
from dsmrel.measures import apant, apsyn, clarke_de, cos_weeds, cosine, inv_cl, lin, weeds_prec
from dsmrel.space import TopContexts

DIM = 30
weights = st.floats(min_value=1e-3, max_value=50.0, allow_nan=False, allow_infinity=False)
vectors = st.dictionaries(st.integers(0, DIM - 1), weights, max_size=20)
nonempty = st.dictionaries(st.integers(0, DIM - 1), weights, min_size=1, max_size=20)

PAIRWISE = {
    "cosine": (cosine, oracle.cosine),
    "lin": (lin, oracle.lin),
    "weeds_prec": (weeds_prec, oracle.weeds_prec),
    "clarke_de": (clarke_de, oracle.clarke_de),
    "cos_weeds": (cos_weeds, oracle.cos_weeds),
    "inv_cl": (inv_cl, oracle.inv_cl),
}


def ranked(ids, n=None):
    return TopContexts(None, n or len(ids), [(c, float(len(ids) - k)) for k, c in enumerate(ids)])


A, B, C, D = 0, 1, 2, 3


class TestExamples:
    def test_cosine(self):
        assert cosine({A: 1.0, B: 1.0}, {A: 1.0, C: 1.0}) == pytest.approx(0.5, abs=1e-15)
        assert cosine({A: 2.0, B: 3.0}, {A: 2.0, B: 3.0}) == pytest.approx(1.0, abs=1e-15)
        assert cosine({A: 1.0}, {B: 1.0}) == 0.0
        assert cosine({}, {A: 1.0}) == 0.0

    def test_lin(self):
        assert lin({A: 1.0, B: 2.0}, {B: 3.0, C: 1.0}) == pytest.approx(5 / 7, abs=1e-15)
        assert lin({A: 1.0, B: 2.0}, {A: 1.0, B: 2.0}) == 1.0
        assert lin({A: 1.0}, {B: 1.0}) == 0.0
        assert lin({}, {}) == 0.0

    def test_weeds_prec(self):
        assert weeds_prec({A: 2.0, B: 1.0}, {B: 5.0}) == pytest.approx(1 / 3, abs=1e-15)
        assert weeds_prec({A: 2.0}, {A: 0.1, B: 9.0}) == 1.0
        assert weeds_prec({A: 1.0}, {B: 1.0}) == 0.0
        assert weeds_prec({}, {A: 1.0}) == 0.0

    def test_clarke_de(self):
        assert clarke_de({A: 2.0, B: 1.0}, {B: 5.0}) == pytest.approx(1 / 3, abs=1e-15)
        assert clarke_de({A: 2.0, B: 1.0}, {A: 2.0, B: 1.0}) == 1.0
        assert clarke_de({A: 1.0}, {B: 1.0}) == 0.0

    def test_cos_weeds(self):
        assert cos_weeds({A: 1.0, B: 1.0}, {A: 1.0, C: 1.0}) == pytest.approx(0.5, abs=1e-15)
        assert cos_weeds({A: 1.0, B: 2.0}, {A: 1.0, B: 2.0}) == pytest.approx(1.0, abs=1e-15)
        assert cos_weeds({A: 1.0}, {B: 1.0}) == 0.0

    def test_inv_cl(self):
        assert inv_cl({A: 2.0, B: 1.0}, {B: 5.0}) == pytest.approx(math.sqrt(4 / 15), abs=1e-15)
        assert inv_cl({A: 2.0, B: 1.0}, {B: 5.0}) == pytest.approx(0.5164, abs=1e-4)
        assert inv_cl({A: 2.0, B: 1.0}, {A: 2.0, B: 1.0}) == 0.0
        assert inv_cl({A: 1.0}, {B: 1.0}) == 0.0

    def test_apsyn_identical_lists_is_harmonic_number(self):
        assert apsyn(ranked([A, B, C]), ranked([A, B, C])) == pytest.approx(1 + 1 / 2 + 1 / 3, abs=1e-15)

    def test_apsyn_partial_overlap(self):
        value = apsyn(ranked([A, B, C]), ranked([B, D, A]))
        assert value == pytest.approx(0.5 + 2 / 3, abs=1e-15)
        assert apant(value) == pytest.approx(1 / (1 + 0.5 + 2 / 3), abs=1e-15)
        assert apant(value) == pytest.approx(0.4615, abs=1e-4)

    def test_apsyn_empty_intersection(self):
        assert apsyn(ranked([A, B]), ranked([C, D])) == 0.0
        assert apsyn(ranked([], 5), ranked([A], 5)) == 0.0

    def test_apsyn_rejects_mismatched_n(self):
        with pytest.raises(ValueError):
            apsyn(ranked([A], 100), ranked([A], 1000))

    def test_apant(self):
        assert apant(0.0) == 1.0
        assert apant(1.0) == 0.5
        with pytest.raises(ValueError):
            apant(-0.1)


@settings(max_examples=300, deadline=None)
@given(vectors, vectors)
def test_matches_dense_oracle(u, v):
    du, dv = oracle.dense(u, DIM), oracle.dense(v, DIM)
    for name, (fast, slow) in PAIRWISE.items():
        assert fast(u, v) == pytest.approx(slow(du, dv), rel=1e-12, abs=1e-15), name


@settings(max_examples=300, deadline=None)
@given(vectors, vectors)
def test_ranges_and_symmetry(u, v):
    for name, (fn, _) in PAIRWISE.items():
        assert 0.0 <= fn(u, v) <= 1.0, name
    assert cosine(u, v) == pytest.approx(cosine(v, u), rel=1e-12, abs=1e-15)
    assert lin(u, v) == pytest.approx(lin(v, u), rel=1e-12, abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(nonempty, vectors)
def test_inclusion_extremes(u, extra):
    v = {**extra, **{c: w * 0.5 for c, w in u.items()}}
    assert weeds_prec(u, v) == 1.0
    bigger = {**extra, **{c: w * 2.0 for c, w in u.items()}}
    assert clarke_de(u, bigger) == 1.0
    # some weight of u above v's value breaks full inclusion for clarke_de
    assert clarke_de(u, v) < 1.0


@settings(max_examples=200, deadline=None)
@given(nonempty, nonempty, st.floats(min_value=0.01, max_value=100.0))
def test_scale_behaviour(u, v, alpha):
    scaled = {c: alpha * w for c, w in u.items()}
    assert cosine(scaled, v) == pytest.approx(cosine(u, v), rel=1e-12, abs=1e-15)
    assert weeds_prec(scaled, v) == pytest.approx(weeds_prec(u, v), rel=1e-12, abs=1e-15)


def test_directional_witness():
    u, v = {A: 2.0, B: 1.0}, {B: 5.0}
    assert weeds_prec(u, v) != weeds_prec(v, u)
    assert clarke_de(u, v) != clarke_de(v, u)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 40), unique=True, max_size=15),
       st.lists(st.integers(0, 40), unique=True, max_size=15))
def test_apsyn_symmetric_bounded_and_matches_oracle(t1, t2):
    n = 15
    a, b = ranked(t1, n), ranked(t2, n)
    value = apsyn(a, b)
    assert value == pytest.approx(apsyn(b, a), rel=1e-12)
    assert value == pytest.approx(oracle.apsyn(t1, t2), rel=1e-12, abs=1e-15)
    assert 0.0 <= value <= sum(1 / r for r in range(1, n + 1)) + 1e-12
    assert 0.0 < apant(value) <= 1.0


@given(st.floats(min_value=0, max_value=1e6), st.floats(min_value=0, max_value=1e6))
def test_apant_strictly_decreasing(x, y):
    assume(x < y and apant(x) != apant(y))
    assert apant(x) > apant(y)
