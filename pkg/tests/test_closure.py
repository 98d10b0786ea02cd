"""Closure layer: eval/curry against hand values, the couniversal
property with exhaustive uniqueness, and the rebuilt-enrichment check.
"""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopt.closure import (
    ClosedDerived,
    check_closed_determines_enrichment,
    check_couniversal,
    check_linked,
    curry,
    eval_morphism,
    native_curry,
    native_eval,
    uncurry,
    _uncurry_full_rank,
)
from hopt.enrichment import standard_enrichments
from hopt.report import Bounds

SMALL = Bounds(max_size=2)


@pytest.fixture(scope="module")
def ES():
    return standard_enrichments()["finset_self"]


@pytest.fixture(scope="module")
def ER():
    return standard_enrichments()["finrel_self"]


@pytest.fixture(scope="module")
def EQ():
    return standard_enrichments()["matq_choi"]


def _xor(m, b):
    return m.make(b @ b, b, {
        (0, 0): (0,), (0, 1): (1,), (1, 0): (1,), (1, 1): (0,)})


class TestEval:
    def test_eval_applies_table(self, ES):
        m = ES.C
        b = m.obj("b")
        t = m.obj("t")
        ev = eval_morphism(ES, b, t)
        for f in m.enumerate_homs(b, t):
            s = ES.kappa(f)
            for a in m.carrier(b):
                tok = a + s.payload[0]
                assert ev.apply(tok) == f.apply(a)

    def test_eval_equals_native_everywhere(self, ES, ER, EQ):
        for E in (ES, ER, EQ):
            objs = E.objects(SMALL)
            for A in objs:
                for B in objs:
                    assert eval_morphism(E, A, B) == \
                        native_eval(E, A, B), (E.name, A, B)


class TestCurry:
    def test_xor_curry_is_id_and_not(self, ES):
        m = ES.C
        b = m.obj("b")
        cur = curry(ES, _xor(m, b), b, b)
        id_tab = ((0,), (1,))
        not_tab = ((1,), (0,))
        assert cur.apply((0,)) == (id_tab,)
        assert cur.apply((1,)) == (not_tab,)

    def test_xor_curry_unique_among_16(self, ES):
        m = ES.C
        b = m.obj("b")
        f = _xor(m, b)
        cur = curry(ES, f, b, b)
        candidates = m.enumerate_homs(b, ES.hom_ob(b, b))
        assert len(candidates) == 16
        hits = [g for g in candidates if uncurry(ES, g, b) == f]
        assert hits == [cur]

    def test_uncurry_curry_roundtrip_all_16(self, ES):
        m = ES.C
        b = m.obj("b")
        for f in m.enumerate_homs(b @ b, b):
            assert uncurry(ES, curry(ES, f, b, b), b) == f

    def test_finrel_curry_reindexes(self, ER):
        m = ER.C
        b = m.obj("b")
        r = m.from_indices(b @ b, b, [(0, 1), (3, 0)])
        cur = curry(ER, r, b, b)
        # (a,c) -> b becomes c -> (a,b): (0,0)->1 gives (0,(0,1));
        # (1,1)->0 gives (1,(1,0))
        assert cur.payload == frozenset({(0, 1), (1, 2)})
        assert cur == native_curry(ER, r, b, b)

    def test_matq_curry_restacks_entries(self, EQ):
        m = EQ.C
        q2 = m.obj("q2")
        f = m.make(q2 @ q2, q2,
                   [[1, 2, 3, 4], [5, 6, 7, 8]])
        cur = curry(EQ, f, q2, q2)
        v = cur.payload
        # column c holds vec of the slice a -> f[b, a*2+c]
        assert [v[i, 0] for i in range(4)] == [1, 5, 3, 7]
        assert [v[i, 1] for i in range(4)] == [2, 6, 4, 8]
        assert cur == native_curry(EQ, f, q2, q2)

    def test_curry_equals_native_on_samples(self, EQ):
        m = EQ.C
        q2 = m.obj("q2")
        q3 = m.obj("q3")
        for f in m.enumerate_homs(q2 @ q3, q2, samples=6, seed=5):
            assert curry(EQ, f, q2, q3) == native_curry(EQ, f, q2, q3)


class TestSuites:
    def test_linked_all(self, ES, ER, EQ):
        for E in (ES, ER, EQ):
            rep = check_linked(E, SMALL)
            assert rep.passed, (E.name, rep.violations[:3])

    def test_couniversal_all(self, ES, ER, EQ):
        for E in (ES, ER, EQ):
            rep = check_couniversal(E, SMALL)
            assert rep.passed, (E.name, rep.violations[:3])
            assert rep.cases_total > 100

    def test_couniversal_deep_instance_count(self, ES):
        rep = check_couniversal(ES, Bounds(max_size=2, expr_len=3))
        assert rep.passed
        assert rep.cases_total >= 1024

    def test_rank_route_is_exact(self, EQ):
        m = EQ.C
        q2, q3 = m.obj("q2"), m.obj("q3")
        for A, C_, B in itertools.product((q2, q3), repeat=3):
            assert _uncurry_full_rank(EQ, A, C_, B)

    def test_closed_rebuild_all(self, ES, ER, EQ):
        for E in (ES, ER, EQ):
            rep = check_closed_determines_enrichment(E, SMALL)
            assert rep.passed, (E.name, rep.violations[:3])

    def test_rebuilt_enrichment_satisfies_laws(self, ES):
        from hopt.enrichment import check_enriched_laws
        rep = check_enriched_laws(ClosedDerived(ES), SMALL)
        assert rep.passed, rep.violations[:3]


class TestCurryProperties:
    @settings(max_examples=30, deadline=None)
    @given(tab=st.lists(st.integers(0, 1), min_size=4, max_size=4))
    def test_finset_roundtrip(self, tab):
        E = standard_enrichments()["finset_self"]
        m = E.C
        b = m.obj("b")
        f = m.make(b @ b, b,
                   {(a, c): (tab[a * 2 + c],)
                    for a in range(2) for c in range(2)})
        assert uncurry(E, curry(E, f, b, b), b) == f

    @settings(max_examples=30, deadline=None)
    @given(mask=st.integers(0, 255))
    def test_finrel_roundtrip(self, mask):
        E = standard_enrichments()["finrel_self"]
        m = E.C
        b = m.obj("b")
        cells = [(i, j) for i in range(4) for j in range(2)]
        r = m.from_indices(b @ b, b,
                           [cells[k] for k in range(8) if mask >> k & 1])
        assert uncurry(E, curry(E, r, b, b), b) == r
