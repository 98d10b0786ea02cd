"""Enrichment structure maps against hand-computed values, then the
law checker itself (including its ability to fail on a corrupted seq).
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopt.enrichment import (
    FinRelSelf,
    FinSetSelf,
    MatQChoi,
    check_enriched_laws,
    check_faithful,
    check_hom_functor,
    check_kappa_bijection,
    partial_insertion,
    standard_enrichments,
    usage_theta,
    usage_theta_at,
)
from hopt.kernel import FinRelModel, FinSetModel, MatQModel
from hopt.ratmat import RatMat
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


def _b(E):
    return E.C.obj("b")


class TestFinSetStructure:
    def test_hom_carrier_counts(self, ES):
        b = _b(ES)
        t = ES.C.obj("t")
        assert ES.C.size(ES.hom_ob(b, b)) == 4
        assert ES.C.size(ES.hom_ob(b, t)) == 9
        assert ES.C.size(ES.hom_ob(t, b)) == 8

    def test_seq_on_two_nots_names_identity(self, ES):
        b = _b(ES)
        m = ES.C
        nt = m.make(b, b, {(0,): (1,), (1,): (0,)})
        got = m.compose(ES.seq(b, b, b),
                        m.tensor(ES.kappa(nt), ES.kappa(nt)))
        assert got == ES.kappa(m.identity(b))

    def test_kappa_roundtrip(self, ES):
        b = _b(ES)
        t = ES.C.obj("t")
        for f in ES.C.enumerate_homs(b, t):
            s = ES.kappa(f)
            assert s.dom.is_unit
            assert ES.kappa_inv(s) == f

    def test_hom_map_conjugates(self, ES):
        b = _b(ES)
        m = ES.C
        nt = m.make(b, b, {(0,): (1,), (1,): (0,)})
        for f in m.enumerate_homs(b, b):
            moved = m.compose(ES.hom_map(nt, nt), ES.kappa(f))
            assert moved == ES.kappa(m.compose(nt, m.compose(f, nt)))

    def test_eta_is_iso(self, ES):
        t = ES.C.obj("t")
        e = ES.eta(t)
        assert ES.C.compose(ES.eta_inv(t), e) == ES.C.identity(t)
        assert ES.C.compose(e, ES.eta_inv(t)) == \
            ES.C.identity(ES.hom_ob(ES.C.unit(), t))


class TestFinRelStructure:
    def test_state_count_is_two_to_ab(self, ER):
        b = _b(ER)
        hob = ER.hom_ob(b, b)
        states = ER.V.enumerate_homs(ER.V.unit(), hob)
        assert len(states) == 16
        arrows = ER.C.enumerate_homs(b, b)
        assert len(arrows) == 16
        assert len({ER.kappa(r).canon() for r in arrows}) == 16

    def test_seq_composes_names(self, ER):
        b = _b(ER)
        m = ER.C
        r = m.from_indices(b, b, [(0, 1)])
        s = m.from_indices(b, b, [(1, 0)])
        got = m.compose(ER.seq(b, b, b),
                        m.tensor(ER.kappa(r), ER.kappa(s)))
        assert got == ER.kappa(m.compose(s, r))
        assert m.compose(s, r).payload == frozenset({(0, 0)})

    def test_hom_map_is_converse_tensor(self, ER):
        b = _b(ER)
        m = ER.C
        p = m.from_indices(b, b, [(0, 1), (1, 1)])
        q = m.from_indices(b, b, [(0, 0)])
        hm = ER.hom_map(p, q)
        assert hm.payload == m.tensor(m.converse(p), q).payload


class TestMatQStructure:
    def test_kappa_is_column_major_vec(self, EQ):
        q2 = EQ.C.obj("q2")
        f = EQ.C.make(q2, q2, [[1, 2], [3, 4]])
        v = EQ.kappa(f).payload
        assert [v[i, 0] for i in range(4)] == [1, 3, 2, 4]

    def test_seq_applied_to_vecs_is_vec_of_composite(self, EQ):
        q2 = EQ.C.obj("q2")
        m = EQ.C
        f = m.make(q2, q2, [[1, 2], [3, 4]])
        g = m.make(q2, q2, [[0, 1], [1, 0]])
        got = m.compose(EQ.seq(q2, q2, q2),
                        m.tensor(EQ.kappa(f), EQ.kappa(g)))
        v = got.payload
        assert [v[i, 0] for i in range(4)] == [3, 1, 4, 2]
        assert got == EQ.kappa(m.compose(g, f))

    def test_hom_map_is_transpose_kron(self, EQ):
        q2 = EQ.C.obj("q2")
        m = EQ.C
        p = m.make(q2, q2, [[1, 2], [3, 4]])
        q = m.make(q2, q2, [[0, 1], [1, 0]])
        hm = EQ.hom_map(p, q)
        assert hm.payload == p.payload.transpose().kron(q.payload)
        f = m.make(q2, q2, [[5, 0], [1, 1]])
        assert m.compose(hm, EQ.kappa(f)) == \
            EQ.kappa(m.compose(q, m.compose(f, p)))

    def test_kappa_inv_roundtrip(self, EQ):
        q2 = EQ.C.obj("q2")
        q3 = EQ.C.obj("q3")
        f = EQ.C.make(q2, q3, [[1, 2], [0, 1], [3, 0]])
        s = EQ.kappa(f)
        assert EQ.kappa_inv(s, dom=q2, cod=q3) == f


class TestLaws:
    def test_finset_laws_small(self, ES):
        rep = check_enriched_laws(ES, SMALL)
        assert rep.passed, rep.violations[:3]
        assert rep.cases_total > 500

    def test_finrel_laws_small(self, ER):
        rep = check_enriched_laws(ER, SMALL)
        assert rep.passed, rep.violations[:3]

    def test_matq_laws_small(self, EQ):
        rep = check_enriched_laws(EQ, Bounds(max_size=2, samples=3))
        assert rep.passed, rep.violations[:3]
        assert any("samples" in n for n in rep.notes)

    def test_corrupted_seq_fails(self, ES):
        rep = check_enriched_laws(ES, SMALL, inject="seq")
        assert not rep.passed
        laws = {v.law for v in rep.violations}
        assert laws & {"L1", "L2-left", "L2-right", "L3", "L7"}
        assert rep.violations[0].lhs != rep.violations[0].rhs

    def test_corrupted_seq_fails_finrel(self, ER):
        rep = check_enriched_laws(ER, SMALL, inject="seq")
        assert not rep.passed

    def test_corrupted_seq_fails_matq(self, EQ):
        rep = check_enriched_laws(EQ, Bounds(max_size=2, samples=2),
                                  inject="seq")
        assert not rep.passed


class TestBijectionAndFunctor:
    def test_kappa_bijection_all(self, ES, ER, EQ):
        for E in (ES, ER, EQ):
            rep = check_kappa_bijection(E, SMALL)
            assert rep.passed, (E.name, rep.violations[:3])

    def test_hom_functor_all(self, ES, ER, EQ):
        for E in (ES, ER, EQ):
            rep = check_hom_functor(E, SMALL)
            assert rep.passed, (E.name, rep.violations[:3])


class TestDerived:
    def test_insertion_of_identity_is_identity(self, ES, ER, EQ):
        for E in (ES, ER, EQ):
            objs = E.objects(SMALL)
            for X in objs:
                for Y in objs:
                    for Z in objs:
                        d = partial_insertion(E, X, X, Y, Z)
                        got = E.V.compose(
                            d,
                            E.V.tensor(E.kappa(E.C.identity(X)),
                                       E.hom_id(Y @ X, Z)))
                        assert got == E.hom_id(Y @ X, Z), (E.name, X, Y, Z)

    def test_insertion_matches_precomposition(self, ES, ER, EQ):
        # Delta . (k f x k g) = k(g . (id_Y x f))
        for E in (ES, ER, EQ):
            m = E.C
            A = m.obj("b") if E.name != "matq_choi" else m.obj("q2")
            X, Y, Z = A, A, A
            fs = m.enumerate_homs(A, X, samples=3, seed=1) \
                if E.name == "matq_choi" else m.enumerate_homs(A, X)
            gs = m.enumerate_homs(Y @ X, Z, samples=3, seed=2) \
                if E.name == "matq_choi" else m.enumerate_homs(Y @ X, Z)
            d = partial_insertion(E, A, X, Y, Z)
            for f in fs:
                for g in gs:
                    lhs = E.V.compose(
                        d, E.V.tensor(E.kappa(f), E.kappa(g)))
                    rhs = E.kappa(
                        m.compose(g, m.tensor(m.identity(Y), f)))
                    assert lhs == rhs, E.name

    def test_theta_on_named_state(self, ES):
        m = ES.C
        b = m.obj("b")
        t = m.obj("t")
        for f in m.enumerate_homs(b, t):
            S = ES.kappa(f)
            th = usage_theta(ES, S)
            assert th == ES.hom_map(m.identity(m.unit()), f)

    def test_theta_at_finrel(self, ER):
        m = ER.C
        b = m.obj("b")
        r = m.from_indices(b, b, [(0, 1), (1, 1)])
        th = usage_theta_at(ER, ER.kappa(r), b, b)
        assert th == ER.hom_map(m.identity(m.unit()), r)

    def test_faithful_all(self, ES, ER, EQ):
        for E in (ES, ER, EQ):
            rep = check_faithful(E, SMALL)
            assert rep.passed, (E.name, rep.violations[:3])
            assert rep.cases_total > 0


class TestLawPropertyInstances:
    @settings(max_examples=40, deadline=None)
    @given(ft=st.lists(st.integers(0, 1), min_size=2, max_size=2),
           gt=st.lists(st.integers(0, 1), min_size=2, max_size=2))
    def test_finset_naming_composites(self, ft, gt):
        E = standard_enrichments()["finset_self"]
        m = E.C
        b = m.obj("b")
        f = m.make(b, b, {(i,): (ft[i],) for i in range(2)})
        g = m.make(b, b, {(i,): (gt[i],) for i in range(2)})
        lhs = E.kappa(m.compose(g, f))
        rhs = m.compose(E.seq(b, b, b),
                        m.tensor(E.kappa(f), E.kappa(g)))
        assert lhs == rhs

    @settings(max_examples=40, deadline=None)
    @given(data=st.data())
    def test_matq_naming_tensors(self, data):
        E = standard_enrichments()["matq_choi"]
        m = E.C
        q2 = m.obj("q2")
        ent = st.fractions(min_value=-2, max_value=2,
                           max_denominator=3)
        f = m.make(q2, q2, [[data.draw(ent) for _ in range(2)]
                            for _ in range(2)])
        g = m.make(q2, q2, [[data.draw(ent) for _ in range(2)]
                            for _ in range(2)])
        lhs = E.kappa(m.tensor(f, g))
        rhs = m.compose(E.par(q2, q2, q2, q2),
                        m.tensor(E.kappa(f), E.kappa(g)))
        assert lhs == rhs
