"""Structure-preserving functor checks: the raising endofunctor with
its gamma hom cell, composites, and the idempotent-splitting model.
"""

import itertools

import pytest

from hopt.enrichment import (
    check_enriched_laws,
    check_kappa_bijection,
    standard_enrichments,
)
from hopt.kernel import is_idempotent
from hopt.pmcat import (
    KaroubiModel,
    check_pm,
    compose_pm,
    gamma_layer,
    is_fully_faithful,
    karoubi,
    karoubi_embedding,
    raising_functor,
)
from hopt.report import Bounds

SMALL = Bounds(max_size=2)
KSMALL = Bounds(max_size=2, karoubi_cap=2)


@pytest.fixture(scope="module")
def ES():
    return standard_enrichments()["finset_self"]


@pytest.fixture(scope="module")
def ER():
    return standard_enrichments()["finrel_self"]


@pytest.fixture(scope="module")
def EQ():
    return standard_enrichments()["matq_choi"]


class TestGammaAndRaising:
    def test_gamma_boundary(self, ES):
        b = ES.C.obj("b")
        t = ES.C.obj("t")
        I = ES.C.unit()
        g = gamma_layer(ES, b, t)
        assert g.dom == ES.hom_ob(I, ES.hom_ob(b, t))
        assert g.cod == ES.hom_ob(ES.hom_ob(I, b), ES.hom_ob(I, t))

    def test_gamma_names_raised_arrows(self, ES):
        # P1 shape by hand: gamma . R(k f) . u = k(R f)
        m = ES.C
        b = m.obj("b")
        I = m.unit()
        u = ES.kappa(m.identity(I))
        g = gamma_layer(ES, b, b)
        for f in m.enumerate_homs(b, b):
            lifted = ES.hom_map(m.identity(I), ES.kappa(f))
            lhs = m.compose(g, m.compose(lifted, u))
            rhs = ES.kappa(ES.hom_map(m.identity(I), f))
            assert lhs == rhs

    def test_raising_pm_all_models(self, ES, ER, EQ):
        for E in (ES, ER, EQ):
            rep = check_pm(raising_functor(E), SMALL)
            assert rep.passed, (E.name, rep.violations[:3])
            assert rep.cases_total > 50

    def test_raising_composed_with_itself(self, ES):
        R = raising_functor(ES)
        rep = check_pm(compose_pm(R, R), Bounds(max_size=2))
        assert rep.passed, rep.violations[:3]


class TestKaroubiModel:
    def test_hom_count_after_split(self, ES):
        m = ES.C
        t = m.obj("t")
        e = m.make(t, t, {(0,): (0,), (1,): (0,), (2,): (2,)})
        assert is_idempotent(m, e)
        K = KaroubiModel(m)
        X = K.split(t, e)
        homs = K.enumerate_homs(X, X)
        assert len(homs) == 4

    def test_identity_is_the_idempotent(self, ES):
        m = ES.C
        t = m.obj("t")
        e = m.make(t, t, {(0,): (0,), (1,): (0,), (2,): (2,)})
        K = KaroubiModel(m)
        X = K.split(t, e)
        assert K.identity(X).payload == e.payload

    def test_braid_roundtrip(self, ES):
        m = ES.C
        b = m.obj("b")
        t = m.obj("t")
        e = m.make(t, t, {(0,): (0,), (1,): (0,), (2,): (2,)})
        K = KaroubiModel(m)
        X = K.split(t, e)
        Y = K.split(b, m.identity(b))
        fwd = K.braid(X, Y)
        back = K.braid(Y, X)
        assert K.compose(back, fwd) == K.identity(X @ Y)
        assert K.compose(fwd, back) == K.identity(Y @ X)

    def test_make_rejects_unabsorbed(self, ES):
        from hopt.errors import ShapeMismatchError
        m = ES.C
        t = m.obj("t")
        e = m.make(t, t, {(0,): (0,), (1,): (0,), (2,): (2,)})
        K = KaroubiModel(m)
        X = K.split(t, e)
        stray = m.make(t, t, {(0,): (1,), (1,): (1,), (2,): (1,)})
        with pytest.raises(ShapeMismatchError):
            K.make(X, X, stray)

    def test_absorb_projects(self, ES):
        m = ES.C
        t = m.obj("t")
        e = m.make(t, t, {(0,): (0,), (1,): (0,), (2,): (2,)})
        K = KaroubiModel(m)
        X = K.split(t, e)
        stray = m.make(t, t, {(0,): (1,), (1,): (1,), (2,): (1,)})
        a = K.absorb(X, X, stray)
        assert K.compose(a, K.identity(X)) == a
        assert K.compose(K.identity(X), a) == a


class TestKaroubiEnrichment:
    def test_laws_finset(self, ES):
        rep = check_enriched_laws(karoubi(ES), KSMALL)
        assert rep.passed, rep.violations[:3]
        assert rep.cases_total > 500

    def test_laws_finrel(self, ER):
        rep = check_enriched_laws(karoubi(ER), KSMALL)
        assert rep.passed, rep.violations[:3]

    def test_laws_matq(self, EQ):
        rep = check_enriched_laws(
            karoubi(EQ), Bounds(max_size=2, karoubi_cap=2, samples=3))
        assert rep.passed, rep.violations[:3]

    def test_kappa_bijection_split(self, ES):
        rep = check_kappa_bijection(karoubi(ES), KSMALL)
        assert rep.passed, rep.violations[:3]

    def test_split_inventory_shape(self, ES):
        KE = karoubi(ES)
        objs = KE.objects(KSMALL)
        assert objs[0].is_unit
        assert all(a[0] == "split" for o in objs[1:] for a in o.atoms)
        assert len(objs) >= 4


class TestEmbedding:
    def test_embedding_pm_finset(self, ES):
        rep = check_pm(karoubi_embedding(ES), SMALL)
        assert rep.passed, rep.violations[:3]

    def test_embedding_pm_finrel(self, ER):
        rep = check_pm(karoubi_embedding(ER), SMALL)
        assert rep.passed, rep.violations[:3]

    def test_embedding_fully_faithful(self, ES, ER):
        for E in (ES, ER):
            rep = is_fully_faithful(karoubi_embedding(E), SMALL)
            assert rep.passed, (E.name, rep.violations[:3])

    def test_embedding_then_raising_shape(self, ES):
        # composite pm data across different targets typechecks and
        # passes on a tiny inventory
        R = raising_functor(ES)
        Emb = karoubi_embedding(ES)
        comp = compose_pm(Emb, R)
        rep = check_pm(comp, Bounds(max_size=1))
        assert rep.passed, rep.violations[:3]
