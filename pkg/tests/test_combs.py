"""Structural closures and combs: generator inventory at depth zero,
replayable traces, depth monotonicity and saturation, membership
verdicts, comb assembly, and fill against direct circuit oracles.
"""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopt.combs import (
    build_comb,
    check_combs,
    fill,
    generate_structural_closure,
    is_comb,
    replay_trace,
    trace_from_jsonable,
    trace_to_jsonable,
)
from hopt.enrichment import standard_enrichments
from hopt.errors import BoundExceededError, TypeMismatchError, UnsupportedError
from hopt.report import Bounds


@pytest.fixture(scope="module")
def ES():
    return standard_enrichments()["finset_self"]


@pytest.fixture(scope="module")
def ER():
    return standard_enrichments()["finrel_self"]


@pytest.fixture(scope="module")
def EQ():
    return standard_enrichments()["matq_choi"]


@pytest.fixture(scope="module")
def closure2(ES):
    # one deep build shared by the membership tests below
    b = ES.C.obj("b")
    return generate_structural_closure(ES, [b], 2)


def _homs(E):
    b = E.C.obj("b")
    return b, list(E.C.enumerate_homs(b, b))


class TestClosureGeneration:
    def test_depth_zero_is_the_generator_set(self, ES):
        b, homs = _homs(ES)
        c = generate_structural_closure(ES, [b], 0)
        assert len(c) == 9
        assert c.round_sizes == (9,)
        h = ES.hom_ob(b, b)
        assert ES.vid(ES.V.unit()) in c
        assert ES.hom_id(b, b) in c
        assert ES.seq(b, b, b) in c
        assert ES.par(b, b, b, b) in c
        assert ES.V.braid(h, h) in c
        for f in homs:
            assert ES.kappa(f) in c

    def test_generator_traces_replay(self, ES):
        b = ES.C.obj("b")
        c = generate_structural_closure(ES, [b], 0)
        for m, rec in c.members.items():
            assert rec.born == 0
            assert replay_trace(ES, rec.trace) == m

    def test_round_sizes_are_deterministic(self, ES):
        b = ES.C.obj("b")
        c1 = generate_structural_closure(ES, [b], 1)
        c2 = generate_structural_closure(ES, [b], 1)
        assert len(c1) == 243
        assert c1.round_sizes == (9, 243)
        assert list(c1.members) == list(c2.members)
        for m in c1.members:
            assert c1.trace(m) == c2.trace(m)

    def test_members_monotone_in_depth(self, ES, closure2):
        b = ES.C.obj("b")
        small = generate_structural_closure(ES, [b], 1)
        for m in small.members:
            assert m in closure2

    def test_born_within_depth_and_replay(self, ES, closure2):
        step = max(1, len(closure2) // 97)
        for k, (m, rec) in enumerate(closure2.members.items()):
            if k % step:
                continue
            assert 0 <= rec.born <= 2
            assert replay_trace(ES, rec.trace) == m

    def test_width_two_closure_saturates(self, ES, closure2):
        b = ES.C.obj("b")
        c = generate_structural_closure(ES, [b], 4)
        # round three adds nothing, so depths two through four coincide
        assert c.round_sizes[2] == c.round_sizes[3] == c.round_sizes[4]
        assert len(c) == len(closure2)
        assert any("saturated" in n for n in c.notes)

    def test_member_cap_is_enforced(self, ES):
        b = ES.C.obj("b")
        with pytest.raises(BoundExceededError):
            generate_structural_closure(ES, [b], 1,
                                        Bounds(member_cap=3))

    def test_negative_depth_rejected(self, ES):
        b = ES.C.obj("b")
        with pytest.raises(ValueError):
            generate_structural_closure(ES, [b], -1)

    def test_finrel_kappa_basis_is_truncated(self, ER):
        b = ER.C.obj("b")
        c = generate_structural_closure(ER, [b], 0, Bounds(samples=2))
        assert len(c) == 7
        assert any("truncated" in n for n in c.notes)

    def test_matq_kappa_basis_is_matrix_units(self, EQ):
        q2 = EQ.C.obj("q2")
        c = generate_structural_closure(EQ, [q2], 0)
        assert any("matrix units" in n for n in c.notes)
        for i in range(2):
            for j in range(2):
                assert EQ.kappa(EQ.C.matrix_unit(q2, q2, i, j)) in c


class TestIsComb:
    def test_kappa_states_are_generators(self, ES):
        b, homs = _homs(ES)
        for f in homs:
            ok, tr = is_comb(ES, ES.kappa(f), 0)
            assert ok
            assert tr[:2] == ("gen", "kappa")
            assert replay_trace(ES, tr) == ES.kappa(f)

    def test_finrel_unsampled_kappa_recognized(self, ER):
        b = ER.C.obj("b")
        full = ER.C.from_indices(b, b, [(0, 0), (0, 1), (1, 0), (1, 1)])
        assert full not in list(ER.C.enumerate_homs(b, b))[:4]
        ok, tr = is_comb(ER, ER.kappa(full), 0)
        assert ok
        assert replay_trace(ER, tr) == ER.kappa(full)

    def test_matq_kappa_recognized(self, EQ):
        q2 = EQ.C.obj("q2")
        f = next(iter(EQ.C.enumerate_homs(q2, q2, samples=3, seed=9)))
        ok, tr = is_comb(EQ, EQ.kappa(f), 0)
        assert ok
        assert replay_trace(EQ, tr) == EQ.kappa(f)

    def test_prepost_shapes_appear_by_depth_two(self, ES):
        b, homs = _homs(ES)
        for f in homs:
            for g in homs:
                target = ES.hom_map(f, g)
                ok, tr = is_comb(ES, target, 2, objects=[b])
                assert ok, (f, g)
                assert replay_trace(ES, tr) == target

    def test_verdict_is_depth_bounded(self, ES):
        b, homs = _homs(ES)
        pre = ES.V.compose(
            ES.seq(b, b, b),
            ES.V.tensor(ES.kappa(homs[2]), ES.hom_id(b, b)))
        assert is_comb(ES, pre, 0, objects=[b]) == (False, None)
        ok, tr = is_comb(ES, pre, 1, objects=[b])
        assert ok
        assert replay_trace(ES, tr) == pre

    def test_two_hole_comb_found_by_depth_three(self, ER):
        b = ER.C.obj("b")
        g = list(ER.C.enumerate_homs(b, b))[1]
        comb = build_comb(ER, [g, g, g], [(b, b), (b, b)])
        ok, tr = is_comb(ER, comb.morphism, 3, objects=[b],
                         bounds=Bounds(samples=2))
        assert ok
        assert replay_trace(ER, tr) == comb.morphism

    def test_squaring_map_not_found_to_depth_four(self, ES):
        # conjugation shapes are the only reachable endomaps of the
        # function object, and m -> m o m is not one of them
        b = ES.C.obj("b")
        V = ES.C
        H = ES.hom_ob(b, b)
        idx = V.index(b)

        def sq(t):
            v = t[0]
            return (tuple(v[idx[v[i]]] for i in range(len(v))),)

        sqm = V.make(H, H, {t: sq(t) for t in V.carrier(H)})
        assert is_comb(ES, sqm, 4, objects=[b],
                       bounds=Bounds(member_cap=60_000)) == (False, None)

    def test_probe_from_another_model_rejected(self, ES, ER):
        b = ER.C.obj("b")
        rel = next(iter(ER.C.enumerate_homs(b, b)))
        with pytest.raises(TypeMismatchError):
            is_comb(ES, rel, 1)


class TestBuildComb:
    def test_zero_holes_is_a_kappa_state(self, ES):
        b, homs = _homs(ES)
        comb = build_comb(ES, [homs[2]], [])
        assert comb.depth == 0
        assert comb.morphism == ES.kappa(homs[2])
        assert replay_trace(ES, comb.trace) == comb.morphism
        assert fill(ES, comb, []) == comb.morphism

    def test_identity_spine_yields_hom_identity(self, ES):
        b = ES.C.obj("b")
        i = ES.C.identity(b)
        comb = build_comb(ES, [i, i], [(b, b)])
        assert comb.morphism == ES.hom_id(b, b)

    def test_depths_and_ancilla_inference(self, ES):
        b, homs = _homs(ES)
        c1 = build_comb(ES, homs[:2], [(b, b)])
        assert c1.depth == 2
        assert [w.is_unit for w in c1.ancillas] == [True]
        c2 = build_comb(ES, homs[:3], [(b, b), (b, b)])
        assert c2.depth == 3
        assert c2.morphism.dom == ES.hom_ob(b, b) @ ES.hom_ob(b, b)
        assert c2.morphism.cod == ES.hom_ob(b, b)

    def test_spine_count_must_exceed_holes_by_one(self, ES):
        b, homs = _homs(ES)
        with pytest.raises(TypeMismatchError):
            build_comb(ES, [homs[0]], [(b, b)])

    def test_segment_boundaries_checked(self, ES):
        b = ES.C.obj("b")
        t = ES.C.obj("t")
        homs_bt = list(ES.C.enumerate_homs(b, t))
        homs_bb = list(ES.C.enumerate_homs(b, b))
        # segment 0 lands in t, so it cannot feed a (b, b) hole
        with pytest.raises(TypeMismatchError):
            build_comb(ES, [homs_bt[0], homs_bb[0]], [(b, b)])
        # segment 1 must accept the hole output
        with pytest.raises(TypeMismatchError):
            build_comb(ES, [homs_bb[0], homs_bt[0]], [(t, b)])

    def test_spine_must_live_in_the_base_model(self, ES):
        b, homs = _homs(ES)
        with pytest.raises(TypeMismatchError):
            build_comb(ES, [ES.kappa(homs[0]), homs[0]], [(b, b)])

    def test_built_combs_are_closure_members(self, ES, closure2):
        b, homs = _homs(ES)
        c1 = build_comb(ES, [homs[2], homs[0]], [(b, b)])
        c2 = build_comb(ES, [homs[2], homs[3], homs[2]],
                        [(b, b), (b, b)])
        for comb in (c1, c2):
            rec = closure2.lookup(comb.morphism)
            assert rec is not None
            assert replay_trace(ES, rec.trace) == comb.morphism
            assert replay_trace(ES, comb.trace) == comb.morphism

    def test_one_hole_comb_found_at_construction_depth(self, ES):
        b, homs = _homs(ES)
        comb = build_comb(ES, [homs[2], homs[0]], [(b, b)])
        ok, tr = is_comb(ES, comb.morphism, comb.depth, objects=[b])
        assert ok
        assert replay_trace(ES, tr) == comb.morphism


class TestFill:
    def test_one_hole_fill_matches_circuit(self, ES):
        b, homs = _homs(ES)
        swap, const0 = homs[2], homs[0]
        comb = build_comb(ES, [swap, swap], [(b, b)])
        got = fill(ES, comb, [const0])
        # swap o const0 o swap is constant one
        assert got.payload == ((((1,), (1,)),),)
        assert got == ES.kappa(
            ES.C.compose(swap, ES.C.compose(const0, swap)))

    def test_fill_accepts_kappa_states(self, ES):
        b, homs = _homs(ES)
        comb = build_comb(ES, [homs[2], homs[1]], [(b, b)])
        assert fill(ES, comb, [ES.kappa(homs[3])]) == \
            fill(ES, comb, [homs[3]])

    def test_ancilla_comb_fill_matches_wired_circuit(self, ES):
        m = ES.C
        b = m.obj("b")
        copy = m.make(b, b @ b, {(0,): (0, 0), (1,): (1, 1)})
        swap2 = m.make(b @ b, b @ b,
                       {(x, y): (y, x) for x in range(2) for y in range(2)})
        xor = m.make(b @ b, b,
                     {(x, y): ((x + y) % 2,)
                      for x in range(2) for y in range(2)})
        comb = build_comb(ES, [copy, swap2, xor], [(b, b), (b, b)])
        assert [w.atoms for w in comb.ancillas] == [("b",), ("b",)]
        idb = m.identity(b)
        _, homs = _homs(ES)
        for f1, f2 in ((homs[2], homs[1]), (homs[1], homs[1])):
            got = fill(ES, comb, [f1, f2])
            circ = m.compose(xor, m.compose(
                m.tensor(idb, f2), m.compose(
                    swap2, m.compose(m.tensor(idb, f1), copy))))
            assert got == ES.kappa(circ)

    def test_finrel_and_matq_fill_match_circuit(self, ER, EQ):
        for E in (ER, EQ):
            basis = E.C.obj("b") if E is ER else E.C.obj("q2")
            homs = list(E.C.enumerate_homs(basis, basis, samples=4,
                                           seed=3)) \
                if E is EQ else \
                list(E.C.enumerate_homs(basis, basis))[:4]
            g0, g1, g2 = homs[1], homs[2], homs[3]
            comb = build_comb(E, [g0, g1, g2],
                              [(basis, basis), (basis, basis)])
            f1, f2 = homs[2], homs[1]
            got = fill(E, comb, [f1, f2])
            circ = E.C.compose(g2, E.C.compose(f2, E.C.compose(
                g1, E.C.compose(f1, g0))))
            assert got == E.kappa(circ), E.name

    def test_filler_count_must_match(self, ES):
        b, homs = _homs(ES)
        comb = build_comb(ES, homs[:2], [(b, b)])
        with pytest.raises(TypeMismatchError):
            fill(ES, comb, [])
        with pytest.raises(TypeMismatchError):
            fill(ES, comb, [homs[0], homs[1]])

    def test_ill_typed_filler_rejected(self, ES):
        b = ES.C.obj("b")
        t = ES.C.obj("t")
        homs = list(ES.C.enumerate_homs(b, b))
        comb = build_comb(ES, homs[:2], [(b, b)])
        with pytest.raises(TypeMismatchError):
            fill(ES, comb, [next(iter(ES.C.enumerate_homs(b, t)))])


class TestFillProperties:
    @settings(max_examples=40, deadline=None)
    @given(idx=st.tuples(*(st.integers(0, 3),) * 5))
    def test_unit_ancilla_fill_is_the_plugged_circuit(self, idx):
        E = standard_enrichments()["finset_self"]
        b = E.C.obj("b")
        homs = list(E.C.enumerate_homs(b, b))
        g0, g1, g2, f1, f2 = (homs[i] for i in idx)
        comb = build_comb(E, [g0, g1, g2], [(b, b), (b, b)])
        circ = E.C.compose(g2, E.C.compose(f2, E.C.compose(
            g1, E.C.compose(f1, g0))))
        assert fill(E, comb, [f1, f2]) == E.kappa(circ)


class TestTraceSerialization:
    def test_trace_json_roundtrip_replays(self, ES):
        b, homs = _homs(ES)
        comb = build_comb(ES, homs[:3], [(b, b), (b, b)])
        wire = json.dumps(trace_to_jsonable(comb.trace))
        back = trace_from_jsonable(json.loads(wire))
        assert back == comb.trace
        assert replay_trace(ES, back) == comb.morphism

    def test_closure_member_trace_roundtrip(self, ES, closure2):
        m, rec = next(iter(closure2.members.items()))
        back = trace_from_jsonable(json.loads(
            json.dumps(trace_to_jsonable(rec.trace))))
        assert replay_trace(ES, back) == m

    def test_unknown_trace_rejected(self, ES):
        with pytest.raises(UnsupportedError):
            replay_trace(ES, ("splice", 1, 2))


class TestSuite:
    def test_finset_suite_passes(self, ES):
        rep = check_combs(ES)
        assert rep.passed, rep.violations[:3]
        assert rep.cases_total >= 600

    def test_finrel_suite_passes(self, ER):
        rep = check_combs(ER)
        assert rep.passed, rep.violations[:3]
        assert rep.cases_total >= 400
        assert any("truncated" in n for n in rep.notes)

    def test_matq_suite_passes(self, EQ):
        rep = check_combs(EQ)
        assert rep.passed, rep.violations[:3]
        assert rep.cases_total >= 400
