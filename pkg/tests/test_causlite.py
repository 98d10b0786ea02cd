"""Classical non-signalling channel spaces: membership, composite
laws for the sequential-composition matrix, preservation certificates
with generator fallback, and the exactness of every result path.
"""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopt.causlite import (
    CausType,
    check_causlite,
    check_supermap_preserves,
    choi_vector,
    copy_across,
    correlated_noise,
    deterministic_choi,
    first_order_type,
    hom_type,
    ns_tensor,
    random_stochastic,
    seq_supermap,
)
from hopt.enrichment import get_enrichment
from hopt.errors import (
    LawViolationError,
    ShapeMismatchError,
    TypeMismatchError,
)
from hopt.ratmat import RatMat
from hopt.report import Bounds

ONE = Fraction(1)
HALF = Fraction(1, 2)


class TestFirstOrder:
    def test_probability_simplex(self):
        P = first_order_type(2)
        assert P.system == ((ONE, ONE, ONE),)
        assert [g.entries for g in P.generators] == \
            [{(0, 0): ONE}, {(1, 0): ONE}]
        assert P.contains([HALF, HALF])
        assert not P.contains([ONE, ONE])
        assert not P.contains([Fraction(2), Fraction(-1)])

    def test_unit_type_has_one_state(self):
        P = first_order_type(1)
        assert P.contains([ONE])
        assert not P.contains([Fraction(1, 2)])

    def test_dimension_must_be_positive(self):
        with pytest.raises(ValueError):
            first_order_type(0)

    def test_floats_never_coerced(self):
        with pytest.raises(TypeError):
            first_order_type(2).contains([0.5, 0.5])

    def test_bad_generator_rejected_at_construction(self):
        bad = RatMat(2, 1)
        bad.entries = {(0, 0): Fraction(2)}
        with pytest.raises(LawViolationError):
            CausType("bad", 2, ("state", 2),
                     [[ONE, ONE, ONE]], [bad])


class TestHomType:
    def test_deterministic_generators(self):
        H = hom_type(2, 2)
        assert len(H.generators) == 4
        assert deterministic_choi(2, 2, (0, 1)).entries == \
            {(0, 0): ONE, (3, 0): ONE}
        for g in H.generators:
            assert H.contains(g)

    def test_stochastic_membership(self):
        H = hom_type(2, 2)
        assert H.contains(choi_vector([[HALF, HALF], [HALF, HALF]]))
        # first column sums to two
        assert not H.contains(choi_vector([[1, 1], [1, 0]]))

    def test_choi_naming_matches_kappa(self):
        E = get_enrichment("matq_choi")
        q2 = E.C.obj("q2")
        f = E.C.make(q2, q2, [[0, 1], [1, 0]])
        assert choi_vector(f) == E.kappa(f).payload

    def test_generator_list_capped(self):
        assert hom_type(2, 2, gen_cap=3).generators == ()


class TestSeqSupermap:
    def test_matches_enrichment_wiring(self):
        E = get_enrichment("matq_choi")
        q2, q3 = E.C.obj("q2"), E.C.obj("q3")
        assert seq_supermap(2, 2, 2) == E.seq(q2, q2, q2).payload
        assert seq_supermap(2, 3, 2) == E.seq(q2, q3, q2).payload

    def test_entries_are_boolean(self):
        S = seq_supermap(2, 3, 2)
        assert all(v == ONE for v in S.entries.values())
        assert seq_supermap(1, 1, 1).entries == {(0, 0): ONE}

    def test_composes_deterministic_exhaustively(self):
        S = seq_supermap(2, 2, 2)
        for ft in itertools.product(range(2), repeat=2):
            for gt in itertools.product(range(2), repeat=2):
                got = S * deterministic_choi(2, 2, ft).kron(
                    deterministic_choi(2, 2, gt))
                want = deterministic_choi(
                    2, 2, (gt[ft[0]], gt[ft[1]]))
                assert got == want, (ft, gt)

    def test_identity_pair_composes_to_identity(self):
        S = seq_supermap(2, 2, 2)
        vid = deterministic_choi(2, 2, (0, 1))
        assert S * vid.kron(vid) == vid

    @settings(max_examples=30, deadline=None)
    @given(a=st.integers(1, 3), b=st.integers(1, 3),
           c=st.integers(1, 3), seed=st.integers(0, 10_000))
    def test_composes_stochastic(self, a, b, c, seed):
        import random
        rng = random.Random(seed)
        f = random_stochastic(a, b, rng)
        g = random_stochastic(b, c, rng)
        got = seq_supermap(a, b, c) * choi_vector(f).kron(choi_vector(g))
        assert got == choi_vector(g * f)


class TestNsTensor:
    def test_needs_hom_types(self):
        with pytest.raises(TypeMismatchError):
            ns_tensor(first_order_type(2), hom_type(2, 2))

    def test_product_channels_are_members(self):
        NS = ns_tensor(hom_type(2, 2), hom_type(2, 2))
        assert len(NS.generators) == 16
        for g in NS.generators:
            assert NS.contains(g)

    def test_copy_across_rejected(self):
        NS = ns_tensor(hom_type(2, 2), hom_type(2, 2))
        assert not NS.contains(copy_across(2))

    def test_correlated_noise_is_member(self):
        NS = ns_tensor(hom_type(2, 2), hom_type(2, 2))
        assert NS.contains(correlated_noise())

    def test_membership_iff_product_exhaustive(self):
        NS = ns_tensor(hom_type(2, 2), hom_type(2, 2))
        seen = [0, 0]
        for table in itertools.product(
                itertools.product(range(2), repeat=2), repeat=4):
            v = RatMat(16, 1)
            v.entries = {
                ((a * 2 + table[a * 2 + b][0]) * 4
                 + (b * 2 + table[a * 2 + b][1]), 0): ONE
                for a in range(2) for b in range(2)}
            prod = (all(table[a * 2 + b][0] == table[a * 2][0]
                        for a in range(2) for b in range(2))
                    and all(table[a * 2 + b][1] == table[b][1]
                            for a in range(2) for b in range(2)))
            assert NS.contains(v) == prod, table
            seen[prod] += 1
        assert seen == [240, 16]

    def test_mixed_dimensions(self):
        NS = ns_tensor(hom_type(1, 2), hom_type(2, 1))
        assert NS.dim == 4
        for g in NS.generators:
            assert NS.contains(g)


class TestPreservationCertificate:
    def test_seq_preserves_ns_into_hom(self):
        for a, b, c in itertools.product(range(1, 3), repeat=3):
            src = ns_tensor(hom_type(a, b), hom_type(b, c))
            v = check_supermap_preserves(
                seq_supermap(a, b, c), src, hom_type(a, c))
            assert v.status == "PASS", (a, b, c, v)
            assert v.passed

    def test_seq_preserves_at_dimension_three(self):
        src = ns_tensor(hom_type(3, 3), hom_type(3, 3))
        v = check_supermap_preserves(
            seq_supermap(3, 3, 3), src, hom_type(3, 3))
        assert v.status == "PASS"

    def test_identity_on_same_type_passes(self):
        H = hom_type(2, 2)
        v = check_supermap_preserves(RatMat.identity(4), H, H)
        assert v.status == "PASS"

    def test_corrupted_supermap_fails_with_witness(self):
        H = hom_type(2, 2)
        rows = seq_supermap(2, 2, 2).to_rows()
        rows[1], rows[2] = rows[2], rows[1]
        v = check_supermap_preserves(
            RatMat.from_rows(rows), ns_tensor(H, H), H)
        assert v.status == "FAIL"
        assert v.witness is not None
        assert ns_tensor(H, H).contains(v.witness)

    def test_unconstrained_source_downgrades_to_generators(self):
        H = hom_type(2, 2)
        free = CausType("free", 4, ("hom", 2, 2), [], H.generators)
        v = check_supermap_preserves(RatMat.identity(4), free, H)
        assert v.status == "PARTIAL"
        assert v.checked == 4

    def test_no_generators_reports_partial_with_none_checked(self):
        H = hom_type(2, 2)
        free = CausType("free", 4, ("hom", 2, 2), [])
        v = check_supermap_preserves(RatMat.identity(4), free, H)
        assert v.status == "PARTIAL"
        assert v.checked == 0

    def test_shape_mismatch_raises(self):
        with pytest.raises(ShapeMismatchError):
            check_supermap_preserves(
                RatMat.identity(3), hom_type(2, 2), hom_type(2, 2))


class TestExactness:
    def test_result_path_is_all_fractions(self):
        S = seq_supermap(2, 2, 2)
        H = hom_type(2, 2)
        NS = ns_tensor(H, H)
        composite = S * NS.generators[3]
        for mat in (S, composite, correlated_noise(), *H.generators):
            for v in mat.entries.values():
                assert type(v) is Fraction
                assert not isinstance(v, float)
        for row in NS.system + H.system:
            for c in row:
                assert type(c) is Fraction

    def test_json_export_is_exact_strings(self):
        P = first_order_type(2)
        assert P.to_jsonable() == {
            "label": "P2", "dim": 2, "shape": ["state", 2],
            "nonneg": True, "constraints": [["1", "1"]],
            "rhs": ["1"], "generators": 2,
        }


class TestSuite:
    def test_suite_passes(self):
        rep = check_causlite(Bounds())
        assert rep.passed, rep.violations[:3]
        assert rep.cases_total >= 2000

    def test_suite_respects_size_bound(self):
        rep = check_causlite(Bounds(max_size=2))
        assert rep.passed
        assert rep.cases_total < 1000
