"""Classical non-signalling channels over exact rationals.

First-order causal types are probability vectors; second-order types
are Choi vectors of column-stochastic maps, and bipartite channel
spaces carry both one-way marginal-independence constraint families on
top of joint stochasticity.  The sequential-composition process is the
cap contraction of the rational-matrix model, and preservation is
certified by an exact rank test with a pointwise generator fallback.
Every number on every path here is a Fraction; floats never enter.
"""

import itertools
import random
from fractions import Fraction

from .errors import (
    LawViolationError,
    ShapeMismatchError,
    TypeMismatchError,
)
from .kernel import MatQModel, Morphism
from .ratmat import RatMat, _frac, rref, row_in_span
from .report import Bounds, LawReport

ZERO = Fraction(0)
ONE = Fraction(1)


def _column(v, dim):
    if isinstance(v, Morphism):
        v = v.payload
    if isinstance(v, RatMat):
        if v.cols != 1 or v.rows != dim:
            raise ShapeMismatchError(
                f"need a {dim}-entry column, got {v.rows}x{v.cols}")
        return v
    vals = [_frac(x) for x in v]
    if len(vals) != dim:
        raise ShapeMismatchError(
            f"need a {dim}-entry column, got {len(vals)} entries")
    col = RatMat(dim, 1)
    col.entries = {(i, 0): x for i, x in enumerate(vals) if x}
    return col


class CausType:
    """An affine-constrained set of exact-rational vectors.

    ``system`` holds the reduced row echelon form of the augmented
    constraint rows (coefficients then right-hand side), so equal
    types export identically.  ``generators`` lists known member
    columns for when a preservation certificate has to fall back to
    pointwise checking; each is validated at construction.
    """

    __slots__ = ("label", "dim", "shape", "system", "generators",
                 "nonneg")

    def __init__(self, label, dim, shape, rows, generators=(),
                 nonneg=True):
        self.label = label
        self.dim = dim
        self.shape = shape
        reduced, _ = rref([list(r) for r in rows])
        self.system = tuple(tuple(r) for r in reduced)
        self.generators = tuple(generators)
        self.nonneg = nonneg
        for k, g in enumerate(self.generators):
            if not self.contains(g):
                raise LawViolationError(
                    f"{label}: generator {k} violates the constraints")

    def __repr__(self):
        return (f"CausType({self.label}, dim={self.dim}, "
                f"rows={len(self.system)}, "
                f"generators={len(self.generators)})")

    def contains(self, v):
        col = _column(v, self.dim)
        ent = col.entries
        if self.nonneg and any(x < 0 for x in ent.values()):
            return False
        for row in self.system:
            s = sum((row[i] * x for (i, _), x in ent.items()
                     if row[i]), ZERO)
            if s != row[-1]:
                return False
        return True

    def to_jsonable(self):
        return {
            "label": self.label,
            "dim": self.dim,
            "shape": list(self.shape),
            "nonneg": self.nonneg,
            "constraints": [[str(c) for c in row[:-1]]
                            for row in self.system],
            "rhs": [str(row[-1]) for row in self.system],
            "generators": len(self.generators),
        }


def first_order_type(n):
    """Probability vectors of length n: sum one, entrywise >= 0."""
    if not isinstance(n, int) or n < 1:
        raise ValueError("dimension must be a positive integer")
    gens = []
    for i in range(n):
        g = RatMat(n, 1)
        g.entries = {(i, 0): ONE}
        gens.append(g)
    return CausType(f"P{n}", n, ("state", n),
                    [[ONE] * n + [ONE]], gens)


def deterministic_choi(n, m, table):
    """Choi column of the function sending input a to table[a]."""
    table = tuple(table)
    if len(table) != n or any(not 0 <= b < m for b in table):
        raise ShapeMismatchError(
            f"table {table!r} is not a function {n} -> {m}")
    v = RatMat(n * m, 1)
    v.entries = {(a * m + table[a], 0): ONE for a in range(n)}
    return v


def choi_vector(mat):
    """Column v[a*m + b] = mat[b, a] naming an m x n matrix."""
    if isinstance(mat, Morphism):
        mat = mat.payload
    if not isinstance(mat, RatMat):
        mat = RatMat.from_rows(mat)
    v = RatMat(mat.cols * mat.rows, 1)
    v.entries = {(a * mat.rows + b, 0): val
                 for (b, a), val in mat.entries.items()}
    return v


def hom_type(n, m, gen_cap=1024):
    """Choi vectors of column-stochastic n -> m maps.

    Entry a*m + b holds P(b|a); the constraint rows say each input's
    outcome distribution sums to one.  Generators are the m**n
    deterministic functions, omitted above gen_cap.
    """
    if not (isinstance(n, int) and isinstance(m, int)
            and n >= 1 and m >= 1):
        raise ValueError("dimensions must be positive integers")
    rows = []
    for a in range(n):
        row = [ZERO] * (n * m) + [ONE]
        for b in range(m):
            row[a * m + b] = ONE
        rows.append(row)
    gens = []
    if m ** n <= gen_cap:
        gens = [deterministic_choi(n, m, t)
                for t in itertools.product(range(m), repeat=n)]
    return CausType(f"[{n},{m}]", n * m, ("hom", n, m), rows, gens)


def ns_tensor(h1, h2):
    """Bipartite channels whose outputs cannot leak the far input.

    Members are jointly stochastic Choi vectors over
    (a*m1 + x)*dim2 + (b*m2 + y) whose x-marginal is independent of b
    and whose y-marginal is independent of a, as exact affine
    equalities.  Generators are the products of the factor generators.
    """
    if h1.shape[0] != "hom" or h2.shape[0] != "hom":
        raise TypeMismatchError("ns_tensor needs two hom types")
    _, na, ma = h1.shape
    _, nb, mb = h2.shape
    d2 = nb * mb
    dim = na * ma * d2

    def idx(a, x, b, y):
        return (a * ma + x) * d2 + (b * mb + y)

    rows = []
    for a in range(na):
        for b in range(nb):
            row = [ZERO] * dim + [ONE]
            for x in range(ma):
                for y in range(mb):
                    row[idx(a, x, b, y)] = ONE
            rows.append(row)
    # the x-marginal seen at input pair (a, b) must match (a, 0)
    for a in range(na):
        for x in range(ma):
            for b in range(1, nb):
                row = [ZERO] * dim + [ZERO]
                for y in range(mb):
                    row[idx(a, x, b, y)] += ONE
                    row[idx(a, x, 0, y)] -= ONE
                rows.append(row)
    for b in range(nb):
        for y in range(mb):
            for a in range(1, na):
                row = [ZERO] * dim + [ZERO]
                for x in range(ma):
                    row[idx(a, x, b, y)] += ONE
                    row[idx(0, x, b, y)] -= ONE
                rows.append(row)
    gens = tuple(g1.kron(g2) for g1 in h1.generators
                 for g2 in h2.generators)
    return CausType(f"{h1.label}(x){h2.label}", dim,
                    ("ns", (na, ma), (nb, mb)), rows, gens)


def seq_supermap(a, b, c):
    """The 0/1 matrix contracting [a,b] (x) [b,c] down to [a,c].

    Wired as identity (x) cap (x) identity in the rational-matrix
    model, it sends choi_vector(f) (x) choi_vector(g) to
    choi_vector(g o f).
    """
    for d in (a, b, c):
        if not isinstance(d, int) or d < 1:
            raise ValueError("dimensions must be positive integers")
    V = MatQModel(atoms={"a": a, "b": b, "c": c})
    wired = V.tensor(
        V.tensor(V.identity(V.obj("a")), V.compact_cap(V.obj("b"))),
        V.identity(V.obj("c")))
    return wired.payload


class SupermapVerdict:
    """Outcome of a preservation check.

    status "PASS" means the rank certificate covers every member;
    "PARTIAL" means only the listed generators were verified; "FAIL"
    carries a generator that lands outside the target as witness.
    """

    __slots__ = ("status", "checked", "witness", "reason")

    def __init__(self, status, checked=0, witness=None, reason=""):
        self.status = status
        self.checked = checked
        self.witness = witness
        self.reason = reason

    @property
    def passed(self):
        return self.status == "PASS"

    def __repr__(self):
        return (f"SupermapVerdict({self.status}, "
                f"checked={self.checked}, reason={self.reason!r})")


def check_supermap_preserves(S, src, tgt):
    """Certify that S maps every member of src into tgt.

    PASS needs S entrywise nonnegative and every target constraint
    row, pulled back through S, inside the affine row span of the
    source system; linearity then covers all members, not only the
    generators.  Otherwise the verdict downgrades to checking listed
    generators one by one.
    """
    if isinstance(S, Morphism):
        S = S.payload
    if S.cols != src.dim or S.rows != tgt.dim:
        raise ShapeMismatchError(
            f"need {tgt.dim}x{src.dim}, got {S.rows}x{S.cols}")
    sign_ok = all(v >= 0 for v in S.entries.values())
    span_ok = True
    base = [list(r) for r in src.system]
    for row in tgt.system:
        pulled = [ZERO] * (src.dim + 1)
        pulled[-1] = row[-1]
        for (i, j), val in S.entries.items():
            if row[i]:
                pulled[j] += row[i] * val
        if not row_in_span(base, pulled):
            span_ok = False
            break
    if span_ok and sign_ok and (src.nonneg or not tgt.nonneg):
        return SupermapVerdict(
            "PASS", reason="constraint implication certificate")
    for k, g in enumerate(src.generators):
        if not tgt.contains(S * g):
            return SupermapVerdict(
                "FAIL", checked=k + 1, witness=g,
                reason="generator mapped outside the target")
    reason = "certificate failed; generators verified pointwise"
    if not src.generators:
        reason = "certificate failed; no generators to test"
    return SupermapVerdict("PARTIAL", checked=len(src.generators),
                           reason=reason)


def copy_across(n):
    """Choi of P(x,y|a,b) = [x=b][y=b]: the left output copies b."""
    d2 = n * n
    v = RatMat(d2 * d2, 1)
    v.entries = {((a * n + b) * d2 + (b * n + b), 0): ONE
                 for a in range(n) for b in range(n)}
    return v


def correlated_noise():
    """P(x,y|a,b) = 1/2 [x=y=0] + 1/2 [x=y=1], ignoring both inputs."""
    half = Fraction(1, 2)
    v = RatMat(16, 1)
    v.entries = {((a * 2 + o) * 4 + (b * 2 + o), 0): half
                 for a in range(2) for b in range(2) for o in range(2)}
    return v


def random_stochastic(n, m, rng):
    """Column-stochastic m x n matrix with small random rationals."""
    mat = RatMat(m, n)
    ent = {}
    for j in range(n):
        weights = [rng.randint(0, 3) for _ in range(m)]
        if not any(weights):
            weights[rng.randrange(m)] = 1
        tot = sum(weights)
        for i, w in enumerate(weights):
            if w:
                ent[(i, j)] = Fraction(w, tot)
    mat.entries = ent
    return mat


def _all_exact(*objs):
    """True iff every entry in every object is a Fraction, never float."""
    for o in objs:
        if o is None:
            continue
        if isinstance(o, RatMat):
            vals = o.entries.values()
        elif isinstance(o, CausType):
            vals = [c for row in o.system for c in row]
        else:
            vals = o
        for v in vals:
            if isinstance(v, float) or not isinstance(v, Fraction):
                return False
    return True


def _bipartite_choi(n, table):
    """Choi column of the deterministic channel (a,b) -> table[a,b]."""
    d2 = n * n
    v = RatMat(d2 * d2, 1)
    v.entries = {((a * n + table[a * n + b][0]) * d2
                  + (b * n + table[a * n + b][1]), 0): ONE
                 for a in range(n) for b in range(n)}
    return v


def check_causlite(bounds=None, report=None):
    """Exhaustive composite laws plus certificate checks.

    Deterministic composites are scanned exhaustively at every
    dimension triple within the size bound, stochastic ones by seeded
    sampling; the sequential-composition matrix must certify
    preservation from the bipartite channel space to the composite
    hom type by rank inclusion at every triple.
    """
    bounds = bounds or Bounds()
    rep = report or LawReport("causlite", "matq", bounds.as_dict())
    size = min(bounds.max_size, 3)
    rng = random.Random(bounds.seed)

    for n in range(1, size + 1):
        P = first_order_type(n)
        for g in P.generators:
            rep.record("state-generators", f"P{n}", P.contains(g), True)
        uni = _column([Fraction(1, n)] * n, n)
        rep.record("state-uniform", f"P{n}", P.contains(uni), True)
        rep.record("state-rejects-unnormalized", f"P{n}",
                   P.contains([ZERO] * n), False)
        if n >= 2:
            signed = [Fraction(2), Fraction(-1)] + [ZERO] * (n - 2)
            rep.record("state-rejects-negative", f"P{n}",
                       P.contains(signed), False)

    for n in range(1, size + 1):
        for m in range(1, size + 1):
            H = hom_type(n, m)
            rep.record("hom-generator-count", H.label,
                       len(H.generators), m ** n)
            uni = choi_vector(RatMat.from_rows(
                [[Fraction(1, m)] * n] * m))
            rep.record("hom-uniform-member", H.label,
                       H.contains(uni), True)
            if m >= 2:
                ones = choi_vector(RatMat.from_rows([[ONE] * n] * m))
                rep.record("hom-rejects-overweight", H.label,
                           H.contains(ones), False)

    for a, b, c in itertools.product(range(1, size + 1), repeat=3):
        inst = f"{a},{b},{c}"
        S = seq_supermap(a, b, c)
        rep.record("seq-entries-boolean", inst,
                   all(v == ONE for v in S.entries.values()), True)
        for ft in itertools.product(range(b), repeat=a):
            for gt in itertools.product(range(c), repeat=b):
                got = S * deterministic_choi(a, b, ft).kron(
                    deterministic_choi(b, c, gt))
                want = deterministic_choi(
                    a, c, tuple(gt[ft[x]] for x in range(a)))
                rep.record("seq-composes-deterministic", inst,
                           got.canon(), want.canon())
        for _ in range(max(1, min(bounds.samples, 4))):
            f = random_stochastic(a, b, rng)
            g = random_stochastic(b, c, rng)
            got = S * choi_vector(f).kron(choi_vector(g))
            rep.record("seq-composes-stochastic", inst,
                       got.canon(), choi_vector(g * f).canon())
        src = ns_tensor(hom_type(a, b), hom_type(b, c))
        verdict = check_supermap_preserves(S, src, hom_type(a, c))
        rep.record("seq-preserves-ns", inst, verdict.status, "PASS")

    H22 = hom_type(2, 2)
    verdict = check_supermap_preserves(RatMat.identity(4), H22, H22)
    rep.record("identity-preserves", "[2,2]", verdict.status, "PASS")

    S = seq_supermap(2, 2, 2)
    rows = S.to_rows()
    rows[1], rows[2] = rows[2], rows[1]
    src = ns_tensor(H22, H22)
    broken = check_supermap_preserves(RatMat.from_rows(rows), src, H22)
    rep.record("corrupted-supermap-fails", "2,2,2",
               (broken.status, broken.witness is not None),
               ("FAIL", True))

    for n in range(2, size + 1):
        NS = ns_tensor(hom_type(n, n), hom_type(n, n))
        inst = f"n={n}"
        rep.record("copy-across-rejected", inst,
                   NS.contains(copy_across(n)), False)
        d2 = n * n
        for t in itertools.product(range(n), repeat=n):
            left = RatMat(d2 * d2, 1)
            left.entries = {((a * n + b) * d2 + (b * n + t[b]), 0): ONE
                            for a in range(n) for b in range(n)}
            rep.record("left-copy-rejected", inst,
                       NS.contains(left), False)
            right = RatMat(d2 * d2, 1)
            right.entries = {((a * n + t[a]) * d2 + (b * n + a), 0): ONE
                             for a in range(n) for b in range(n)}
            rep.record("right-copy-rejected", inst,
                       NS.contains(right), False)
        rep.record("product-channels-member", inst,
                   sum(1 for g in NS.generators if NS.contains(g)),
                   len(NS.generators))

    if size >= 2:
        NS22 = ns_tensor(H22, H22)
        for table in itertools.product(
                itertools.product(range(2), repeat=2), repeat=4):
            prod = (all(table[a * 2 + b][0] == table[a * 2][0]
                        for a in range(2) for b in range(2))
                    and all(table[a * 2 + b][1] == table[b][1]
                            for a in range(2) for b in range(2)))
            rep.record("dims-two-member-iff-product", str(table),
                       NS22.contains(_bipartite_choi(2, table)), prod)
        rep.record("correlated-noise-member", "n=2",
                   NS22.contains(correlated_noise()), True)
        mixed = ns_tensor(hom_type(1, 2), hom_type(2, 1))
        rep.record("mixed-dims-products-member", "[1,2](x)[2,1]",
                   sum(1 for g in mixed.generators
                       if mixed.contains(g)), len(mixed.generators))
        rep.record("exact-arithmetic", "result path",
                   _all_exact(S, NS22, H22, broken.witness,
                              correlated_noise(),
                              S * NS22.generators[0],
                              *H22.generators), True)
    return rep
