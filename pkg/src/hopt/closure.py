"""Linked structure, evaluation, currying, and the couniversal check.

A link is the family of isos eta_A: A -> [I,A].  With it the enrichment
yields a monoidal closure: eval is unnaming plus hom-composition, curry
feeds a named arrow into a partial-insertion slot.  Uniqueness of curry
is established exhaustively where hom-sets enumerate and by exact rank
on the rational backend (the uncurry operator is linear and square, so
full rank is bijectivity, covering every morphism rather than samples).

Each backend also carries a direct closure construction (native_eval /
native_curry) written independently of the enrichment maps; agreement
of the derived and native routes is part of the closed suite.
"""

import itertools
from fractions import Fraction

from .errors import TypeMismatchError, UnsupportedError
from .kernel import (
    FinRelModel, FinSetModel, MatQModel, Morphism, ObjectExpr,
)
from .ratmat import RatMat, mat_rank
from .report import Bounds, LawReport
from .enrichment import (
    EnrichedSmc,
    object_inventory,
    partial_insertion,
    _obj_desc,
    _homs,
)


def eval_morphism(E, A, B):
    """eval: A (x) [A,B] -> B, by naming the input and composing."""
    V = E.V
    I = E.C.unit()
    named = V.compose(E.seq(I, A, B),
                      V.tensor(E.eta(A), V.identity(E.hom_ob(A, B))))
    return V.compose(E.eta_inv(B), named)


def curry(E, f, A, C):
    """curry(f: A (x) C -> B): C -> [A,B] via partial insertion."""
    if A @ C != f.dom:
        raise TypeMismatchError(
            f"domain {f.dom!r} does not split as {A!r} (x) {C!r}")
    B = f.cod
    V = E.V
    I = E.C.unit()
    ins = partial_insertion(E, I, C, A, B)
    feed = V.compose(ins,
                     V.tensor(V.identity(E.hom_ob(I, C)), E.kappa(f)))
    return V.compose(feed, E.eta(C))


def uncurry(E, g, A):
    """uncurry(g: C -> [A,B]): A (x) C -> B."""
    ev = _eval_for_cod(E, g.cod, A)
    return E.V.compose(ev, E.V.tensor(E.C.identity(A), g))


def _eval_for_cod(E, hob, A):
    if isinstance(E.C, FinSetModel):
        atom = hob.atoms[0]
        return eval_morphism(E, A, ObjectExpr(E.C, atom[2]))
    # [A,B] = A (x) B: strip the A prefix
    k = len(A.atoms)
    if hob.atoms[:k] != A.atoms:
        raise TypeMismatchError(f"{hob!r} does not start with {A!r}")
    return eval_morphism(E, A, ObjectExpr(E.C, hob.atoms[k:]))


# ---------------------------------------------------------------------------
# native closure constructions per backend


def native_eval(E, A, B):
    m = E.V
    hob = E.hom_ob(A, B)
    if isinstance(m, FinSetModel):
        idx_a = m.index(A)
        k = len(A.atoms)

        def fn(tok):
            return tok[k][idx_a[tok[:k]]]

        return m.from_fn(A @ hob, B, fn)
    if isinstance(m, FinRelModel):
        na, nb = m.size(A), m.size(B)
        pairs = frozenset(((ia * na + ia) * nb + ib, ib)
                          for ia in range(na) for ib in range(nb))
        return Morphism(m, A @ hob, B, pairs)
    if isinstance(m, MatQModel):
        na, nb = m.size(A), m.size(B)
        entries = {(b, (a * na + a) * nb + b): Fraction(1)
                   for a in range(na) for b in range(nb)}
        return Morphism(m, A @ hob, B, RatMat(nb, na * na * nb, entries))
    raise UnsupportedError("no native eval for this backend")


def native_curry(E, f, A, C):
    m = E.V
    if A @ C != f.dom:
        raise TypeMismatchError(
            f"domain {f.dom!r} does not split as {A!r} (x) {C!r}")
    B = f.cod
    hob = E.hom_ob(A, B)
    if isinstance(m, FinSetModel):
        car_a = m.carrier(A)

        def fn(tok):
            return (tuple(f.apply(a + tok) for a in car_a),)

        return m.from_fn(C, hob, fn)
    if isinstance(m, FinRelModel):
        nb, nc = m.size(B), m.size(C)
        pairs = set()
        for iac, ib in f.payload:
            ia, ic = divmod(iac, nc)
            pairs.add((ic, ia * nb + ib))
        return Morphism(m, C, hob, frozenset(pairs))
    if isinstance(m, MatQModel):
        nb, nc = m.size(B), m.size(C)
        entries = {}
        for (b, ac), val in f.payload.entries.items():
            a, c = divmod(ac, nc)
            entries[(a * nb + b, c)] = val
        return Morphism(m, C, hob,
                        RatMat(m.size(A) * nb, nc, entries))
    raise UnsupportedError("no native curry for this backend")


# ---------------------------------------------------------------------------
# checks


def check_linked(E, bounds=None, report=None):
    """eta is a natural iso A -> [I,A] compatible with naming."""
    bounds = bounds or Bounds()
    rep = report or LawReport("linked", E.name, bounds.as_dict())
    objs = object_inventory(E.C, bounds.max_size, bounds.expr_len)
    V, C = E.V, E.C
    I = C.unit()
    for A in objs:
        e = E.eta(A)
        ei = E.eta_inv(A)
        rep.record("eta-iso-left", _obj_desc(A),
                   V.compose(ei, e), C.identity(A))
        rep.record("eta-iso-right", _obj_desc(A),
                   V.compose(e, ei), V.identity(E.hom_ob(I, A)))
    for A, B in itertools.product(objs, repeat=2):
        for f in _homs(E, A, B, bounds):
            lhs = V.compose(E.hom_map(C.identity(I), f), E.eta(A))
            rhs = V.compose(E.eta(B), f)
            rep.record("eta-natural", _obj_desc(A, B), lhs, rhs)
    for A in objs:
        for s in _homs(E, I, A, bounds):
            rep.record("eta-names-states", _obj_desc(A),
                       V.compose(E.eta(A), s), E.kappa(s))
    return rep


def check_couniversal(E, bounds=None, report=None):
    """curry is a two-sided inverse to uncurry, hence unique.

    For every (A, C, B): uncurry(curry(f)) = f for all f, and
    curry(uncurry(g)) = g for all g.  The second identity is the whole
    uniqueness claim: any g with eval . (id (x) g) = f must be
    curry(f).  The rational backend gets the same conclusion from a
    full-rank check of the uncurry operator plus sampled roundtrips.
    Derived and native closure routes are compared on every instance.
    """
    bounds = bounds or Bounds()
    rep = report or LawReport("closed", E.name, bounds.as_dict())
    objs = object_inventory(E.C, bounds.max_size, bounds.expr_len)
    V = E.V
    rational = isinstance(E.C, MatQModel)

    for A, C_, B in itertools.product(objs, repeat=3):
        hob = E.hom_ob(A, B)
        ev = eval_morphism(E, A, B)
        rep.record("eval-native", _obj_desc(A, B),
                   ev, native_eval(E, A, B))

        try:
            fs = _homs(E, A @ C_, B, bounds)
        except Exception as exc:
            rep.note(f"skipped f-scan {A!r} {C_!r} {B!r}: {exc}")
            fs = []
        for f in fs:
            g = curry(E, f, A, C_)
            rep.record(
                "curry-native",
                _obj_desc(A, C_, B) + f" f={E.C.payload_canon(f.payload)!r}",
                g, native_curry(E, f, A, C_))
            back = V.compose(ev, V.tensor(E.C.identity(A), g))
            rep.record(
                "uncurry-curry",
                _obj_desc(A, C_, B) + f" f={E.C.payload_canon(f.payload)!r}",
                back, f)

        if rational:
            rep.cases_total += 1
            if not _uncurry_full_rank(E, A, C_, B):
                rep.fail("curry-unique", _obj_desc(A, C_, B),
                         "uncurry operator rank deficient",
                         "bijective uncurry",
                         trace="rank < dim")
            continue

        try:
            gs = E.V.enumerate_homs(C_, hob, bound=bounds.enum_cap)
        except Exception as exc:
            rep.note(f"skipped g-scan {A!r} {C_!r} {B!r}: {exc}")
            continue
        for g in gs:
            f = V.compose(ev, V.tensor(E.C.identity(A), g))
            rep.record(
                "curry-uncurry",
                _obj_desc(A, C_, B) + f" g={E.C.payload_canon(g.payload)!r}",
                curry(E, f, A, C_), g)
    return rep


def _uncurry_full_rank(E, A, C_, B):
    """Exact rank of g -> eval . (id (x) g) on the rational backend."""
    m = E.C
    na, nb, nc = m.size(A), m.size(B), m.size(C_)
    nh = na * nb
    ev = eval_morphism(E, A, B)
    cols = []
    for r in range(nh):
        for c in range(nc):
            unit = m.matrix_unit(C_, E.hom_ob(A, B), r, c)
            out = m.compose(ev, m.tensor(m.identity(A), unit))
            cols.append(out.payload)
    flat = RatMat(nb * na * nc, nh * nc)
    for j, mat in enumerate(cols):
        for (r, c), val in mat.entries.items():
            flat.entries[(c * nb + r, j)] = val
    return mat_rank(flat) == nh * nc


# ---------------------------------------------------------------------------
# enrichment rebuilt from the closure


class ClosedDerived(EnrichedSmc):
    """Enrichment whose maps are built only from native eval/curry.

    Used to confirm the closure determines the enrichment: seq, par,
    hom_map, and kappa reconstructed this way must coincide with the
    stock structure maps.
    """

    def __init__(self, base):
        super().__init__(base.V, base.C)
        self.base = base
        self.name = base.name + "+closed"

    def hom_ob(self, A, B):
        return self.base.hom_ob(A, B)

    def eta(self, A):
        return self.base.eta(A)

    def eta_inv(self, A):
        return self.base.eta_inv(A)

    def kappa(self, f):
        I = self.C.unit()
        return native_curry(self.base, f, f.dom, I)

    def kappa_inv(self, s, dom=None, cod=None):
        return self.base.kappa_inv(s, dom=dom, cod=cod)

    def seq(self, A, B, C):
        m = self.V
        evab = native_eval(self.base, A, B)
        evbc = native_eval(self.base, B, C)
        hbc = m.identity(self.hom_ob(B, C))
        staged = m.compose(evbc, m.tensor(evab, hbc))
        return native_curry(self.base, staged, A,
                            self.hom_ob(A, B) @ self.hom_ob(B, C))

    def par(self, A, A2, B, B2):
        m = self.V
        eva = native_eval(self.base, A, A2)
        evb = native_eval(self.base, B, B2)
        shuffle = m.tensor(
            m.tensor(m.identity(A), m.braid(B, self.hom_ob(A, A2))),
            m.identity(self.hom_ob(B, B2)))
        staged = m.compose(m.tensor(eva, evb), shuffle)
        return native_curry(self.base, staged, A @ B,
                            self.hom_ob(A, A2) @ self.hom_ob(B, B2))

    def hom_map(self, p, q):
        m = self.V
        A2, A = p.dom, p.cod
        B = q.dom
        ev = native_eval(self.base, A, B)
        staged = m.compose(
            q, m.compose(ev, m.tensor(p, m.identity(self.hom_ob(A, B)))))
        return native_curry(self.base, staged, A2, self.hom_ob(A, B))


def check_closed_determines_enrichment(E, bounds=None, report=None):
    """Structure maps rebuilt from the closure equal the stock ones."""
    bounds = bounds or Bounds()
    rep = report or LawReport("closed-rebuild", E.name, bounds.as_dict())
    D = ClosedDerived(E)
    objs = object_inventory(E.C, bounds.max_size, bounds.expr_len)
    for A, B, C_ in itertools.product(objs, repeat=3):
        rep.record("rebuild-seq", _obj_desc(A, B, C_),
                   D.seq(A, B, C_), E.seq(A, B, C_))
    for A, A2, B, B2 in itertools.product(objs, repeat=4):
        rep.record("rebuild-par", _obj_desc(A, A2, B, B2),
                   D.par(A, A2, B, B2), E.par(A, A2, B, B2))
    for A, B in itertools.product(objs, repeat=2):
        for f in _homs(E, A, B, bounds)[:6]:
            rep.record(
                "rebuild-kappa",
                _obj_desc(A, B) + f" f={E.C.payload_canon(f.payload)!r}",
                D.kappa(f), E.kappa(f))
    for A, B in itertools.product(objs, repeat=2):
        ps = _homs(E, B, A, bounds)[:3]
        qs = _homs(E, A, B, bounds)[:3]
        for p in ps:
            for q in qs:
                rep.record("rebuild-hom_map", _obj_desc(A, B),
                           D.hom_map(p, q), E.hom_map(p, q))
    return rep
