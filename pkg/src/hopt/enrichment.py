"""Self-enrichment data over the finite backends and its law checker.

An EnrichedSmc packages the hom-object assignment, the name/unname
bijection kappa, sequential and parallel composition on hom-objects,
and the contravariant/covariant hom action.  Laws L1-L7 are verified
by exhaustive quantification over a bounded object inventory; the
rational backend swaps exhaustive morphism quantification for seeded
samples (structural laws L1/L2/L4/L5/L7 stay exact since they do not
quantify over morphisms).

Laws, with kappa written k and hom-composition written o:
  L1  o is associative
  L2  k(id) is a two-sided unit for o
  L3  k(g . f) = o . (k f x k g)
  L4  par is associative
  L5  par absorbs the unit hom-object on either side
  L6  k(f x g) = par . (k f x k g)
  L7  o and par interchange
"""

import itertools
from fractions import Fraction

from .errors import TypeMismatchError, UnsupportedError
from .kernel import (
    FinRelModel,
    FinSetModel,
    MatQModel,
    Morphism,
    ObjectExpr,
    object_inventory,
)
from .ratmat import RatMat, mat_rank
from .report import Bounds, LawReport


class EnrichedSmc:
    """Base-category-valued enrichment of a finite model over itself.

    Subclasses fix V (the enriching model), C (the enriched one), and
    the six structure maps.  V and C may be the same object.
    """

    name = "abstract"

    def __init__(self, V, C):
        self.V = V
        self.C = C

    # -- structure, provided by subclasses --

    def hom_ob(self, A, B):
        raise NotImplementedError

    def kappa(self, f):
        raise NotImplementedError

    def kappa_inv(self, s, dom=None, cod=None):
        raise NotImplementedError

    def seq(self, A, B, C):
        raise NotImplementedError

    def par(self, A, A2, B, B2):
        raise NotImplementedError

    def hom_map(self, p, q):
        raise NotImplementedError

    # -- linking (identity for the backends where [I,A] = A) --

    def eta(self, A):
        """Iso A -> [I,A] in V, when V = C and the link exists."""
        raise UnsupportedError(f"{self.name} has no link")

    def eta_inv(self, A):
        raise UnsupportedError(f"{self.name} has no link")

    # -- conveniences --

    def vid(self, A):
        return self.V.identity(A)

    def hom_id(self, A, B):
        return self.V.identity(self.hom_ob(A, B))

    def objects(self, bounds):
        return object_inventory(self.C, bounds.max_size, bounds.expr_len)


class FinSetSelf(EnrichedSmc):
    """Function-table model enriched in itself via synthesized hom atoms.

    [A,B] is a fresh atom whose carrier is the set of function tables
    A -> B; kappa packs a table into the point of that atom.
    """

    name = "finset_self"

    def __init__(self, model):
        super().__init__(model, model)

    def hom_ob(self, A, B):
        return self.V.hom_object(A, B)

    def kappa(self, f):
        table = f.payload
        return Morphism(self.V, self.V.unit(), self.hom_ob(f.dom, f.cod),
                        ((table,),))

    def kappa_inv(self, s, dom=None, cod=None):
        atom = _single_hom_atom(s)
        if dom is None:
            dom = ObjectExpr(self.V, atom[1])
        if cod is None:
            cod = ObjectExpr(self.V, atom[2])
        table = s.payload[0][0]
        return Morphism(self.V, dom, cod, table)

    def seq(self, A, B, C):
        m = self.V
        dom = self.hom_ob(A, B) @ self.hom_ob(B, C)
        cod = self.hom_ob(A, C)
        idx_b = m.index(B)

        def fn(tok):
            ftab, gtab = tok
            return (tuple(gtab[idx_b[v]] for v in ftab),)

        return m.from_fn(dom, cod, fn)

    def par(self, A, A2, B, B2):
        m = self.V
        dom = self.hom_ob(A, A2) @ self.hom_ob(B, B2)
        cod = self.hom_ob(A @ B, A2 @ B2)
        na = m.size(A)
        nb = m.size(B)

        def fn(tok):
            ftab, gtab = tok
            out = tuple(ftab[i] + gtab[j]
                        for i in range(na) for j in range(nb))
            return (out,)

        return m.from_fn(dom, cod, fn)

    def hom_map(self, p, q):
        m = self.V
        A2, A = p.dom, p.cod
        dom = self.hom_ob(A, q.dom)
        cod = self.hom_ob(A2, q.cod)
        car_a2 = m.carrier(A2)
        idx_a = m.index(A)

        def fn(tok):
            tab = tok[0]
            out = tuple(q.apply(tab[idx_a[p.apply(t)]]) for t in car_a2)
            return (out,)

        return m.from_fn(dom, cod, fn)

    def eta(self, A):
        m = self.V
        cod = self.hom_ob(m.unit(), A)

        def fn(tok):
            return ((tok,),)

        return m.from_fn(A, cod, fn)

    def eta_inv(self, A):
        m = self.V

        def fn(tok):
            return tok[0][0]

        return m.from_fn(self.hom_ob(m.unit(), A), A, fn)


class FinRelSelf(EnrichedSmc):
    """Boolean-relation model enriched in itself with [A,B] = A x B."""

    name = "finrel_self"

    def __init__(self, model):
        super().__init__(model, model)

    def hom_ob(self, A, B):
        return A @ B

    def kappa(self, r):
        nb = self.V.size(r.cod)
        pairs = frozenset((0, ia * nb + ib) for ia, ib in r.payload)
        return Morphism(self.V, self.V.unit(), r.dom @ r.cod, pairs)

    def kappa_inv(self, s, dom=None, cod=None):
        if dom is None or cod is None:
            raise TypeMismatchError(
                "finrel_self kappa_inv needs the dom/cod split of [A,B]")
        nb = self.V.size(cod)
        pairs = frozenset(divmod(j, nb) for _, j in s.payload)
        return Morphism(self.V, dom, cod, pairs)

    def seq(self, A, B, C):
        m = self.V
        na, nb, nc = m.size(A), m.size(B), m.size(C)
        pairs = set()
        for ia in range(na):
            for ib in range(nb):
                for ic in range(nc):
                    src = ((ia * nb + ib) * nb + ib) * nc + ic
                    pairs.add((src, ia * nc + ic))
        return Morphism(m, (A @ B) @ (B @ C), A @ C, frozenset(pairs))

    def par(self, A, A2, B, B2):
        m = self.V
        return m.tensor(
            m.tensor(m.identity(A), m.braid(A2, B)), m.identity(B2))

    def hom_map(self, p, q):
        m = self.V
        return m.tensor(m.converse(p), q)

    def eta(self, A):
        return self.V.identity(A)

    def eta_inv(self, A):
        return self.V.identity(A)


class MatQChoi(EnrichedSmc):
    """Rational matrices enriched in themselves by column-major naming.

    kappa(f)[a * dim(B) + b] = f[b, a]; composition and juxtaposition
    on names are cap contraction and the middle-swap permutation.
    """

    name = "matq_choi"

    def __init__(self, model):
        super().__init__(model, model)

    def hom_ob(self, A, B):
        return A @ B

    def kappa(self, f):
        m = self.V
        na, nb = m.size(f.dom), m.size(f.cod)
        entries = {}
        for (b, a), val in f.payload.entries.items():
            entries[(a * nb + b, 0)] = val
        return Morphism(m, m.unit(), f.dom @ f.cod,
                        RatMat(na * nb, 1, entries))

    def kappa_inv(self, s, dom=None, cod=None):
        if dom is None or cod is None:
            raise TypeMismatchError(
                "matq_choi kappa_inv needs the dom/cod split of [A,B]")
        m = self.V
        na, nb = m.size(dom), m.size(cod)
        entries = {}
        for (i, _), val in s.payload.entries.items():
            a, b = divmod(i, nb)
            entries[(b, a)] = val
        return Morphism(m, dom, cod, RatMat(nb, na, entries))

    def seq(self, A, B, C):
        m = self.V
        return m.tensor(
            m.tensor(m.identity(A), m.compact_cap(B)), m.identity(C))

    def par(self, A, A2, B, B2):
        m = self.V
        return m.tensor(
            m.tensor(m.identity(A), m.braid(A2, B)), m.identity(B2))

    def hom_map(self, p, q):
        m = self.V
        mat = p.payload.transpose().kron(q.payload)
        return Morphism(m, p.cod @ q.dom, p.dom @ q.cod, mat)

    def eta(self, A):
        return self.V.identity(A)

    def eta_inv(self, A):
        return self.V.identity(A)


def _single_hom_atom(s):
    if len(s.cod.atoms) != 1 or s.cod.atoms[0][0] != "hom":
        raise TypeMismatchError(f"not a hom-object point: {s.cod!r}")
    return s.cod.atoms[0]


_STANDARD = None


def standard_enrichments():
    """The three stock enrichments, built once per process.

    Sharing one instance matters: towers compare objects by model
    identity, so every consumer must see the same underlying models.
    """
    global _STANDARD
    if _STANDARD is None:
        fs = FinSetModel()
        fs.declare_atom("u", ("*",))
        fs.declare_atom("b", (0, 1))
        fs.declare_atom("t", (0, 1, 2))
        fr = FinRelModel()
        fr.declare_atom("u", ("*",))
        fr.declare_atom("b", (0, 1))
        fr.declare_atom("t", (0, 1, 2))
        mq = MatQModel()
        mq.declare_atom("q2", 2)
        mq.declare_atom("q3", 3)
        _STANDARD = {
            "finset_self": FinSetSelf(fs),
            "finrel_self": FinRelSelf(fr),
            "matq_choi": MatQChoi(mq),
        }
    return _STANDARD


def get_enrichment(name):
    try:
        return standard_enrichments()[name]
    except KeyError:
        raise UnsupportedError(f"unknown model {name!r}") from None


# ---------------------------------------------------------------------------
# law checking


def _obj_desc(*objs):
    return " ".join(repr(o) for o in objs)


def _homs(E, A, B, bounds):
    """Morphisms A -> B to quantify over; sampled on the matrix backend."""
    if isinstance(E.C, MatQModel):
        return E.C.enumerate_homs(A, B, samples=bounds.samples,
                                  seed=bounds.seed)
    return E.C.enumerate_homs(A, B, bound=bounds.enum_cap)


def check_enriched_laws(E, bounds=None, report=None, inject=None):
    """Verify L1-L7 over the bounded inventory; return a LawReport.

    inject, when given, deliberately corrupts one structure map before
    checking ("seq" breaks L1/L2/L3 and friends); used to prove the
    checker can fail.
    """
    bounds = bounds or Bounds()
    rep = report or LawReport("enriched", E.name, bounds.as_dict())
    objs = E.objects(bounds)
    seq0 = E.seq
    if inject == "seq":
        seq0 = _corrupt_seq(E)
        rep.note("fault injection: seq")
    elif inject:
        raise UnsupportedError(f"unknown injection {inject!r}")

    V = E.V

    # structure maps depend only on their boundary objects; build each
    # one once across the whole sweep
    seq_c, par_c, hid_c = {}, {}, {}

    def seq(A, B, C):
        out = seq_c.get((A, B, C))
        if out is None:
            out = seq_c[(A, B, C)] = seq0(A, B, C)
        return out

    def par(A, A2, B, B2):
        out = par_c.get((A, A2, B, B2))
        if out is None:
            out = par_c[(A, A2, B, B2)] = E.par(A, A2, B, B2)
        return out

    def hid(A, B):
        out = hid_c.get((A, B))
        if out is None:
            out = hid_c[(A, B)] = E.hom_id(A, B)
        return out

    def law_pairs(fs, gs):
        # exhaustive backends get the full product; sampled listings
        # are crossed on a short prefix and paired off beyond it
        if getattr(fs, "sampled", False) or getattr(gs, "sampled", False):
            return itertools.chain(itertools.product(fs[:6], gs[:6]),
                                   zip(fs[6:], gs[6:]))
        return itertools.product(fs, gs)

    # L1: associativity of o over object quadruples
    for A, B, C, D in itertools.product(objs, repeat=4):
        lhs = V.compose(seq(A, C, D),
                        V.tensor(seq(A, B, C), hid(C, D)))
        rhs = V.compose(seq(A, B, D),
                        V.tensor(hid(A, B), seq(B, C, D)))
        rep.record("L1", _obj_desc(A, B, C, D), lhs, rhs)

    # L2: k(id) is a unit on both sides
    for A, B in itertools.product(objs, repeat=2):
        h = hid(A, B)
        left = V.compose(seq(A, A, B),
                         V.tensor(E.kappa(E.C.identity(A)), h))
        right = V.compose(seq(A, B, B),
                          V.tensor(h, E.kappa(E.C.identity(B))))
        rep.record("L2-left", _obj_desc(A, B), left, h)
        rep.record("L2-right", _obj_desc(A, B), right, h)

    # L3: naming a composite
    sampled = False
    for A, B, C in itertools.product(objs, repeat=3):
        fs = _homs(E, A, B, bounds)
        gs = _homs(E, B, C, bounds)
        sampled = sampled or getattr(fs, "sampled", False)
        s = seq(A, B, C)
        for f, g in law_pairs(fs, gs):
            lhs = E.kappa(E.C.compose(g, f))
            rhs = V.compose(s, V.tensor(E.kappa(f), E.kappa(g)))
            rep.record(
                "L3", _obj_desc(A, B, C) +
                f" f={E.C.payload_canon(f.payload)!r}"
                f" g={E.C.payload_canon(g.payload)!r}",
                lhs, rhs)
    if sampled:
        rep.note("L3/L6 quantified over seeded samples")

    # L4: associativity of par
    for A, A2, B, B2, C, C2 in itertools.product(objs, repeat=6):
        lhs = V.compose(par(A @ B, A2 @ B2, C, C2),
                        V.tensor(par(A, A2, B, B2), hid(C, C2)))
        rhs = V.compose(par(A, A2, B @ C, B2 @ C2),
                        V.tensor(hid(A, A2), par(B, B2, C, C2)))
        rep.record("L4", _obj_desc(A, A2, B, B2, C, C2), lhs, rhs)

    # L5: par against the unit hom-object
    I = E.C.unit()
    kid = E.kappa(E.C.identity(I))
    for A, A2 in itertools.product(objs, repeat=2):
        h = hid(A, A2)
        right = V.compose(par(A, A2, I, I), V.tensor(h, kid))
        left = V.compose(par(I, I, A, A2), V.tensor(kid, h))
        rep.record("L5-right", _obj_desc(A, A2), right, h)
        rep.record("L5-left", _obj_desc(A, A2), left, h)

    # L6: naming a tensor
    for A, A2, B, B2 in itertools.product(objs, repeat=4):
        fs = _homs(E, A, A2, bounds)
        gs = _homs(E, B, B2, bounds)
        p = par(A, A2, B, B2)
        for f, g in law_pairs(fs, gs):
            lhs = E.kappa(E.C.tensor(f, g))
            rhs = V.compose(p, V.tensor(E.kappa(f), E.kappa(g)))
            rep.record(
                "L6", _obj_desc(A, A2, B, B2) +
                f" f={E.C.payload_canon(f.payload)!r}"
                f" g={E.C.payload_canon(g.payload)!r}",
                lhs, rhs)

    # L7: interchange of o and par
    for A, B, C in itertools.product(objs, repeat=3):
        for A2, B2, C2 in itertools.product(objs, repeat=3):
            one = V.compose(par(A, C, A2, C2),
                            V.tensor(seq(A, B, C), seq(A2, B2, C2)))
            shuffle = V.tensor(
                V.tensor(hid(A, B),
                         V.braid(E.hom_ob(B, C), E.hom_ob(A2, B2))),
                hid(B2, C2))
            two = V.compose(
                seq(A @ A2, B @ B2, C @ C2),
                V.compose(V.tensor(par(A, B, A2, B2),
                                   par(B, C, B2, C2)),
                          shuffle))
            rep.record("L7", _obj_desc(A, B, C, A2, B2, C2), one, two)

    return rep


def _corrupt_seq(E):
    """A seq that disagrees with the real one on a single instance."""
    real = E.seq

    def bad(A, B, C):
        s = real(A, B, C)
        if E.C.size(A) == E.C.size(B) == E.C.size(C) == 2:
            return _twist_one(E, s)
        return s

    return bad


def _twist_one(E, s):
    m = E.V
    if isinstance(m, FinSetModel):
        tab = list(s.payload)
        cod_car = m.carrier(s.cod)
        if len(cod_car) > 1:
            alt = next(t for t in cod_car if t != tab[0])
            tab[0] = alt
        return Morphism(m, s.dom, s.cod, tuple(tab))
    if isinstance(m, FinRelModel):
        pairs = set(s.payload)
        probe = (0, 0)
        if probe in pairs:
            pairs.discard(probe)
        else:
            pairs.add(probe)
        return Morphism(m, s.dom, s.cod, frozenset(pairs))
    if isinstance(m, MatQModel):
        mat = s.payload
        entries = dict(mat.entries)
        entries[(0, 0)] = entries.get((0, 0), Fraction(0)) + 1
        return Morphism(m, s.dom, s.cod,
                        RatMat(mat.rows, mat.cols, entries))
    raise UnsupportedError("no corruption rule for this backend")


# ---------------------------------------------------------------------------
# derived operations


def partial_insertion(E, A, X, Y, Z):
    """Delta: [A,X] (x) [Y(x)X, Z] -> [Y(x)A, Z].

    Feeds the named arrow A -> X into the X-shaped slot of the second
    factor while leaving the Y wire alone.
    """
    V = E.V
    ky = E.kappa(E.C.identity(Y))
    widen = V.compose(E.par(Y, Y, A, X),
                      V.tensor(ky, V.identity(E.hom_ob(A, X))))
    return V.compose(E.seq(Y @ A, Y @ X, Z),
                     V.tensor(widen, V.identity(E.hom_ob(Y @ X, Z))))


def usage_theta(E, S):
    """theta(S): [I,A] (x) X -> [I,B] for S: X -> [A,B].

    The A/B split is read off the hom-object; backends where
    [A,B] = A (x) B cannot recover it, so such callers use
    usage_theta_at.
    """
    atom = _single_hom_atom(S)
    A = ObjectExpr(E.C, atom[1])
    B = ObjectExpr(E.C, atom[2])
    return usage_theta_at(E, S, A, B)


def usage_theta_at(E, S, A, B):
    V = E.V
    I = E.C.unit()
    return V.compose(E.seq(I, A, B),
                     V.tensor(V.identity(E.hom_ob(I, A)), S))


def check_faithful(E, bounds=None, report=None):
    """theta is injective on V(X, [A,B]) for bounded X, A, B.

    Set-based: collect canonical forms of theta(S) over every S and
    compare counts.  The rational backend instead checks exact linear
    injectivity (rank of the matrix representing theta on basis
    elements), which covers all of V(X, [A,B]) rather than samples.
    """
    bounds = bounds or Bounds()
    rep = report or LawReport("faithful", E.name, bounds.as_dict())
    objs = E.objects(bounds)

    if isinstance(E.V, MatQModel):
        return _check_faithful_rank(E, objs, rep)

    V = E.V
    for X, A, B in itertools.product(objs, repeat=3):
        hob = E.hom_ob(A, B)
        try:
            homs = V.enumerate_homs(X, hob, bound=bounds.enum_cap)
        except Exception as exc:
            rep.note(f"skipped X={X!r} A={A!r} B={B!r}: {exc}")
            continue
        seen = {}
        for S in homs:
            rep.cases_total += 1
            key = usage_theta_at(E, S, A, B).canon()
            if key in seen:
                rep.fail("faithful", _obj_desc(X, A, B), S, seen[key],
                         trace="distinct S with equal theta(S)")
            else:
                seen[key] = S
    return rep


def _check_faithful_rank(E, objs, rep):
    V = E.V
    for X, A, B in itertools.product(objs, repeat=3):
        nx = V.size(X)
        na, nb = V.size(A), V.size(B)
        nh = na * nb
        cols = []
        for r in range(nh):
            for c in range(nx):
                unit = V.matrix_unit(X, E.hom_ob(A, B), r, c)
                th = usage_theta_at(E, unit, A, B)
                cols.append(th.payload)
        rows_out = nb * (na * nx)
        flat = RatMat(rows_out, nh * nx)
        for j, mat in enumerate(cols):
            for (r, c), val in mat.entries.items():
                flat.entries[(c * nb + r, j)] = val
        rep.cases_total += 1
        rank = mat_rank(flat)
        if rank != nh * nx:
            rep.fail("faithful", _obj_desc(X, A, B),
                     f"rank {rank}", f"rank {nh * nx}",
                     trace="theta not injective")
    return rep


def check_kappa_bijection(E, bounds=None, report=None):
    """kappa is a bijection C(A,B) -> V(I,[A,B]) on the inventory."""
    bounds = bounds or Bounds()
    rep = report or LawReport("kappa-bijection", E.name, bounds.as_dict())
    sampled = isinstance(E.C, MatQModel)
    objs = E.objects(bounds)
    I = E.V.unit()
    for A, B in itertools.product(objs, repeat=2):
        homs = _homs(E, A, B, bounds)
        names = set()
        for f in homs:
            rep.cases_total += 1
            s = E.kappa(f)
            if s.dom != I or s.cod != E.hom_ob(A, B):
                rep.fail("kappa-type", _obj_desc(A, B), s.cod,
                         E.hom_ob(A, B))
                continue
            names.add(s.canon())
            back = E.kappa_inv(s, dom=A, cod=B)
            if back != f:
                rep.fail("kappa-roundtrip", _obj_desc(A, B), back, f)
        if len(names) != len(homs):
            rep.fail("kappa-injective", _obj_desc(A, B),
                     f"{len(names)} names", f"{len(homs)} arrows")
        if not sampled:
            states = E.V.enumerate_homs(I, E.hom_ob(A, B),
                                        bound=bounds.enum_cap)
            rep.cases_total += 1
            if len(states) != len(homs):
                rep.fail("kappa-surjective", _obj_desc(A, B),
                         f"{len(homs)} arrows", f"{len(states)} states")
    if sampled:
        rep.note("surjectivity skipped: infinite hom-sets, sampled")
    return rep


def check_hom_functor(E, bounds=None, report=None):
    """hom_map is functorial in both slots and kappa is natural for it."""
    bounds = bounds or Bounds()
    rep = report or LawReport("hom-functor", E.name, bounds.as_dict())
    objs = E.objects(bounds)
    V, C = E.V, E.C

    for A, B in itertools.product(objs, repeat=2):
        rep.record(
            "hom_map-id", _obj_desc(A, B),
            E.hom_map(C.identity(A), C.identity(B)),
            E.hom_id(A, B))

    # kappa-naturality: hom_map(p,q) . k(f) = k(q . f . p)
    for A, B, X, Y in itertools.product(objs, repeat=4):
        ps = _homs(E, X, A, bounds)[:3]
        qs = _homs(E, B, Y, bounds)[:3]
        fs = _homs(E, A, B, bounds)[:4]
        for p in ps:
            for q in qs:
                hm = E.hom_map(p, q)
                for f in fs:
                    lhs = V.compose(hm, E.kappa(f))
                    rhs = E.kappa(C.compose(q, C.compose(f, p)))
                    rep.record("kappa-natural",
                               _obj_desc(A, B, X, Y), lhs, rhs)

    # contravariant/covariant composition
    for A, B in itertools.product(objs, repeat=2):
        ps = _homs(E, A, A, bounds)[:3]
        qs = _homs(E, B, B, bounds)[:3]
        for p1, p2 in itertools.product(ps, repeat=2):
            for q1, q2 in itertools.product(qs, repeat=2):
                lhs = V.compose(E.hom_map(p2, q2), E.hom_map(p1, q1))
                rhs = E.hom_map(C.compose(p1, p2), C.compose(q2, q1))
                rep.record("hom_map-compose", _obj_desc(A, B), lhs, rhs)
    return rep
