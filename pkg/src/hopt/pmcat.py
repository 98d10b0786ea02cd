"""Enrichment-preserving monoidal functors and idempotent splitting.

A PmFunctor carries three pieces of data between enrichments: a
monoidal functor FV on the enriching categories, a monoidal functor FC
on the enriched ones, and hom cells F_hom(A,B): FV([A,B]) -> [FC A,
FC B].  The three compatibility conditions checked here:

  P1  naming:       F_hom . FV(kappa f) . u  =  kappa'(FC f)
  P2  composition:  F_hom . FV(seq) . m      =  seq' . (F_hom x F_hom)
  P3  juxtaposition: F_hom . FV(par) . m
        =  hom_map'(mc_inv, mc) . par' . (F_hom x F_hom)

where u and m are FV's unit and multiplication cells and mc is FC's
multiplication cell (the hom_map sandwich transports between
[FA (x) FB, ...] and [F(A (x) B), ...]).

gamma_layer builds the canonical hom cell for the raising functor
[I,-]: feed the name of an arrow I -> A into the first slot of
hom-composition.

The Karoubi construction splits idempotents: objects are pairs of a
base object and an idempotent on it, morphisms are base morphisms
absorbed on both sides, and the identity of (X,e) is e itself.
"""

import itertools

from .errors import (
    BoundExceededError,
    ShapeMismatchError,
    TypeMismatchError,
    UnsupportedError,
)
from .kernel import (
    HomList,
    Model,
    Morphism,
    ObjectExpr,
    is_idempotent,
    object_inventory,
)
from .report import Bounds, LawReport
from .enrichment import EnrichedSmc, partial_insertion, _obj_desc, _homs


class FunctorData:
    """Object/morphism action of a monoidal functor plus its cells.

    Cells default to identities (a strict functor).  Actions are
    callables; results are cached so repeated checks do not rebuild
    tables.
    """

    def __init__(self, source, target, obj_map, mor_map,
                 unit_cell=None, mult_cell=None, name="functor"):
        self.source = source
        self.target = target
        self._obj_map = obj_map
        self._mor_map = mor_map
        self._unit_cell = unit_cell
        self._mult_cell = mult_cell
        self.name = name
        self._obj_cache = {}
        self._mor_cache = {}

    def obj(self, A):
        got = self._obj_cache.get(A.atoms)
        if got is None:
            got = self._obj_map(A)
            if got.model is not self.target:
                raise TypeMismatchError(
                    f"{self.name}: object image in wrong model")
            self._obj_cache[A.atoms] = got
        return got

    def mor(self, f):
        key = f.canon()
        got = self._mor_cache.get(key)
        if got is None:
            got = self._mor_map(f)
            if got.dom != self.obj(f.dom) or got.cod != self.obj(f.cod):
                raise TypeMismatchError(
                    f"{self.name}: image of {f!r} has boundary "
                    f"{got.dom!r} -> {got.cod!r}, expected "
                    f"{self.obj(f.dom)!r} -> {self.obj(f.cod)!r}")
            self._mor_cache[key] = got
        return got

    def unit(self):
        """Cell I' -> F(I)."""
        if self._unit_cell is not None:
            return self._unit_cell
        return self.target.identity(self.obj(self.source.unit()))

    def mult(self, A, B):
        """Cell F(A) (x) F(B) -> F(A (x) B)."""
        if self._mult_cell is not None:
            return self._mult_cell(A, B)
        return self.target.identity(self.obj(A @ B))


class PmFunctor:
    """Enrichment-preserving data between two enrichments."""

    def __init__(self, src, tgt, FV, FC, hom_cell, name="pm"):
        self.src = src
        self.tgt = tgt
        self.FV = FV
        self.FC = FC
        self._hom_cell = hom_cell
        self.name = name
        self._hom_cache = {}

    def hom(self, A, B):
        key = (A.atoms, B.atoms)
        got = self._hom_cache.get(key)
        if got is None:
            got = self._hom_cell(A, B)
            self._hom_cache[key] = got
        return got


def check_pm(P, bounds=None, report=None):
    """Functoriality, cell naturality, and P1-P3 on an inventory."""
    bounds = bounds or Bounds()
    rep = report or LawReport("pm", P.name, bounds.as_dict())
    E, E2 = P.src, P.tgt
    V2 = E2.V
    objs = E.objects(bounds)

    # functor laws for FC (FV is exercised through P1-P3 composites)
    for A in objs:
        rep.record("functor-id", _obj_desc(A),
                   P.FC.mor(E.C.identity(A)),
                   E2.C.identity(P.FC.obj(A)))
    for A, B, C in itertools.product(objs, repeat=3):
        fs = _homs(E, A, B, bounds)[:4]
        gs = _homs(E, B, C, bounds)[:4]
        for f in fs:
            for g in gs:
                rep.record(
                    "functor-compose", _obj_desc(A, B, C),
                    P.FC.mor(E.C.compose(g, f)),
                    E2.C.compose(P.FC.mor(g), P.FC.mor(f)))

    # mult-cell naturality for FC
    for A, B, A2, B2 in itertools.product(objs, repeat=4):
        fs = _homs(E, A, A2, bounds)[:3]
        gs = _homs(E, B, B2, bounds)[:3]
        mc = P.FC.mult(A, B)
        mc2 = P.FC.mult(A2, B2)
        for f in fs:
            for g in gs:
                lhs = E2.C.compose(
                    mc2, E2.C.tensor(P.FC.mor(f), P.FC.mor(g)))
                rhs = E2.C.compose(P.FC.mor(E.C.tensor(f, g)), mc)
                rep.record("cell-natural", _obj_desc(A, B, A2, B2),
                           lhs, rhs)

    # P1: names are preserved
    u = P.FV.unit()
    for A, B in itertools.product(objs, repeat=2):
        for f in _homs(E, A, B, bounds):
            lhs = V2.compose(P.hom(A, B),
                             V2.compose(P.FV.mor(E.kappa(f)), u))
            rhs = E2.kappa(P.FC.mor(f))
            rep.record(
                "P1", _obj_desc(A, B) +
                f" f={E.C.payload_canon(f.payload)!r}", lhs, rhs)

    # P2: hom-composition is preserved
    for A, B, C in itertools.product(objs, repeat=3):
        m = P.FV.mult(E.hom_ob(A, B), E.hom_ob(B, C))
        lhs = V2.compose(P.hom(A, C),
                         V2.compose(P.FV.mor(E.seq(A, B, C)), m))
        rhs = V2.compose(
            E2.seq(P.FC.obj(A), P.FC.obj(B), P.FC.obj(C)),
            V2.tensor(P.hom(A, B), P.hom(B, C)))
        rep.record("P2", _obj_desc(A, B, C), lhs, rhs)

    # P3: hom-juxtaposition is preserved up to the FC cells
    for A, A2, B, B2 in itertools.product(objs, repeat=4):
        m = P.FV.mult(E.hom_ob(A, A2), E.hom_ob(B, B2))
        lhs = V2.compose(
            P.hom(A @ B, A2 @ B2),
            V2.compose(P.FV.mor(E.par(A, A2, B, B2)), m))
        mc = P.FC.mult(A, B)
        mc2 = P.FC.mult(A2, B2)
        sandwich = E2.hom_map(E2.C.inverse(mc), mc2)
        rhs = V2.compose(
            sandwich,
            V2.compose(
                E2.par(P.FC.obj(A), P.FC.obj(A2),
                       P.FC.obj(B), P.FC.obj(B2)),
                V2.tensor(P.hom(A, A2), P.hom(B, B2))))
        rep.record("P3", _obj_desc(A, A2, B, B2), lhs, rhs)

    return rep


def compose_pm(Q, P, name=None):
    """Composite pm data (Q after P); cells compose the standard way."""
    if P.tgt is not Q.src:
        raise TypeMismatchError("pm composition boundary mismatch")

    def obj_v(A):
        return Q.FV.obj(P.FV.obj(A))

    def mor_v(f):
        return Q.FV.mor(P.FV.mor(f))

    def obj_c(A):
        return Q.FC.obj(P.FC.obj(A))

    def mor_c(f):
        return Q.FC.mor(P.FC.mor(f))

    tv = Q.FV.target

    def mult_v(A, B):
        return tv.compose(Q.FV.mor(P.FV.mult(A, B)),
                          Q.FV.mult(P.FV.obj(A), P.FV.obj(B)))

    unit_v = tv.compose(Q.FV.mor(P.FV.unit()), Q.FV.unit())
    tc = Q.FC.target

    def mult_c(A, B):
        return tc.compose(Q.FC.mor(P.FC.mult(A, B)),
                          Q.FC.mult(P.FC.obj(A), P.FC.obj(B)))

    unit_c = tc.compose(Q.FC.mor(P.FC.unit()), Q.FC.unit())

    FV = FunctorData(P.FV.source, tv, obj_v, mor_v,
                     unit_cell=unit_v, mult_cell=mult_v,
                     name=f"{Q.FV.name}.{P.FV.name}")
    FC = FunctorData(P.FC.source, tc, obj_c, mor_c,
                     unit_cell=unit_c, mult_cell=mult_c,
                     name=f"{Q.FC.name}.{P.FC.name}")

    def hom_cell(A, B):
        return tv.compose(Q.hom(P.FC.obj(A), P.FC.obj(B)),
                          Q.FV.mor(P.hom(A, B)))

    return PmFunctor(P.src, Q.tgt, FV, FC, hom_cell,
                     name=name or f"{Q.name}.{P.name}")


def is_fully_faithful(P, bounds=None, report=None):
    """FC is injective and surjective on bounded hom-sets."""
    bounds = bounds or Bounds()
    rep = report or LawReport("fully-faithful", P.name, bounds.as_dict())
    E, E2 = P.src, P.tgt
    objs = E.objects(bounds)
    for A, B in itertools.product(objs, repeat=2):
        src = _homs(E, A, B, bounds)
        images = {}
        for f in src:
            rep.cases_total += 1
            ff = P.FC.mor(f)
            key = ff.canon()
            if key in images and images[key] != f:
                rep.fail("faithful-functor", _obj_desc(A, B),
                         f, images[key],
                         trace="two arrows with one image")
            images[key] = f
        tgt = _homs(E2, P.FC.obj(A), P.FC.obj(B), bounds)
        if getattr(src, "sampled", False) or getattr(tgt, "sampled", False):
            rep.note("fullness on sampled hom-sets is containment only")
        missing = [g for g in tgt if g.canon() not in images]
        rep.cases_total += 1
        if missing:
            rep.fail("full-functor", _obj_desc(A, B),
                     f"{len(missing)} arrows missed",
                     "image covers hom-set",
                     trace=f"first missed: {missing[0]!r}")
    return rep


# ---------------------------------------------------------------------------
# the canonical hom cell of the raising functor


def gamma_layer(E, A, B):
    """gamma: [I,[A,B]] -> [[I,A],[I,B]].

    Partial insertion of the named inner arrow into the first slot of
    hom-composition [I,A] (x) [A,B] -> [I,B].
    """
    V = E.V
    I = E.C.unit()
    hab = E.hom_ob(A, B)
    ria = E.hom_ob(I, A)
    rib = E.hom_ob(I, B)
    ins = partial_insertion(E, I, hab, ria, rib)
    named_seq = E.kappa(E.seq(I, A, B))
    return V.compose(
        ins, V.tensor(V.identity(E.hom_ob(I, hab)), named_seq))


def raising_functor(E):
    """[I,-] as a pm endofunctor of E, with gamma as its hom cell.

    Unit cell: the name of id_I.  Multiplication cell: par at unit
    slots, [I,A] (x) [I,B] -> [I, A (x) B].
    """
    C = E.C
    I = C.unit()

    def obj_map(A):
        return E.hom_ob(I, A)

    def mor_map(f):
        return E.hom_map(C.identity(I), f)

    def mult_cell(A, B):
        return E.par(I, A, I, B)

    FD = FunctorData(C, C, obj_map, mor_map,
                     unit_cell=E.kappa(C.identity(I)),
                     mult_cell=mult_cell, name="raise")

    def hom_cell(A, B):
        return gamma_layer(E, A, B)

    return PmFunctor(E, E, FD, FD, hom_cell, name=E.name + ">raise")


# ---------------------------------------------------------------------------
# Karoubi envelope


class KaroubiModel(Model):
    """Idempotent splitting of a base model.

    Atoms are ("split", base_atoms, idem_canon): a base object together
    with the canonical payload of an idempotent on it.  Morphisms store
    base payloads; composition, tensor, and enumeration delegate to the
    base after absorbing through the endpoint idempotents.
    """

    def __init__(self, base):
        super().__init__(base.enum_cap)
        self.base = base
        self.kind = "KAR:" + base.kind
        self._sym_builders = {}
        self._idem_cache = {}

    # -- objects -------------------------------------------------------

    def atom_for(self, X, e):
        if e.dom != X or e.cod != X:
            raise TypeMismatchError("idempotent boundary mismatch")
        if not is_idempotent(self.base, e):
            raise ShapeMismatchError("not idempotent")
        return ("split", X.atoms, self.base.payload_canon(e.payload))

    def split(self, X, e):
        """Single-atom object splitting e: X -> X."""
        return ObjectExpr(self, (self.atom_for(X, e),))

    def symbolic_split(self, X, tag, args):
        """Split at an idempotent described by a registered builder.

        The third atom slot holds (tag, *args) instead of a payload
        canon, so idempotents on large carriers never materialize just
        to give the object an identity.  Callers guarantee the builder
        output is idempotent.
        """
        if tag not in self._sym_builders:
            raise UnsupportedError(f"no idempotent builder {tag!r}")
        return ObjectExpr(self, (("split", X.atoms, (tag,) + args),))

    def register_sym(self, tag, builder):
        self._sym_builders[tag] = builder

    def base_object(self, obj):
        atoms = ()
        for a in obj.atoms:
            atoms += a[1]
        return ObjectExpr(self.base, atoms)

    def idem(self, obj):
        """The identity of obj, as a base morphism."""
        got = self._idem_cache.get(obj.atoms)
        if got is None:
            got = self.base.identity(self.base.unit())
            for a in obj.atoms:
                got = self.base.tensor(got, self._atom_idem(a))
            self._idem_cache[obj.atoms] = got
        return got

    def _atom_idem(self, atom):
        X = ObjectExpr(self.base, atom[1])
        slot = atom[2]
        if isinstance(slot, tuple) and slot and slot[0] in self._sym_builders:
            return self._sym_builders[slot[0]](*slot[1:])
        return morphism_from_canon(self.base, X, X, slot)

    def atom_size(self, atom):
        if isinstance(atom, tuple) and atom and atom[0] == "split":
            return self.base.size(ObjectExpr(self.base, atom[1]))
        raise TypeMismatchError(f"unknown atom {atom!r}")

    def declared_atoms(self):
        return []

    # -- morphisms -----------------------------------------------------

    def _lift(self, m):
        """View a morphism of this model as a base morphism."""
        return Morphism(self.base, self.base_object(m.dom),
                        self.base_object(m.cod), m._payload)

    def wrap(self, dom, cod, base_m):
        return Morphism(self, dom, cod, base_m._payload)

    def make(self, dom, cod, base_m):
        """Admit a base morphism after checking it absorbs."""
        if base_m.dom != self.base_object(dom) or \
                base_m.cod != self.base_object(cod):
            raise TypeMismatchError("base boundary mismatch")
        absorbed = self.base.compose(
            self.idem(cod), self.base.compose(base_m, self.idem(dom)))
        if absorbed != base_m:
            raise ShapeMismatchError(
                "morphism does not absorb the endpoint idempotents")
        return self.wrap(dom, cod, base_m)

    def absorb(self, dom, cod, base_m):
        """Project any base morphism into the hom-set."""
        absorbed = self.base.compose(
            self.idem(cod), self.base.compose(base_m, self.idem(dom)))
        return self.wrap(dom, cod, absorbed)

    def identity(self, obj):
        return self.wrap(obj, obj, self.idem(obj))

    def compose(self, g, f):
        self._check_composable(g, f)
        return self.wrap(f.dom, g.cod,
                         self.base.compose(self._lift(g), self._lift(f)))

    def tensor(self, f, g):
        out = self.base.tensor(self._lift(f), self._lift(g))
        return self.wrap(f.dom @ g.dom, f.cod @ g.cod, out)

    def braid(self, a, b):
        ea = self.idem(a)
        eb = self.idem(b)
        sw = self.base.braid(self.base_object(a), self.base_object(b))
        out = self.base.compose(
            self.base.tensor(eb, ea),
            self.base.compose(sw, self.base.tensor(ea, eb)))
        return self.wrap(a @ b, b @ a, out)

    def payload_canon(self, payload):
        return self.base.payload_canon(payload)

    def _materialize(self, m):
        return self.base._materialize(self._lift(m))

    def apply(self, m, token):
        return self.base.apply(self._lift(m), token)

    def enumerate_homs(self, dom, cod, bound=None, samples=None, seed=None):
        base_homs = self.base.enumerate_homs(
            self.base_object(dom), self.base_object(cod),
            bound=bound, samples=samples, seed=seed)
        if base_homs.sampled:
            out = []
            seen = set()
            for m in base_homs:
                a = self.absorb(dom, cod, m)
                if a.canon() not in seen:
                    seen.add(a.canon())
                    out.append(a)
            return HomList(out, sampled=True)
        ex = self.idem(dom)
        ey = self.idem(cod)
        out = []
        for m in base_homs:
            if self.base.compose(ey, self.base.compose(m, ex)) == m:
                out.append(self.wrap(dom, cod, m))
        return HomList(out)

    def is_iso(self, m):
        try:
            self.inverse(m)
            return True
        except (TypeMismatchError, UnsupportedError, BoundExceededError):
            return False

    def inverse(self, m):
        # base-invertible payloads (identity-shaped cells) first, then
        # an exhaustive scan of the split hom-set
        try:
            cand = self.absorb(m.cod, m.dom,
                               self.base.inverse(self._lift(m)))
            if self._two_sided(cand, m):
                return cand
        except (TypeMismatchError, UnsupportedError):
            pass
        for c in self.enumerate_homs(m.cod, m.dom):
            if self._two_sided(c, m):
                return c
        raise TypeMismatchError("not invertible in the split model")

    def _two_sided(self, c, m):
        return (self.compose(c, m) == self.identity(m.dom)
                and self.compose(m, c) == self.identity(m.cod))


def morphism_from_canon(model, dom, cod, canon):
    """Rebuild a morphism from its canonical payload."""
    from .kernel import FinRelModel, FinSetModel, MatQModel
    from .ratmat import RatMat
    from fractions import Fraction
    if isinstance(model, FinSetModel):
        return Morphism(model, dom, cod, canon)
    if isinstance(model, FinRelModel):
        return Morphism(model, dom, cod, frozenset(canon))
    if isinstance(model, MatQModel):
        rows, cols, ents = canon
        entries = {(i, j): Fraction(n, d) for i, j, n, d in ents}
        return Morphism(model, dom, cod, RatMat(rows, cols, entries))
    raise UnsupportedError("no reconstruction for this backend")


def karoubi_objects(KC, base_inventory, cap=4):
    """Split objects: for each base object, the identity plus the
    canonically smallest idempotents, at most cap in total."""
    out = [KC.unit()]
    for X in base_inventory:
        if X.is_unit:
            continue
        idems = [KC.base.identity(X)]
        try:
            homs = KC.base.enumerate_homs(X, X)
        except BoundExceededError:
            homs = []
        extra = [m for m in homs
                 if is_idempotent(KC.base, m) and m != idems[0]]
        extra.sort(key=lambda m: m.canon())
        idems.extend(extra)
        for e in idems[:cap]:
            out.append(KC.split(X, e))
    return out


class KaroubiEnrichment(EnrichedSmc):
    """The base enrichment transported to split objects.

    Hom-objects split the base hom-object at hom_map(e, f); every
    structure map is the base one absorbed through those idempotents.
    """

    def __init__(self, base_E):
        if base_E.V is not base_E.C:
            raise UnsupportedError("splitting needs a self-enrichment")
        K = KaroubiModel(base_E.C)
        super().__init__(K, K)
        self.base = base_E
        self.name = base_E.name + "+karoubi"
        self._hob_cache = {}
        K.register_sym("hom", self._hom_idem)

    def _hom_idem(self, a_atoms, b_atoms):
        # hom_map(e, f) of idempotents is idempotent, so no re-check
        K = self.C
        ea = K.idem(ObjectExpr(K, a_atoms))
        eb = K.idem(ObjectExpr(K, b_atoms))
        return self.base.hom_map(ea, eb)

    def hom_ob(self, A, B):
        key = (A.atoms, B.atoms)
        got = self._hob_cache.get(key)
        if got is None:
            K = self.C
            base_hob = self.base.hom_ob(K.base_object(A),
                                        K.base_object(B))
            got = K.symbolic_split(base_hob, "hom", key)
            self._hob_cache[key] = got
        return got

    def kappa(self, m):
        K = self.C
        s = self.base.kappa(K._lift(m))
        return Morphism(K, K.unit(), self.hom_ob(m.dom, m.cod),
                        s._payload)

    def kappa_inv(self, s, dom=None, cod=None):
        if dom is None or cod is None:
            raise TypeMismatchError(
                "split kappa_inv needs the dom/cod objects")
        K = self.C
        base_s = Morphism(K.base, K.base.unit(),
                          self.base.hom_ob(K.base_object(dom),
                                           K.base_object(cod)),
                          s._payload)
        back = self.base.kappa_inv(base_s, dom=K.base_object(dom),
                                   cod=K.base_object(cod))
        return Morphism(K, dom, cod, back._payload)

    def seq(self, A, B, C):
        K = self.C
        bs = self.base
        hab, hbc, hac = (self.hom_ob(A, B), self.hom_ob(B, C),
                         self.hom_ob(A, C))
        raw = bs.V.compose(
            K.idem(hac),
            bs.V.compose(
                bs.seq(K.base_object(A), K.base_object(B),
                       K.base_object(C)),
                bs.V.tensor(K.idem(hab), K.idem(hbc))))
        return Morphism(K, hab @ hbc, hac, raw._payload)

    def par(self, A, A2, B, B2):
        K = self.C
        bs = self.base
        ha = self.hom_ob(A, A2)
        hb = self.hom_ob(B, B2)
        hab = self.hom_ob(A @ B, A2 @ B2)
        raw = bs.V.compose(
            K.idem(hab),
            bs.V.compose(
                bs.par(K.base_object(A), K.base_object(A2),
                       K.base_object(B), K.base_object(B2)),
                bs.V.tensor(K.idem(ha), K.idem(hb))))
        return Morphism(K, ha @ hb, hab, raw._payload)

    def hom_map(self, p, q):
        K = self.C
        raw = self.base.hom_map(K._lift(p), K._lift(q))
        return Morphism(K, self.hom_ob(p.cod, q.dom),
                        self.hom_ob(p.dom, q.cod), raw._payload)

    def objects(self, bounds):
        base_inv = object_inventory(self.base.C, bounds.max_size,
                                    bounds.expr_len)
        return karoubi_objects(self.C, base_inv, cap=bounds.karoubi_cap)


def karoubi(E):
    return KaroubiEnrichment(E)


def karoubi_embedding(E):
    """The identity-on-payload pm functor E -> karoubi(E)."""
    KE = karoubi(E)
    K = KE.C

    def obj_map(A):
        if A.is_unit:
            return K.unit()
        return K.split(A, E.C.identity(A))

    def mor_map(f):
        return Morphism(K, obj_map(f.dom), obj_map(f.cod), f._payload)

    def mult_cell(A, B):
        im = E.C.identity(A @ B)
        return Morphism(K, obj_map(A) @ obj_map(B), obj_map(A @ B),
                        im._payload)

    FD = FunctorData(E.C, K, obj_map, mor_map,
                     mult_cell=mult_cell, name="split-embed")

    def hom_cell(A, B):
        hob = E.hom_ob(A, B)
        im = E.V.identity(hob)
        return Morphism(K, obj_map(hob), KE.hom_ob(obj_map(A), obj_map(B)),
                        im._payload)

    return PmFunctor(E, KE, FD, FD, hom_cell, name=E.name + ">karoubi")
