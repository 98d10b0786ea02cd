"""Raising chains, finite mergers, and closure at the apex.

A tower is a chain of enrichments in which each level's hom-model is
the next level's object model.  Raising functors [I,-] climb the
chain one level at a time; a merger embeds every level into a single
apex category through compatible functors and linking isomorphisms.
The apex then supports arrow objects, evaluation, and currying built
purely from tower data, with the infinite-order hypothesis replaced
by an explicit headroom precondition.
"""

import itertools

from .errors import (
    BoundExceededError,
    ChainMismatchError,
    LawViolationError,
    TypeMismatchError,
    UnsupportedError,
)
from .kernel import (
    FinRelModel,
    FinSetModel,
    MatQModel,
    Morphism,
    object_inventory,
)
from .ratmat import RatMat, mat_rank
from .report import Bounds, LawReport
from .enrichment import (
    _homs,
    _obj_desc,
    check_enriched_laws,
    partial_insertion,
)
from .closure import curry as hom_curry
from .pmcat import (
    FunctorData,
    PmFunctor,
    compose_pm,
    gamma_layer,
    raising_functor,
)


def identity_pm(E):
    """The identity of E, as enrichment-preserving functor data."""
    C = E.C
    FD = FunctorData(C, C, lambda A: A, lambda f: f, name="id")

    def hom_cell(A, B):
        return E.V.identity(E.hom_ob(A, B))

    return PmFunctor(E, E, FD, FD, hom_cell, name=E.name + ">id")


class Tower:
    """Levels 1..N of models, linked by the layer enrichments.

    layers[i-1] enriches level i in level i+1, so N = len(layers)+1.
    """

    def __init__(self, layers):
        layers = tuple(layers)
        if not layers:
            raise ChainMismatchError("a tower needs at least one layer")
        for k in range(len(layers) - 1):
            if layers[k].V is not layers[k + 1].C:
                raise ChainMismatchError(
                    f"layer {k + 1} hom-model is not layer {k + 2}'s "
                    "object model")
        self.layers = layers
        self._raise_cache = {}

    @property
    def order(self):
        return len(self.layers) + 1

    def model(self, i):
        if not 1 <= i <= self.order:
            raise IndexError(f"level {i} outside 1..{self.order}")
        if i <= len(self.layers):
            return self.layers[i - 1].C
        return self.layers[-1].V

    def enrichment(self, i):
        if not 1 <= i <= self.order:
            raise IndexError(f"level {i} outside 1..{self.order}")
        if i <= len(self.layers):
            return self.layers[i - 1]
        top = self.layers[-1]
        if top.V is not top.C:
            raise UnsupportedError(
                "the top level is enriched only when the last layer is "
                "a self-enrichment")
        return top

    def raising(self, i, j):
        """R_i^j, the composite of one-step raisings between levels."""
        if not 1 <= i <= j <= self.order:
            raise IndexError(f"raising indices {i},{j} outside the tower")
        got = self._raise_cache.get((i, j))
        if got is None:
            if i == j:
                got = identity_pm(self.enrichment(i))
            elif j == i + 1:
                got = raising_functor(self.enrichment(i))
            else:
                got = compose_pm(raising_functor(self.enrichment(j - 1)),
                                 self.raising(i, j - 1),
                                 name=f"R{i}^{j}")
            self._raise_cache[(i, j)] = got
        return got

    @property
    def constant(self):
        first = self.layers[0]
        return (all(layer is first for layer in self.layers)
                and first.V is first.C)


def build_tower(layers, bounds=None, check=True):
    """Validate the chain and the laws of every distinct layer."""
    T = Tower(layers)
    if check:
        b = bounds or Bounds(max_size=2)
        seen = set()
        for E in T.layers:
            if id(E) in seen:
                continue
            seen.add(id(E))
            rep = check_enriched_laws(E, b)
            if rep.cases_failed:
                raise LawViolationError(
                    f"layer {E.name} fails its law suite: "
                    f"{rep.violations[0].law} at "
                    f"{rep.violations[0].instance}")
    return T


# ---------------------------------------------------------------------------
# mergers


class FiniteMerger:
    """Compatible functors from every level into one apex category.

    functors[i] maps level i into the apex; eta(i, X) is the linking
    component F_i(X) -> F_{i+1}(R_i^{i+1} X).  Level data assigns each
    apex object a layer, a representative, and the identification iso.
    """

    def __init__(self, tower, functors, eta, name="merger"):
        self.tower = tower
        self.functors = functors
        self._eta = eta
        self.apex_E = tower.enrichment(tower.order)
        self.apex = self.apex_E.C
        self.name = name
        self._level_cache = {}

    @property
    def order(self):
        return self.tower.order

    def F(self, i):
        return self.functors[i]

    def eta(self, i, X):
        if not 1 <= i <= self.order - 1:
            raise IndexError(f"eta level {i} outside 1..{self.order - 1}")
        return self._eta(i, X)

    def unit_path(self, i):
        """The apex state I -> F_i(I_i)."""
        return self.F(i).FC.unit()

    def level_data(self, A):
        """(layer, representative, iso, iso inverse) for an apex object.

        Constant self-enriched towers assign every object the lowest
        layer, so headroom is maximal; the iso is the eta-chain up to
        F_1(A).
        """
        if not self.tower.constant:
            raise UnsupportedError(
                "level assignment is defined for constant self-enriched "
                "towers only")
        got = self._level_cache.get(A.atoms)
        if got is None:
            E = self.apex_E
            V = E.C
            I = V.unit()
            fwd = V.identity(A)
            bwd = V.identity(A)
            cur = A
            for _ in range(self.order - 1):
                fwd = V.compose(E.eta(cur), fwd)
                bwd = V.compose(bwd, E.eta_inv(cur))
                cur = E.hom_ob(I, cur)
            if cur != self.F(1).FC.obj(A):
                raise TypeMismatchError(
                    "eta-chain does not land in the level-1 image")
            got = (1, A, fwd, bwd)
            self._level_cache[A.atoms] = got
        return got


def trivial_merger(T):
    """Apex = top level, F_i = R_i^N, linking isos identity-strict."""
    N = T.order
    functors = {i: T.raising(i, N) for i in range(1, N + 1)}
    apex = T.model(N)

    def eta(i, X):
        return apex.identity(functors[i].FC.obj(X))

    top = T.enrichment(N)
    return FiniteMerger(T, functors, eta, name=top.name + "+merger")


def _swap_auto(model, X):
    """The automorphism of X exchanging its first two points."""
    n = model.size(X)
    if n < 2:
        return model.identity(X)
    if isinstance(model, FinSetModel):
        car = model.carrier(X)
        table = {t: t for t in car}
        table[car[0]], table[car[1]] = car[1], car[0]
        return model.make(X, X, table)
    if isinstance(model, FinRelModel):
        pairs = {(0, 1), (1, 0)} | {(k, k) for k in range(2, n)}
        return Morphism(model, X, X, frozenset(pairs))
    if isinstance(model, MatQModel):
        from fractions import Fraction
        entries = {(0, 1): Fraction(1), (1, 0): Fraction(1)}
        entries.update({(k, k): Fraction(1) for k in range(2, n)})
        return Morphism(model, X, X, RatMat(n, n, entries))
    raise UnsupportedError("no swap automorphism for this backend")


def corrupt_eta(M):
    """A merger whose linking maps are twisted by a point swap.

    Components stay isomorphisms but stop being natural, so the
    mu condition acquires witnesses.
    """
    def bad(i, X):
        base = M.eta(i, X)
        return M.apex.compose(_swap_auto(M.apex, base.cod), base)

    return FiniteMerger(M.tower, M.functors, bad,
                        name=M.name + "+corrupted")


# ---------------------------------------------------------------------------
# the mu family and its condition


def mu(M, i):
    """mu_i(A, B) = F_{i+1}(gamma_{A,B}) . eta_i at the hom object."""
    if i + 2 > M.order:
        raise BoundExceededError(
            f"mu at level {i} needs order >= {i + 2}, tower has "
            f"{M.order}")
    T = M.tower
    E_i = T.enrichment(i)

    def component(A, B):
        g = gamma_layer(E_i, A, B)
        return M.apex.compose(M.F(i + 1).FC.mor(g),
                              M.eta(i, E_i.hom_ob(A, B)))

    return component


def check_mu_condition(M, i, bounds=None, report=None):
    """Names of arrows lift through mu consistently across levels.

    For every f: A -> B at level i, pushing the name of f up with
    mu agrees with naming the raised arrow one level higher, both
    taken as apex states along the functors' unit paths.
    """
    bounds = bounds or Bounds()
    rep = report or LawReport("tower-mu", M.name, bounds.as_dict())
    T = M.tower
    if i + 2 > M.order:
        raise BoundExceededError(
            f"mu condition at level {i} needs order >= {i + 2}")
    E_i = T.enrichment(i)
    E_next = T.enrichment(i + 1)
    R_step = T.raising(i, i + 1)
    mu_i = mu(M, i)
    apex = M.apex
    u_i = M.unit_path(i)
    u_next = M.unit_path(i + 1)
    objs = object_inventory(T.model(i), bounds.max_size, bounds.expr_len)
    for A, B in itertools.product(objs, repeat=2):
        mu_ab = mu_i(A, B)
        for f in _homs(E_i, A, B, bounds):
            lhs = apex.compose(
                mu_ab, apex.compose(M.F(i).FC.mor(E_i.kappa(f)), u_i))
            rhs = apex.compose(
                M.F(i + 1).FC.mor(E_next.kappa(R_step.FC.mor(f))),
                u_next)
            rep.record(
                "mu-state-lift",
                _obj_desc(A, B) + f" lvl={i}"
                f" f={E_i.C.payload_canon(f.payload)!r}",
                lhs, rhs)
    return rep


def check_merger(M, bounds=None, report=None):
    """Linking maps are iso, natural, monoidal; images cover levels."""
    bounds = bounds or Bounds()
    rep = report or LawReport("tower-merger", M.name, bounds.as_dict())
    T = M.tower
    N = M.order
    apex = M.apex
    for i in range(1, N):
        E_i = T.enrichment(i)
        R_step = T.raising(i, i + 1)
        F_i, F_next = M.F(i), M.F(i + 1)
        objs = object_inventory(T.model(i), bounds.max_size,
                                bounds.expr_len)
        for X in objs:
            comp = M.eta(i, X)
            rep.record("eta-boundary", _obj_desc(X) + f" lvl={i}",
                       (comp.dom.atoms, comp.cod.atoms),
                       (F_i.FC.obj(X).atoms,
                        F_next.FC.obj(R_step.FC.obj(X)).atoms))
            inv = apex.inverse(comp)
            rep.record("eta-iso-left", _obj_desc(X) + f" lvl={i}",
                       apex.compose(inv, comp),
                       apex.identity(comp.dom))
            rep.record("eta-iso-right", _obj_desc(X) + f" lvl={i}",
                       apex.compose(comp, inv),
                       apex.identity(comp.cod))
        rep.record(
            "eta-unit", f"lvl={i}",
            apex.compose(M.eta(i, T.model(i).unit()), M.unit_path(i)),
            apex.compose(F_next.FC.mor(R_step.FC.unit()),
                         M.unit_path(i + 1)))
        for X, Y in itertools.product(objs, repeat=2):
            for f in _homs(E_i, X, Y, bounds):
                rep.record(
                    "eta-natural",
                    _obj_desc(X, Y) + f" lvl={i}"
                    f" f={E_i.C.payload_canon(f.payload)!r}",
                    apex.compose(M.eta(i, Y), F_i.FC.mor(f)),
                    apex.compose(F_next.FC.mor(R_step.FC.mor(f)),
                                 M.eta(i, X)))
            rep.record(
                "eta-monoidal", _obj_desc(X, Y) + f" lvl={i}",
                apex.compose(M.eta(i, X @ Y), F_i.FC.mult(X, Y)),
                apex.compose(
                    F_next.FC.mor(R_step.FC.mult(X, Y)),
                    apex.compose(
                        F_next.FC.mult(R_step.FC.obj(X),
                                       R_step.FC.obj(Y)),
                        apex.tensor(M.eta(i, X), M.eta(i, Y)))))
    if T.constant:
        for i in range(1, N + 1):
            objs = object_inventory(T.model(i), bounds.max_size,
                                    bounds.expr_len)
            for X in objs:
                A = M.F(i).FC.obj(X)
                _, _, fwd, bwd = M.level_data(A)
                rep.record("image-covered", _obj_desc(A) + f" lvl={i}",
                           apex.compose(bwd, fwd), apex.identity(A))
                rep.record("image-covered-inv",
                           _obj_desc(A) + f" lvl={i}",
                           apex.compose(fwd, bwd),
                           apex.identity(fwd.cod))
    else:
        rep.note("image scan limited to constant towers")
    return rep


# ---------------------------------------------------------------------------
# closure at the apex


def _eta_path(M, a, b, X):
    """Composite linking map F_a(X) -> F_b(R_a^b X)."""
    T = M.tower
    out = M.apex.identity(M.F(a).FC.obj(X))
    for k in range(a, b):
        out = M.apex.compose(M.eta(k, T.raising(a, k).FC.obj(X)), out)
    return out


def _lifts(M, A):
    """(level-l rep of A at its own layer, iso A -> F_l(rep), inverse)."""
    l, X, fwd, bwd = M.level_data(A)
    return l, X, fwd, bwd


def _common_level(M, *objs):
    data = [_lifts(M, A) for A in objs]
    l = max(d[0] for d in data)
    out = []
    for (la, XA, fwd, bwd), A in zip(data, objs):
        up = M.tower.raising(la, l)
        rep_l = up.FC.obj(XA)
        lift = M.apex.compose(_eta_path(M, la, l, XA), fwd)
        drop = M.apex.compose(bwd, M.apex.inverse(_eta_path(M, la, l, XA)))
        out.append((rep_l, lift, drop))
    return l, out


def apex_arrow(M, A, B):
    """The apex object representing arrows A -> B."""
    l, ((A2, _, _), (B2, _, _)) = _headroom(M, A, B)
    E_l = M.tower.enrichment(l)
    return M.F(l + 1).FC.obj(E_l.hom_ob(A2, B2))


def _headroom(M, *objs):
    l, data = _common_level(M, *objs)
    if l + 1 > M.order - 1:
        raise BoundExceededError(
            f"tower headroom: arrow data lives at level {l + 1}, "
            f"which needs order >= {l + 2}; tower has {M.order}")
    return l, data


def apex_eval(M, A, B):
    """eval: A (x) (A => B) -> B, built from tower data alone."""
    l, ((A2, lift_a, _), (B2, _, drop_b)) = _headroom(M, A, B)
    T = M.tower
    E_l = T.enrichment(l)
    apex = M.apex
    I_l = T.model(l).unit()
    hab = E_l.hom_ob(A2, B2)
    ra2 = E_l.hom_ob(I_l, A2)
    arrow = M.F(l + 1).FC.obj(hab)
    up_a = apex.compose(M.eta(l, A2), lift_a)
    body = apex.compose(
        M.F(l + 1).FC.mor(E_l.seq(I_l, A2, B2)),
        apex.compose(M.F(l + 1).FC.mult(ra2, hab),
                     apex.tensor(up_a, apex.identity(arrow))))
    down_b = apex.compose(drop_b, apex.inverse(M.eta(l, B2)))
    return apex.compose(down_b, body)


def _lower_data(M, f, A, C_):
    """Everything the curry constructions share: reps, lifts, g, h."""
    B = f.cod
    if A @ C_ != f.dom:
        raise TypeMismatchError(
            f"domain {f.dom!r} does not split as {A!r} (x) {C_!r}")
    l, ((A2, lift_a, drop_a), (C2, lift_c, drop_c),
        (B2, lift_b, _)) = _headroom(M, A, C_, B)
    apex = M.apex
    E = M.apex_E
    m_l = M.F(l).FC.mult(A2, C2)
    h = apex.compose(
        lift_b,
        apex.compose(f, apex.compose(apex.tensor(drop_a, drop_c),
                                     apex.inverse(m_l))))
    I = apex.unit()
    doms, cods = [A2 @ C2], [B2]
    for _ in range(M.order - l):
        doms.append(E.hom_ob(I, doms[-1]))
        cods.append(E.hom_ob(I, cods[-1]))
    g = h
    for k in range(M.order - l - 1, -1, -1):
        g = apex.compose(E.eta_inv(cods[k]),
                         apex.compose(g, E.eta(doms[k])))
    return l, (A2, C2, B2), (lift_a, lift_c, lift_b), g, h


def apex_lower(M, f, A, C_):
    """The level-l arrow whose image under F_l is f, after the isos."""
    l, reps, _, g, h = _lower_data(M, f, A, C_)
    return l, reps, g, h


def apex_curry(M, f, A, C_):
    """The unique apex arrow C -> (A => B) matching f under eval."""
    l, (A2, C2, B2), (_, lift_c, _), g, _ = _lower_data(M, f, A, C_)
    T = M.tower
    apex = M.apex
    E_l = T.enrichment(l)
    I_l = T.model(l).unit()
    ins = partial_insertion(E_l, I_l, C2, A2, B2)
    ric = E_l.hom_ob(I_l, C2)
    core = E_l.V.compose(
        ins, E_l.V.tensor(E_l.V.identity(ric), E_l.kappa(g)))
    up_c = apex.compose(M.eta(l, C2), lift_c)
    return apex.compose(M.F(l + 1).FC.mor(core), up_c)


def transported_curry(M, f, A, C_):
    """The hom-level curry carried to the apex along the chain.

    An independent composite for the same arrow: curry at level l,
    push with R_l^N, then strip the leftover raising with the
    eta-inverse one level up.
    """
    l, (A2, C2, B2), (_, lift_c, _), g, _ = _lower_data(M, f, A, C_)
    T = M.tower
    apex = M.apex
    E_l = T.enrichment(l)
    c = hom_curry(E_l, g, A2, C2)
    H = E_l.hom_ob(A2, B2)
    up = T.raising(l, M.order).FC.mor(c)
    strip = T.raising(l + 1, M.order).FC.mor(E_l.eta_inv(H))
    return apex.compose(strip, apex.compose(up, lift_c))


def _apex_curry_unique_rank(M, e, A, C_, arrow, B):
    """Exact injectivity of h -> eval . (id (x) h) on rationals."""
    m = M.apex
    nh, nc = m.size(arrow), m.size(C_)
    na, nb = m.size(A), m.size(B)
    flat = RatMat(nb * na * nc, nh * nc)
    j = 0
    for r in range(nh):
        for c in range(nc):
            unit = m.matrix_unit(C_, arrow, r, c)
            out = m.compose(e, m.tensor(m.identity(A), unit))
            for (row, col), val in out.payload.entries.items():
                flat.entries[(col * nb + row, j)] = val
            j += 1
    return mat_rank(flat) == nh * nc


def check_apex_closed(M, bounds=None, report=None):
    """Existence and uniqueness of apex curry on in-headroom arrows."""
    bounds = bounds or Bounds()
    rep = report or LawReport("tower-closed", M.name, bounds.as_dict())
    apex = M.apex
    apex_E = M.apex_E
    rational = isinstance(apex, MatQModel)
    objs = object_inventory(M.tower.model(1), bounds.max_size,
                            bounds.expr_len)
    for A, C_, B in itertools.product(objs, repeat=3):
        e = apex_eval(M, A, B)
        arrow = apex_arrow(M, A, B)
        fs = _homs(apex_E, A @ C_, B, bounds)
        curries = {}
        for f in fs:
            fbar = apex_curry(M, f, A, C_)
            curries[f.canon()] = fbar
            rep.record(
                "apex-eval-equation",
                _obj_desc(A, C_, B)
                + f" f={apex.payload_canon(f.payload)!r}",
                apex.compose(e, apex.tensor(apex.identity(A), fbar)),
                f)
        if rational:
            rep.cases_total += 1
            if not _apex_curry_unique_rank(M, e, A, C_, arrow, B):
                rep.fail("apex-curry-unique", _obj_desc(A, C_, B),
                         "eval pairing rank deficient",
                         "injective pairing", trace="rank < dim")
            continue
        gs = apex.enumerate_homs(C_, arrow, bound=bounds.enum_cap)
        for f in fs:
            hits = [g for g in gs
                    if apex.compose(e, apex.tensor(apex.identity(A), g))
                    == f]
            rep.record(
                "apex-curry-unique",
                _obj_desc(A, C_, B)
                + f" f={apex.payload_canon(f.payload)!r}",
                [g.canon() for g in hits],
                [curries[f.canon()].canon()])
    return rep


def check_apex_matches_closure(M, bounds=None, report=None):
    """Two curry composites, one answer, on every shared instance."""
    bounds = bounds or Bounds()
    rep = report or LawReport("tower-cross", M.name, bounds.as_dict())
    apex = M.apex
    objs = object_inventory(M.tower.model(1), bounds.max_size,
                            bounds.expr_len)
    for A, C_, B in itertools.product(objs, repeat=3):
        fs = _homs(M.apex_E, A @ C_, B, bounds)
        for f in fs:
            l, _, g, h = apex_lower(M, f, A, C_)
            rep.record(
                "lower-roundtrip",
                _obj_desc(A, C_, B)
                + f" f={apex.payload_canon(f.payload)!r}",
                M.F(l).FC.mor(g), h)
            rep.record(
                "curry-transport",
                _obj_desc(A, C_, B)
                + f" f={apex.payload_canon(f.payload)!r}",
                transported_curry(M, f, A, C_),
                apex_curry(M, f, A, C_))
    return rep


def check_tower(E, bounds=None, report=None):
    """The whole tower suite for one self-enrichment.

    Builds the constant tower at the configured depth, takes its
    trivial merger, and replays merger invariants, the mu condition
    at every eligible level, apex closure, and the cross-module
    curry comparison into one report.
    """
    bounds = bounds or Bounds()
    depth = max(bounds.depth, 3)
    rep = report or LawReport("tower", E.name, bounds.as_dict())
    layer_bounds = Bounds(max_size=min(bounds.max_size, 2),
                          samples=bounds.samples, seed=bounds.seed)
    T = build_tower([E] * (depth - 1), bounds=layer_bounds)
    M = trivial_merger(T)
    check_merger(M, bounds, report=rep)
    for i in range(1, M.order - 1):
        check_mu_condition(M, i, bounds, report=rep)
    check_apex_closed(M, bounds, report=rep)
    check_apex_matches_closure(M, bounds, report=rep)
    return rep
