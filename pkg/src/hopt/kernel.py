"""Finite strict symmetric monoidal categories, three concrete backends.

Objects are flat tuples of atoms; tensor is concatenation and the unit
is the empty tuple, so associators and unitors never materialize.  An
atom is either a declared generator name or a structured tuple such as
``("hom", dom_atoms, cod_atoms)`` used by enrichments that synthesize
function-space carriers.

Backends:

* FINSET  -- total functions between finite carriers.  Payloads are
  tuples of codomain tokens indexed in domain-carrier order; oversized
  structural morphisms stay lazy (a token-level callable) until some
  bounded-domain composite forces a table.
* FINREL  -- boolean relations; payloads are frozensets of index pairs.
* MATQ    -- exact rational matrices (see ratmat); never enumerable,
  so hom-set listings are tagged as sampled.

Carrier and token conventions are global and deterministic: the carrier
of an object is the left-major cartesian product of its atom carriers,
tokens are tuples of per-atom element tokens, and the token of a tensor
is the concatenation of the factor tokens.  The matrix backend uses the
matching Kronecker convention (left factor carries the major index).
"""

import itertools
from fractions import Fraction

from .errors import (
    TypeMismatchError, ShapeMismatchError, BoundExceededError,
    UnsupportedError,
)
from .ratmat import RatMat, rref

DEFAULT_EAGER_CAP = 4096
DEFAULT_CARRIER_CAP = 600_000
DEFAULT_ENUM_CAP = 100_000


class ObjectExpr:
    """An object of a concrete model: a tuple of atoms plus its model."""

    __slots__ = ("model", "atoms")

    def __init__(self, model, atoms):
        self.model = model
        self.atoms = tuple(atoms)

    def tensor(self, other):
        if other.model is not self.model:
            raise TypeMismatchError("tensor of objects from different models")
        return ObjectExpr(self.model, self.atoms + other.atoms)

    __matmul__ = tensor

    @property
    def is_unit(self):
        return not self.atoms

    def size(self):
        return self.model.size(self)

    def __eq__(self, other):
        if not isinstance(other, ObjectExpr):
            return NotImplemented
        return self.model is other.model and self.atoms == other.atoms

    def __hash__(self):
        return hash((id(self.model), self.atoms))

    def __repr__(self):
        if not self.atoms:
            return "I"
        return "(" + " @ ".join(_atom_name(a) for a in self.atoms) + ")"


def _atom_name(atom):
    if isinstance(atom, str):
        return atom
    if isinstance(atom, tuple) and atom and atom[0] == "hom":
        return "[{} -> {}]".format(
            " @ ".join(_atom_name(a) for a in atom[1]) or "I",
            " @ ".join(_atom_name(a) for a in atom[2]) or "I")
    if isinstance(atom, tuple) and atom and atom[0] == "split":
        return "split({})".format(
            " @ ".join(_atom_name(a) for a in atom[1]) or "I")
    return repr(atom)


class _LazyTable:
    """Token-level callable standing in for an unmaterialized table."""

    __slots__ = ("fn",)

    def __init__(self, fn):
        self.fn = fn


class Morphism:
    """A morphism of a concrete model; equality is structural.

    The payload is backend specific: a tuple of codomain tokens for
    FINSET, a frozenset of (dom_index, cod_index) pairs for FINREL, a
    RatMat for MATQ.  FINSET payloads may be lazy; forcing one beyond
    the model's carrier cap raises BoundExceededError.
    """

    __slots__ = ("model", "dom", "cod", "_payload", "_canon")

    def __init__(self, model, dom, cod, payload):
        self.model = model
        self.dom = dom
        self.cod = cod
        self._payload = payload
        self._canon = None

    @property
    def payload(self):
        if isinstance(self._payload, _LazyTable):
            self._payload = self.model._materialize(self)
        return self._payload

    @property
    def is_lazy(self):
        return isinstance(self._payload, _LazyTable)

    def apply(self, token):
        """FINSET only: image of a single domain token."""
        return self.model.apply(self, token)

    def canon(self):
        if self._canon is None:
            self._canon = (self.model.kind, self.dom.atoms, self.cod.atoms,
                           self.model.payload_canon(self.payload))
        return self._canon

    def __eq__(self, other):
        if not isinstance(other, Morphism):
            return NotImplemented
        if self.model is not other.model:
            return False
        return self.canon() == other.canon()

    def __hash__(self):
        return hash(self.canon())

    def __rshift__(self, other):
        """Diagrammatic composite: (f >> g)(x) = g(f(x))."""
        return self.model.compose(other, self)

    def __matmul__(self, other):
        return self.model.tensor(self, other)

    def __repr__(self):
        return f"Morphism({self.dom!r} -> {self.cod!r})"


class HomList(list):
    """A listing of a hom-set; ``sampled`` marks non-exhaustive ones."""

    def __init__(self, items, sampled=False):
        super().__init__(items)
        self.sampled = sampled


class Model:
    """Common interface of the concrete backends."""

    kind = "?"
    has_compact_structure = False

    def __init__(self, enum_cap=DEFAULT_ENUM_CAP):
        self.enum_cap = enum_cap

    # -- objects ------------------------------------------------------

    def unit(self):
        return ObjectExpr(self, ())

    def obj(self, *atom_names):
        for a in atom_names:
            self._check_atom(a)
        return ObjectExpr(self, atom_names)

    def size(self, obj):
        n = 1
        for a in obj.atoms:
            n *= self.atom_size(a)
        return n

    def atom_size(self, atom):
        raise NotImplementedError

    def _check_atom(self, atom):
        self.atom_size(atom)

    def declared_objects(self):
        """Atomic objects in declaration order (used by inventories)."""
        return [self.obj(a) for a in self.declared_atoms()]

    def declared_atoms(self):
        raise NotImplementedError

    # -- morphisms ----------------------------------------------------

    def identity(self, obj):
        raise NotImplementedError

    def compose(self, g, f):
        raise NotImplementedError

    def tensor(self, f, g):
        raise NotImplementedError

    def braid(self, a, b):
        raise NotImplementedError

    def compact_cup(self, a):
        raise UnsupportedError(f"{self.kind} has no compact structure")

    def compact_cap(self, a):
        raise UnsupportedError(f"{self.kind} has no compact structure")

    def enumerate_homs(self, dom, cod, bound=None, samples=None, seed=None):
        raise NotImplementedError

    def payload_canon(self, payload):
        raise NotImplementedError

    def _check_composable(self, g, f):
        if f.model is not self or g.model is not self:
            raise TypeMismatchError("foreign morphism")
        if f.cod != g.dom:
            raise TypeMismatchError(
                f"cannot compose: {f.cod!r} != {g.dom!r}")

    def is_iso(self, m):
        raise NotImplementedError

    def inverse(self, m):
        raise NotImplementedError


# ---------------------------------------------------------------------------
# FINSET


class FinSetModel(Model):
    """Finite sets and total functions."""

    kind = "FINSET"

    def __init__(self, atoms=None, eager_cap=DEFAULT_EAGER_CAP,
                 carrier_cap=DEFAULT_CARRIER_CAP,
                 enum_cap=DEFAULT_ENUM_CAP):
        super().__init__(enum_cap)
        self._atoms = {}
        self.eager_cap = eager_cap
        self.carrier_cap = carrier_cap
        self._carriers = {}
        self._indexes = {}
        if atoms:
            for name, labels in atoms.items():
                self.declare_atom(name, labels)

    def declare_atom(self, name, labels):
        labels = tuple(labels)
        if not labels:
            raise ShapeMismatchError(f"atom {name!r} needs a nonempty carrier")
        if len(set(labels)) != len(labels):
            raise ShapeMismatchError(f"atom {name!r} has duplicate labels")
        self._atoms[name] = labels
        return self.obj(name)

    def declared_atoms(self):
        return list(self._atoms)

    def hom_object(self, dom, cod):
        """Object whose carrier is the function set dom -> cod."""
        return ObjectExpr(self, (("hom", dom.atoms, cod.atoms),))

    def atom_size(self, atom):
        if isinstance(atom, str):
            if atom not in self._atoms:
                raise TypeMismatchError(f"unknown atom {atom!r}")
            return len(self._atoms[atom])
        if isinstance(atom, tuple) and atom and atom[0] == "hom":
            d = self.size(ObjectExpr(self, atom[1]))
            c = self.size(ObjectExpr(self, atom[2]))
            return c ** d
        raise TypeMismatchError(f"unknown atom {atom!r}")

    def atom_elements(self, atom):
        if isinstance(atom, str):
            return self._atoms[atom]
        if isinstance(atom, tuple) and atom and atom[0] == "hom":
            dom = ObjectExpr(self, atom[1])
            cod = ObjectExpr(self, atom[2])
            n = self.size(dom)
            if self.size(cod) ** n > self.carrier_cap:
                raise BoundExceededError(
                    f"function carrier {_atom_name(atom)} exceeds "
                    f"{self.carrier_cap}", self.carrier_cap)
            return tuple(itertools.product(self.carrier(cod), repeat=n))
        raise TypeMismatchError(f"unknown atom {atom!r}")

    def carrier(self, obj):
        got = self._carriers.get(obj.atoms)
        if got is None:
            if self.size(obj) > self.carrier_cap:
                raise BoundExceededError(
                    f"carrier of {obj!r} exceeds {self.carrier_cap}",
                    self.carrier_cap)
            parts = [self.atom_elements(a) for a in obj.atoms]
            got = tuple(itertools.product(*parts))
            self._carriers[obj.atoms] = got
        return got

    def index(self, obj):
        got = self._indexes.get(obj.atoms)
        if got is None:
            got = {tok: i for i, tok in enumerate(self.carrier(obj))}
            self._indexes[obj.atoms] = got
        return got

    # -- morphism construction ---------------------------------------

    def make(self, dom, cod, mapping):
        """Build a function from a dict {dom_token: cod_token}."""
        car = self.carrier(dom)
        idx = self.index(cod)
        table = []
        for tok in car:
            if tok not in mapping:
                raise ShapeMismatchError(f"no image for {tok!r}")
            val = mapping[tok]
            if val not in idx:
                raise ShapeMismatchError(f"{val!r} is not in {cod!r}")
            table.append(val)
        if len(mapping) != len(car):
            raise ShapeMismatchError("mapping domain does not match carrier")
        return Morphism(self, dom, cod, tuple(table))

    def from_fn(self, dom, cod, fn):
        """Wrap a token-level callable; stays lazy past the eager cap."""
        m = Morphism(self, dom, cod, _LazyTable(fn))
        return self._maybe_force(m)

    def _maybe_force(self, m):
        if self.size(m.dom) <= self.eager_cap:
            m.payload
        return m

    def _materialize(self, m):
        fn = m._payload.fn
        return tuple(fn(tok) for tok in self.carrier(m.dom))

    def apply(self, m, token):
        if isinstance(m._payload, _LazyTable):
            return m._payload.fn(token)
        return m._payload[self.index(m.dom)[token]]

    def payload_canon(self, payload):
        return payload

    # -- structure ----------------------------------------------------

    def identity(self, obj):
        if self.size(obj) <= self.eager_cap:
            return Morphism(self, obj, obj, tuple(self.carrier(obj)))
        return Morphism(self, obj, obj, _LazyTable(lambda t: t))

    def compose(self, g, f):
        self._check_composable(g, f)
        if not isinstance(f._payload, _LazyTable) and \
                not isinstance(g._payload, _LazyTable):
            idx = self.index(g.dom)
            gt = g._payload
            table = tuple(gt[idx[v]] for v in f._payload)
            return Morphism(self, f.dom, g.cod, table)
        m = Morphism(self, f.dom, g.cod,
                     _LazyTable(lambda t: g.apply(f.apply(t))))
        return m

    def tensor(self, f, g):
        k = len(f.dom.atoms)
        dom = f.dom.tensor(g.dom)
        cod = f.cod.tensor(g.cod)
        if not isinstance(f._payload, _LazyTable) and \
                not isinstance(g._payload, _LazyTable) and \
                self.size(dom) <= self.eager_cap:
            table = tuple(a + b
                          for a in f._payload for b in g._payload)
            return Morphism(self, dom, cod, table)
        return Morphism(self, dom, cod,
                        _LazyTable(lambda t: f.apply(t[:k]) + g.apply(t[k:])))

    def braid(self, a, b):
        k = len(a.atoms)
        dom = a.tensor(b)
        cod = b.tensor(a)
        if self.size(dom) <= self.eager_cap:
            table = tuple(t[k:] + t[:k] for t in self.carrier(dom))
            return Morphism(self, dom, cod, table)
        return Morphism(self, dom, cod, _LazyTable(lambda t: t[k:] + t[:k]))

    def enumerate_homs(self, dom, cod, bound=None, samples=None, seed=None):
        n = self.size(dom)
        total = self.size(cod) ** n
        cap = bound if bound is not None else self.enum_cap
        if total > cap:
            raise BoundExceededError(
                f"{total} functions {dom!r} -> {cod!r} exceed bound {cap}",
                cap)
        car = self.carrier(cod)
        out = [Morphism(self, dom, cod, tab)
               for tab in itertools.product(car, repeat=n)]
        return HomList(out)

    def is_iso(self, m):
        tab = m.payload
        return len(set(tab)) == len(tab) == self.size(m.cod)

    def inverse(self, m):
        if not self.is_iso(m):
            raise TypeMismatchError("not invertible")
        car = self.carrier(m.dom)
        inv = {v: t for t, v in zip(car, m.payload)}
        return self.make(m.cod, m.dom, inv)


# ---------------------------------------------------------------------------
# FINREL


class FinRelModel(Model):
    """Finite sets and boolean relations; compact closed and self-dual."""

    kind = "FINREL"
    has_compact_structure = True

    def __init__(self, atoms=None, enum_cap=DEFAULT_ENUM_CAP,
                 carrier_cap=DEFAULT_CARRIER_CAP):
        super().__init__(enum_cap)
        self._atoms = {}
        self.carrier_cap = carrier_cap
        self._carriers = {}
        self._indexes = {}
        if atoms:
            for name, labels in atoms.items():
                self.declare_atom(name, labels)

    def declare_atom(self, name, labels):
        labels = tuple(labels)
        if not labels:
            raise ShapeMismatchError(f"atom {name!r} needs a nonempty carrier")
        if len(set(labels)) != len(labels):
            raise ShapeMismatchError(f"atom {name!r} has duplicate labels")
        self._atoms[name] = labels
        return self.obj(name)

    def declared_atoms(self):
        return list(self._atoms)

    def atom_size(self, atom):
        if isinstance(atom, str) and atom in self._atoms:
            return len(self._atoms[atom])
        raise TypeMismatchError(f"unknown atom {atom!r}")

    def carrier(self, obj):
        got = self._carriers.get(obj.atoms)
        if got is None:
            if self.size(obj) > self.carrier_cap:
                raise BoundExceededError(
                    f"carrier of {obj!r} exceeds {self.carrier_cap}",
                    self.carrier_cap)
            parts = [self._atoms[a] for a in obj.atoms]
            got = tuple(itertools.product(*parts))
            self._carriers[obj.atoms] = got
        return got

    def index(self, obj):
        got = self._indexes.get(obj.atoms)
        if got is None:
            got = {tok: i for i, tok in enumerate(self.carrier(obj))}
            self._indexes[obj.atoms] = got
        return got

    def make(self, dom, cod, pairs):
        """Build a relation from an iterable of (dom_token, cod_token)."""
        di = self.index(dom)
        ci = self.index(cod)
        rel = set()
        for a, b in pairs:
            if a not in di:
                raise ShapeMismatchError(f"{a!r} is not in {dom!r}")
            if b not in ci:
                raise ShapeMismatchError(f"{b!r} is not in {cod!r}")
            rel.add((di[a], ci[b]))
        return Morphism(self, dom, cod, frozenset(rel))

    def from_indices(self, dom, cod, pairs):
        n, m = self.size(dom), self.size(cod)
        for i, j in pairs:
            if not (0 <= i < n and 0 <= j < m):
                raise ShapeMismatchError(f"index pair ({i},{j}) out of range")
        return Morphism(self, dom, cod, frozenset(pairs))

    def payload_canon(self, payload):
        return tuple(sorted(payload))

    def identity(self, obj):
        n = self.size(obj)
        return Morphism(self, obj, obj,
                        frozenset((i, i) for i in range(n)))

    def compose(self, g, f):
        self._check_composable(g, f)
        adj = {}
        for j, k in g._payload:
            adj.setdefault(j, []).append(k)
        out = set()
        for i, j in f._payload:
            for k in adj.get(j, ()):
                out.add((i, k))
        return Morphism(self, f.dom, g.cod, frozenset(out))

    def tensor(self, f, g):
        dom = f.dom.tensor(g.dom)
        cod = f.cod.tensor(g.cod)
        n2 = self.size(g.dom)
        m2 = self.size(g.cod)
        out = frozenset((i1 * n2 + i2, j1 * m2 + j2)
                        for i1, j1 in f._payload for i2, j2 in g._payload)
        return Morphism(self, dom, cod, out)

    def braid(self, a, b):
        na, nb = self.size(a), self.size(b)
        out = frozenset((i * nb + j, j * na + i)
                        for i in range(na) for j in range(nb))
        return Morphism(self, a.tensor(b), b.tensor(a), out)

    def converse(self, m):
        return Morphism(self, m.cod, m.dom,
                        frozenset((j, i) for i, j in m._payload))

    def compact_cup(self, a):
        n = self.size(a)
        return Morphism(self, self.unit(), a.tensor(a),
                        frozenset((0, i * n + i) for i in range(n)))

    def compact_cap(self, a):
        n = self.size(a)
        return Morphism(self, a.tensor(a), self.unit(),
                        frozenset((i * n + i, 0) for i in range(n)))

    def enumerate_homs(self, dom, cod, bound=None, samples=None, seed=None):
        n = self.size(dom) * self.size(cod)
        total = 2 ** n
        cap = bound if bound is not None else self.enum_cap
        if total > cap:
            raise BoundExceededError(
                f"{total} relations {dom!r} -> {cod!r} exceed bound {cap}",
                cap)
        cells = [(i, j) for i in range(self.size(dom))
                 for j in range(self.size(cod))]
        rels = []
        for mask in range(total):
            rels.append(frozenset(cells[b] for b in range(n)
                                  if mask >> b & 1))
        rels.sort(key=lambda r: tuple(sorted(r)))
        return HomList([Morphism(self, dom, cod, r) for r in rels])

    def is_iso(self, m):
        n, c = self.size(m.dom), self.size(m.cod)
        if n != c or len(m._payload) != n:
            return False
        return (len({i for i, _ in m._payload}) == n
                and len({j for _, j in m._payload}) == n)

    def inverse(self, m):
        if not self.is_iso(m):
            raise TypeMismatchError("not invertible")
        return self.converse(m)


# ---------------------------------------------------------------------------
# MATQ


class MatQModel(Model):
    """Exact rational matrices; dimensions multiply under tensor."""

    kind = "MATQ"
    has_compact_structure = True

    def __init__(self, atoms=None, enum_cap=DEFAULT_ENUM_CAP):
        super().__init__(enum_cap)
        self._atoms = {}
        if atoms:
            for name, dim in atoms.items():
                self.declare_atom(name, dim)

    def declare_atom(self, name, dim):
        if not isinstance(dim, int) or dim < 1:
            raise ShapeMismatchError(f"atom {name!r} needs dimension >= 1")
        self._atoms[name] = dim
        return self.obj(name)

    def declared_atoms(self):
        return list(self._atoms)

    def atom_size(self, atom):
        if isinstance(atom, str) and atom in self._atoms:
            return self._atoms[atom]
        raise TypeMismatchError(f"unknown atom {atom!r}")

    def dim(self, obj):
        return self.size(obj)

    def make(self, dom, cod, rows):
        mat = rows if isinstance(rows, RatMat) else RatMat.from_rows(rows)
        if mat.rows != self.dim(cod) or mat.cols != self.dim(dom):
            raise ShapeMismatchError(
                f"need {self.dim(cod)}x{self.dim(dom)}, "
                f"got {mat.rows}x{mat.cols}")
        return Morphism(self, dom, cod, mat)

    def payload_canon(self, payload):
        return payload.canon()

    def identity(self, obj):
        return Morphism(self, obj, obj, RatMat.identity(self.dim(obj)))

    def compose(self, g, f):
        self._check_composable(g, f)
        return Morphism(self, f.dom, g.cod, g._payload * f._payload)

    def tensor(self, f, g):
        return Morphism(self, f.dom.tensor(g.dom), f.cod.tensor(g.cod),
                        f._payload.kron(g._payload))

    def braid(self, a, b):
        na, nb = self.dim(a), self.dim(b)
        m = RatMat(na * nb, na * nb)
        m.entries = {(j * na + i, i * nb + j): Fraction(1)
                     for i in range(na) for j in range(nb)}
        return Morphism(self, a.tensor(b), b.tensor(a), m)

    def compact_cup(self, a):
        n = self.dim(a)
        m = RatMat(n * n, 1)
        m.entries = {(i * n + i, 0): Fraction(1) for i in range(n)}
        return Morphism(self, self.unit(), a.tensor(a), m)

    def compact_cap(self, a):
        n = self.dim(a)
        m = RatMat(1, n * n)
        m.entries = {(0, i * n + i): Fraction(1) for i in range(n)}
        return Morphism(self, a.tensor(a), self.unit(), m)

    def matrix_unit(self, dom, cod, i, j):
        m = RatMat(self.dim(cod), self.dim(dom))
        m.entries = {(i, j): Fraction(1)}
        return Morphism(self, dom, cod, m)

    def sample(self, dom, cod, rng):
        """One pseudorandom matrix with entries k/d, |k|<=2, d<=3."""
        rows = self.dim(cod)
        cols = self.dim(dom)
        m = RatMat(rows, cols)
        ent = {}
        for i in range(rows):
            for j in range(cols):
                k = rng.randint(-2, 2)
                d = rng.randint(1, 3)
                if k:
                    ent[(i, j)] = Fraction(k, d)
        m.entries = ent
        return Morphism(self, dom, cod, m)

    def enumerate_homs(self, dom, cod, bound=None, samples=None, seed=None):
        """Matrix units plus a seeded sample; always tagged sampled.

        The stream is keyed by (seed, dom, cod) so listings do not
        depend on call order.
        """
        import random
        count = samples if samples is not None else 8
        key = f"{seed if seed is not None else 0}|{dom.atoms!r}|{cod.atoms!r}"
        rng = random.Random(key)
        out = []
        seen = set()
        for i in range(self.dim(cod)):
            for j in range(self.dim(dom)):
                out.append(self.matrix_unit(dom, cod, i, j))
                seen.add(out[-1].canon())
        for _ in range(count):
            m = self.sample(dom, cod, rng)
            if m.canon() not in seen:
                seen.add(m.canon())
                out.append(m)
        if bound is not None:
            out = out[:bound]
        return HomList(out, sampled=True)

    def is_iso(self, m):
        if self.dim(m.dom) != self.dim(m.cod):
            return False
        return len(rref(m._payload.to_rows())[1]) == self.dim(m.dom)

    def inverse(self, m):
        n = self.dim(m.dom)
        if self.dim(m.cod) != n:
            raise TypeMismatchError("not square")
        aug = [row + [Fraction(int(i == j)) for j in range(n)]
               for i, row in enumerate(m._payload.to_rows())]
        red, piv = rref(aug)
        if piv != list(range(n)):
            raise TypeMismatchError("not invertible")
        inv = RatMat.from_rows([row[n:] for row in red])
        return Morphism(self, m.cod, m.dom, inv)


# ---------------------------------------------------------------------------
# shared helpers


def object_inventory(model, max_size, max_len=1):
    """Objects over the declared atoms: expressions of at most max_len
    atoms whose carrier size stays within max_size, unit first, in a
    deterministic order."""
    atoms = model.declared_atoms()
    out = [model.unit()]
    for n in range(1, max_len + 1):
        for combo in itertools.product(atoms, repeat=n):
            obj = ObjectExpr(model, combo)
            if model.size(obj) <= max_size:
                out.append(obj)
    return out


def is_idempotent(model, m):
    return m.dom == m.cod and model.compose(m, m) == m
