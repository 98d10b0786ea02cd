"""Source programs: tokenizer, parser, and declaration evaluator.

A program is a sequence of semicolon-terminated statements declaring a
model, named objects and morphisms, towers, and check requests.
Inside a morphism expression ";" is sequential composition read left
to right and "*" is parallel composition; "*" binds tighter, and
parentheses group.  Literal tables map carrier indices and are only
legal where a declared boundary gives them a type.
"""

from dataclasses import dataclass
from fractions import Fraction

from .closure import curry as curry_morphism
from .closure import eval_morphism
from .enrichment import FinRelSelf, FinSetSelf, MatQChoi
from .errors import (
    DslParseError,
    DslTypeError,
    HoptError,
    TypeMismatchError,
)
from .kernel import FinRelModel, FinSetModel, MatQModel, ObjectExpr
from .ratmat import RatMat

SUITE_NAMES = frozenset((
    "enriched", "faithful", "linked", "closed", "pm", "karoubi",
    "combs", "tower", "causlite",
))

MODEL_ALIASES = {
    "finset": "finset_self", "finset_self": "finset_self",
    "finrel": "finrel_self", "finrel_self": "finrel_self",
    "matq": "matq_choi", "matq_choi": "matq_choi",
}

_STMT_KEYWORDS = frozenset(
    ("model", "object", "morphism", "tower", "check"))

# arity is the number of object arguments after any morphism argument
_CALLS = {"id": (0, 1), "braid": (0, 2), "kappa": (1, 0),
          "seq": (0, 3), "par": (0, 4), "curry": (1, 2),
          "eval": (0, 2)}

_PUNCT = ("->", ";", ":", "=", "*", ",", "(", ")", "{", "}",
          "[", "]")


# ---------------------------------------------------------------------------
# tokens


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r}, {self.line}:{self.col})"


def tokenize(source):
    toks = []
    line, col = 1, 1
    i = 0
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if source.startswith("->", i):
            toks.append(Token("punct", "->", line, col))
            i += 2
            col += 2
            continue
        if c in ";:=*,(){}[]":
            toks.append(Token("punct", c, line, col))
            i += 1
            col += 1
            continue
        if c.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            toks.append(Token("int", source[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            toks.append(Token("ident", source[i:j], line, col))
            col += j - i
            i = j
            continue
        raise DslParseError(f"unexpected character {c!r}", line, col)
    toks.append(Token("eof", "", line, col))
    return toks


# ---------------------------------------------------------------------------
# syntax tree


@dataclass(frozen=True)
class Program:
    statements: tuple


@dataclass(frozen=True)
class ModelStmt:
    name: str
    line: int


@dataclass(frozen=True)
class ObjectStmt:
    name: str
    spec: object
    line: int


@dataclass(frozen=True)
class MorphismStmt:
    name: str
    dom: object
    cod: object
    expr: object
    line: int


@dataclass(frozen=True)
class TowerStmt:
    name: str
    members: tuple
    line: int


@dataclass(frozen=True)
class CheckStmt:
    suite: str
    options: tuple
    line: int


@dataclass(frozen=True)
class ObjName:
    name: str
    line: int


@dataclass(frozen=True)
class ObjTensor:
    parts: tuple


@dataclass(frozen=True)
class ObjHom:
    dom: object
    cod: object


@dataclass(frozen=True)
class Name:
    name: str
    line: int


@dataclass(frozen=True)
class SeqChain:
    parts: tuple


@dataclass(frozen=True)
class TensorChain:
    parts: tuple


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple
    line: int


@dataclass(frozen=True)
class Table:
    pairs: tuple
    line: int


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    def _tok(self, k=None):
        return self.toks[min(k if k is not None else self.i,
                             len(self.toks) - 1)]

    def _peek(self):
        return self._tok()

    def _next(self):
        t = self._tok()
        if t.kind != "eof":
            self.i += 1
        return t

    def _fail(self, expected, tok=None):
        tok = tok or self._peek()
        got = tok.text or "end of input"
        raise DslParseError(f"expected {expected}, got {got!r}",
                            tok.line, tok.col)

    def _expect(self, text):
        t = self._peek()
        if t.kind == "punct" and t.text == text:
            return self._next()
        self._fail(f"'{text}'")

    def _ident(self, what="identifier"):
        t = self._peek()
        if t.kind != "ident":
            self._fail(what)
        return self._next()

    def _int(self):
        t = self._peek()
        if t.kind != "int":
            self._fail("integer")
        return int(self._next().text)

    def parse(self):
        stmts = []
        while self._peek().kind != "eof":
            stmts.append(self._statement())
        return Program(tuple(stmts))

    def _statement(self):
        t = self._peek()
        if t.kind != "ident" or t.text not in _STMT_KEYWORDS:
            self._fail("a statement keyword "
                       "(model/object/morphism/tower/check)")
        handler = getattr(self, f"_stmt_{t.text}")
        self._next()
        stmt = handler(t)
        self._expect(";")
        return stmt

    def _stmt_model(self, kw):
        return ModelStmt(self._ident("model name").text, kw.line)

    def _stmt_object(self, kw):
        name = self._ident("object name").text
        self._expect("=")
        t = self._peek()
        if t.kind == "int":
            spec = self._int()
        elif t.kind == "punct" and t.text == "{":
            self._next()
            labels = [self._int()]
            while self._peek().text == ",":
                self._next()
                labels.append(self._int())
            self._expect("}")
            spec = tuple(labels)
        else:
            self._fail("a carrier {0,..} or a dimension")
        return ObjectStmt(name, spec, kw.line)

    def _stmt_morphism(self, kw):
        name = self._ident("morphism name").text
        self._expect(":")
        dom = self._objexpr()
        self._expect("->")
        cod = self._objexpr()
        self._expect("=")
        expr = self._morexpr()
        return MorphismStmt(name, dom, cod, expr, kw.line)

    def _stmt_tower(self, kw):
        name = self._ident("tower name").text
        self._expect("=")
        self._expect("[")
        members = [self._ident("layer model").text]
        while self._peek().text == ",":
            self._next()
            members.append(self._ident("layer model").text)
        self._expect("]")
        return TowerStmt(name, tuple(members), kw.line)

    def _stmt_check(self, kw):
        t = self._ident("suite name")
        # a cosmetic "laws" is tolerated before the suite name
        if t.text == "laws" and self._peek().kind == "ident":
            t = self._ident("suite name")
        if t.text not in SUITE_NAMES:
            raise DslParseError(
                f"unknown suite {t.text!r}; one of "
                f"{', '.join(sorted(SUITE_NAMES))}", t.line, t.col)
        options = []
        while self._peek().kind == "ident":
            key = self._ident("option name").text
            self._expect("=")
            v = self._peek()
            if v.kind == "int":
                options.append((key, self._int()))
            elif v.kind == "ident":
                options.append((key, self._next().text))
            else:
                self._fail("an option value")
        return CheckStmt(t.text, tuple(options), kw.line)

    # -- object expressions --

    def _objexpr(self):
        parts = [self._objterm()]
        while self._peek().text == "*":
            self._next()
            parts.append(self._objterm())
        return parts[0] if len(parts) == 1 else ObjTensor(tuple(parts))

    def _objterm(self):
        t = self._peek()
        if t.kind == "ident":
            self._next()
            return ObjName(t.text, t.line)
        if t.text == "[":
            self._next()
            dom = self._objexpr()
            self._expect(",")
            cod = self._objexpr()
            self._expect("]")
            return ObjHom(dom, cod)
        if t.text == "(":
            self._next()
            inner = self._objexpr()
            self._expect(")")
            return inner
        self._fail("an object expression")

    # -- morphism expressions --

    def _morexpr(self):
        parts = [self._morterm()]
        while (self._peek().text == ";"
               and self._starts_term(self._tok(self.i + 1))):
            self._next()
            parts.append(self._morterm())
        return parts[0] if len(parts) == 1 else SeqChain(tuple(parts))

    def _starts_term(self, t):
        if t.kind == "ident":
            return t.text not in _STMT_KEYWORDS
        return t.kind == "punct" and t.text in ("(", "{")

    def _morterm(self):
        parts = [self._morfactor()]
        while self._peek().text == "*":
            self._next()
            parts.append(self._morfactor())
        return parts[0] if len(parts) == 1 else TensorChain(tuple(parts))

    def _morfactor(self):
        t = self._peek()
        if t.kind == "ident":
            self._next()
            if t.text in _CALLS:
                return self._call(t)
            return Name(t.text, t.line)
        if t.text == "(":
            self._next()
            inner = self._morexpr()
            self._expect(")")
            return inner
        if t.text == "{":
            return self._table()
        self._fail("a morphism expression")

    def _call(self, t):
        nmor, nobj = _CALLS[t.text]
        self._expect("(")
        args = []
        for k in range(nmor):
            if k:
                self._expect(",")
            args.append(self._morexpr())
        # curry's object split may be omitted
        if t.text == "curry" and self._peek().text == ")":
            nobj = 0
        for k in range(nobj):
            if k or nmor:
                self._expect(",")
            args.append(self._objexpr())
        self._expect(")")
        return Call(t.text, tuple(args), t.line)

    def _table(self):
        open_ = self._expect("{")
        pairs = []
        if self._peek().text != "}":
            while True:
                i = self._int()
                self._expect("->")
                pairs.append((i, self._int()))
                if self._peek().text != ",":
                    break
                self._next()
        self._expect("}")
        return Table(tuple(pairs), open_.line)


def parse(source):
    """Parse UTF-8 program text into a Program; errors carry line/col."""
    return _Parser(tokenize(source)).parse()


# ---------------------------------------------------------------------------
# declaration evaluation


class ProgramEnv:
    """One program's bindings over a freshly built model."""

    __slots__ = ("kind", "E", "objects", "morphisms", "towers",
                 "checks")

    def __init__(self):
        self.kind = None
        self.E = None
        self.objects = {}
        self.morphisms = {}
        self.towers = {}
        self.checks = []


def _fresh_enrichment(kind):
    if kind == "finset_self":
        return FinSetSelf(FinSetModel())
    if kind == "finrel_self":
        return FinRelSelf(FinRelModel())
    return MatQChoi(MatQModel())


def build_env(program):
    """Resolve every declaration; checks are collected, not run."""
    env = ProgramEnv()
    for stmt in program.statements:
        if isinstance(stmt, ModelStmt):
            if env.E is not None:
                raise DslTypeError("model already declared", stmt.line)
            kind = MODEL_ALIASES.get(stmt.name)
            if kind is None:
                raise DslTypeError(f"unknown model {stmt.name!r}",
                                   stmt.line)
            env.kind = kind
            env.E = _fresh_enrichment(kind)
            continue
        if env.E is None:
            raise DslTypeError("a model must be declared first",
                               stmt.line)
        if isinstance(stmt, ObjectStmt):
            _declare_object(env, stmt)
        elif isinstance(stmt, MorphismStmt):
            _declare_morphism(env, stmt)
        elif isinstance(stmt, TowerStmt):
            _declare_tower(env, stmt)
        else:
            env.checks.append(stmt)
    return env


def _declare_object(env, stmt):
    if stmt.name in env.objects or stmt.name == "I":
        raise DslTypeError(f"object {stmt.name!r} already declared",
                           stmt.line)
    model = env.E.C
    spec = stmt.spec
    try:
        if isinstance(model, MatQModel):
            dim = spec if isinstance(spec, int) else len(spec)
            env.objects[stmt.name] = model.declare_atom(stmt.name, dim)
        else:
            labels = spec if isinstance(spec, tuple) \
                else tuple(range(spec))
            env.objects[stmt.name] = model.declare_atom(
                stmt.name, labels)
    except HoptError as e:
        raise DslTypeError(str(e), stmt.line) from e


def _declare_morphism(env, stmt):
    if stmt.name in env.morphisms or stmt.name in _CALLS:
        raise DslTypeError(f"morphism {stmt.name!r} already declared "
                           "or reserved", stmt.line)
    dom = resolve_object(env, stmt.dom)
    cod = resolve_object(env, stmt.cod)
    m = evaluate(env, stmt.expr, typed=(dom, cod))
    if m.dom != dom or m.cod != cod:
        raise DslTypeError(
            f"morphism {stmt.name}: declared {dom!r} -> {cod!r} "
            f"but the expression has {m.dom!r} -> {m.cod!r}",
            stmt.line)
    env.morphisms[stmt.name] = m


def _declare_tower(env, stmt):
    if stmt.name in env.towers:
        raise DslTypeError(f"tower {stmt.name!r} already declared",
                           stmt.line)
    for member in stmt.members:
        if MODEL_ALIASES.get(member) != env.kind:
            raise DslTypeError(
                f"tower layer {member!r} does not name the declared "
                f"model", stmt.line)
    env.towers[stmt.name] = len(stmt.members)


def resolve_object(env, expr):
    if isinstance(expr, ObjName):
        if expr.name == "I":
            return env.E.C.unit()
        try:
            return env.objects[expr.name]
        except KeyError:
            raise DslTypeError(f"unknown object {expr.name!r}",
                               expr.line) from None
    if isinstance(expr, ObjTensor):
        out = resolve_object(env, expr.parts[0])
        for part in expr.parts[1:]:
            out = out @ resolve_object(env, part)
        return out
    return env.E.hom_ob(resolve_object(env, expr.dom),
                        resolve_object(env, expr.cod))


def _expr_line(expr):
    line = getattr(expr, "line", None)
    if line is not None:
        return line
    for part in getattr(expr, "parts", ()):
        line = _expr_line(part)
        if line is not None:
            return line
    return None


def evaluate(env, expr, typed=None):
    """Evaluate a morphism expression to a concrete morphism.

    typed carries the declared (dom, cod) so a literal table knows
    its boundary; composition errors surface as located type errors.
    """
    if isinstance(expr, Name):
        try:
            return env.morphisms[expr.name]
        except KeyError:
            raise DslTypeError(f"unknown morphism {expr.name!r}",
                               expr.line) from None
    if isinstance(expr, SeqChain):
        cur = evaluate(env, expr.parts[0])
        for part in expr.parts[1:]:
            nxt = evaluate(env, part)
            try:
                cur = cur.model.compose(nxt, cur)
            except TypeMismatchError as e:
                raise DslTypeError(str(e), _expr_line(part)) from e
        return cur
    if isinstance(expr, TensorChain):
        cur = evaluate(env, expr.parts[0])
        for part in expr.parts[1:]:
            cur = cur.model.tensor(cur, evaluate(env, part))
        return cur
    if isinstance(expr, Call):
        return _evaluate_call(env, expr)
    return _table_morphism(env, expr, typed)


def _evaluate_call(env, expr):
    E = env.E
    fn, args = expr.fn, expr.args
    try:
        if fn == "id":
            return E.C.identity(resolve_object(env, args[0]))
        if fn == "braid":
            return E.C.braid(resolve_object(env, args[0]),
                             resolve_object(env, args[1]))
        if fn == "kappa":
            return E.kappa(evaluate(env, args[0]))
        if fn == "seq":
            return E.seq(*(resolve_object(env, a) for a in args))
        if fn == "par":
            return E.par(*(resolve_object(env, a) for a in args))
        if fn == "eval":
            return eval_morphism(E, resolve_object(env, args[0]),
                                 resolve_object(env, args[1]))
        f = evaluate(env, args[0])
        if len(args) == 3:
            A = resolve_object(env, args[1])
            C = resolve_object(env, args[2])
        else:
            # default split: bind the first atom of the domain
            atoms = f.dom.atoms
            if not atoms:
                raise DslTypeError(
                    "curry needs a nonempty domain to split",
                    expr.line)
            A = ObjectExpr(f.model, atoms[:1])
            C = ObjectExpr(f.model, atoms[1:])
        return curry_morphism(E, f, A, C)
    except DslTypeError:
        raise
    except HoptError as e:
        raise DslTypeError(f"{fn}: {e}", expr.line) from e


def _table_morphism(env, expr, typed):
    if typed is None:
        raise DslTypeError("literal tables need a declared boundary",
                           expr.line)
    dom, cod = typed
    model = env.E.C
    pairs = expr.pairs
    if isinstance(model, FinRelModel):
        try:
            return model.from_indices(dom, cod, pairs)
        except HoptError as e:
            raise DslTypeError(str(e), expr.line) from e
    if isinstance(model, MatQModel):
        n, m = model.dim(dom), model.dim(cod)
        mat = RatMat(m, n)
        ent = {}
        for i, j in pairs:
            if not (0 <= i < n and 0 <= j < m):
                raise DslTypeError(
                    f"entry {i}->{j} is outside {n}->{m}", expr.line)
            ent[(j, i)] = Fraction(1)
        mat.entries = ent
        return model.make(dom, cod, mat)
    carrier = list(model.carrier(dom))
    target = list(model.carrier(cod))
    table = {}
    for i, j in pairs:
        if not (0 <= i < len(carrier) and 0 <= j < len(target)):
            raise DslTypeError(
                f"entry {i}->{j} is outside the carriers "
                f"({len(carrier)} and {len(target)} elements)",
                expr.line)
        if carrier[i] in table:
            raise DslTypeError(f"input {i} mapped twice", expr.line)
        table[carrier[i]] = target[j]
    if len(table) != len(carrier):
        raise DslTypeError(
            f"table covers {len(table)} of {len(carrier)} inputs",
            expr.line)
    return model.make(dom, cod, table)
