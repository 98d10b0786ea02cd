"""Exact rational matrices, stored sparsely.

All numeric work in the package goes through this module so that no
floating-point value can enter a result path.  Entries are
``fractions.Fraction``; zero entries are never stored.
"""

from fractions import Fraction
from .errors import ShapeMismatchError

ZERO = Fraction(0)
ONE = Fraction(1)


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


class RatMat:
    """A rows x cols matrix of Fractions with dict-of-entries storage."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows, cols, entries=None):
        self.rows = rows
        self.cols = cols
        self.entries = {}
        if entries:
            for (i, j), v in entries.items():
                v = _frac(v)
                if v != 0:
                    if not (0 <= i < rows and 0 <= j < cols):
                        raise ShapeMismatchError(
                            f"entry ({i},{j}) outside {rows}x{cols}")
                    self.entries[(i, j)] = v

    @classmethod
    def from_rows(cls, data):
        rows = len(data)
        cols = len(data[0]) if rows else 0
        ent = {}
        for i, row in enumerate(data):
            if len(row) != cols:
                raise ShapeMismatchError("ragged row data")
            for j, v in enumerate(row):
                v = _frac(v)
                if v != 0:
                    ent[(i, j)] = v
        m = cls(rows, cols)
        m.entries = ent
        return m

    @classmethod
    def identity(cls, n):
        m = cls(n, n)
        m.entries = {(i, i): ONE for i in range(n)}
        return m

    @classmethod
    def zero(cls, rows, cols):
        return cls(rows, cols)

    def __getitem__(self, ij):
        return self.entries.get(ij, ZERO)

    def to_rows(self):
        return [[self.entries.get((i, j), ZERO) for j in range(self.cols)]
                for i in range(self.rows)]

    def canon(self):
        """Hashable canonical form: shape plus sorted nonzero entries."""
        items = tuple(sorted(
            ((i, j, v.numerator, v.denominator)
             for (i, j), v in self.entries.items())))
        return (self.rows, self.cols, items)

    def __eq__(self, other):
        if not isinstance(other, RatMat):
            return NotImplemented
        return (self.rows == other.rows and self.cols == other.cols
                and self.entries == other.entries)

    def __hash__(self):
        return hash(self.canon())

    def __repr__(self):
        return f"RatMat({self.rows}x{self.cols}, nnz={len(self.entries)})"

    def __add__(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ShapeMismatchError("matrix addition shape mismatch")
        out = RatMat(self.rows, self.cols)
        ent = dict(self.entries)
        for k, v in other.entries.items():
            s = ent.get(k, ZERO) + v
            if s == 0:
                ent.pop(k, None)
            else:
                ent[k] = s
        out.entries = ent
        return out

    def __sub__(self, other):
        return self + other.scale(Fraction(-1))

    def scale(self, c):
        c = _frac(c)
        out = RatMat(self.rows, self.cols)
        if c != 0:
            out.entries = {k: v * c for k, v in self.entries.items()}
        return out

    def __mul__(self, other):
        """Matrix product self @ other (sparse row-major accumulation)."""
        if self.cols != other.rows:
            raise ShapeMismatchError(
                f"cannot multiply {self.rows}x{self.cols} by "
                f"{other.rows}x{other.cols}")
        by_row = {}
        for (i, k), v in other.entries.items():
            by_row.setdefault(i, []).append((k, v))
        acc = {}
        for (i, j), v in self.entries.items():
            hits = by_row.get(j)
            if not hits:
                continue
            for k, w in hits:
                key = (i, k)
                s = acc.get(key, ZERO) + v * w
                acc[key] = s
        out = RatMat(self.rows, other.cols)
        out.entries = {k: v for k, v in acc.items() if v != 0}
        return out

    def kron(self, other):
        """Kronecker product; the left factor carries the major index."""
        out = RatMat(self.rows * other.rows, self.cols * other.cols)
        ent = {}
        for (i, j), v in self.entries.items():
            for (k, l), w in other.entries.items():
                ent[(i * other.rows + k, j * other.cols + l)] = v * w
        out.entries = ent
        return out

    def transpose(self):
        out = RatMat(self.cols, self.rows)
        out.entries = {(j, i): v for (i, j), v in self.entries.items()}
        return out

    def is_zero(self):
        return not self.entries

    def column(self, j):
        return [self.entries.get((i, j), ZERO) for i in range(self.rows)]


def rref(rows):
    """Reduced row echelon form of a list-of-lists of Fractions.

    Returns (new_rows, pivot_columns).  Zero rows are dropped.  The
    input is not modified.
    """
    m = [list(map(_frac, r)) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return [row for row in m[:r]], pivots


def rank(rows):
    return len(rref(rows)[0])


def row_in_span(rows, candidate):
    """True iff candidate lies in the linear span of rows (all exact)."""
    base = rank(rows)
    return rank(list(rows) + [list(candidate)]) == base


def mat_rank(m):
    """Exact rank of a RatMat."""
    return rank(m.to_rows())
