"""Sparse matrices over exact rationals.

Everything that feeds an equality check (projector relations, the
Yang-Baxter equation, commutators, ground-state rank counts) is built here
with :class:`fractions.Fraction` entries. Floating point only enters through
:meth:`ExactOperator.to_dense` / :meth:`ExactOperator.to_sparse`.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

Rows = Dict[int, Dict[int, Fraction]]

_ZERO = Fraction(0)


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions, floats and ``"p/q"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, (int, Rational, str)):
        return Fraction(x)
    if isinstance(x, float):
        if not np.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


class ExactOperator:
    """Square sparse matrix with rational entries, stored row-wise.

    Instances are treated as immutable: every arithmetic operation returns a
    new operator, and the row storage is never handed out for mutation.
    """

    __slots__ = ("dim", "_rows")

    def __init__(self, dim: int, rows: Optional[Rows] = None):
        self.dim = int(dim)
        self._rows: Rows = {}
        if rows:
            for i, row in rows.items():
                clean = {j: v for j, v in row.items() if v != 0}
                if clean:
                    self._rows[i] = clean

    # -- construction -----------------------------------------------------

    @classmethod
    def from_entries(cls, dim: int, entries: Iterable[Tuple[int, int, object]]) -> "ExactOperator":
        rows: Rows = {}
        for i, j, v in entries:
            if not (0 <= i < dim and 0 <= j < dim):
                raise IndexError(f"entry ({i}, {j}) outside a {dim}x{dim} matrix")
            row = rows.setdefault(i, {})
            row[j] = row.get(j, _ZERO) + as_fraction(v)
        return cls(dim, rows)

    @classmethod
    def identity(cls, dim: int) -> "ExactOperator":
        return cls(dim, {i: {i: Fraction(1)} for i in range(dim)})

    @classmethod
    def zero(cls, dim: int) -> "ExactOperator":
        return cls(dim)

    @classmethod
    def diagonal(cls, values: Sequence) -> "ExactOperator":
        return cls(len(values), {i: {i: as_fraction(v)} for i, v in enumerate(values)})

    @classmethod
    def permutation(cls, images: Sequence[int]) -> "ExactOperator":
        """Matrix sending basis vector ``i`` to basis vector ``images[i]``."""
        return cls(len(images), {int(t): {i: Fraction(1)} for i, t in enumerate(images)})

    # -- access -----------------------------------------------------------

    def __getitem__(self, key: Tuple[int, int]) -> Fraction:
        i, j = key
        return self._rows.get(i, {}).get(j, _ZERO)

    def items(self) -> Iterator[Tuple[int, int, Fraction]]:
        for i in sorted(self._rows):
            row = self._rows[i]
            for j in sorted(row):
                yield i, j, row[j]

    def row(self, i: int) -> Mapping[int, Fraction]:
        return dict(self._rows.get(i, {}))

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self._rows.values())

    def trace(self) -> Fraction:
        return sum((r.get(i, _ZERO) for i, r in self._rows.items()), _ZERO)

    def max_abs_entry(self) -> Fraction:
        return max((abs(v) for r in self._rows.values() for v in r.values()), default=_ZERO)

    def is_zero(self) -> bool:
        return not self._rows

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: "ExactOperator") -> None:
        if not isinstance(other, ExactOperator):
            raise TypeError(f"expected ExactOperator, got {type(other).__name__}")
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def _combine(self, other: "ExactOperator", sign: int) -> "ExactOperator":
        self._check(other)
        rows: Rows = {i: dict(r) for i, r in self._rows.items()}
        for i, r in other._rows.items():
            target = rows.setdefault(i, {})
            for j, v in r.items():
                target[j] = target.get(j, _ZERO) + sign * v
        return ExactOperator(self.dim, rows)

    def __add__(self, other: "ExactOperator") -> "ExactOperator":
        return self._combine(other, 1)

    def __sub__(self, other: "ExactOperator") -> "ExactOperator":
        return self._combine(other, -1)

    def __neg__(self) -> "ExactOperator":
        return self.scale(-1)

    def scale(self, c) -> "ExactOperator":
        c = as_fraction(c)
        if c == 0:
            return ExactOperator(self.dim)
        return ExactOperator(self.dim, {i: {j: c * v for j, v in r.items()} for i, r in self._rows.items()})

    def __mul__(self, c) -> "ExactOperator":
        if isinstance(c, ExactOperator):
            raise TypeError("use @ for operator products")
        return self.scale(c)

    __rmul__ = __mul__

    def __matmul__(self, other: "ExactOperator") -> "ExactOperator":
        self._check(other)
        rows: Rows = {}
        orows = other._rows
        for i, r in self._rows.items():
            acc: Dict[int, Fraction] = {}
            for k, a in r.items():
                ok = orows.get(k)
                if not ok:
                    continue
                for j, b in ok.items():
                    acc[j] = acc.get(j, _ZERO) + a * b
            rows[i] = acc
        return ExactOperator(self.dim, rows)

    def power(self, n: int) -> "ExactOperator":
        out = ExactOperator.identity(self.dim)
        for _ in range(n):
            out = out @ self
        return out

    @property
    def T(self) -> "ExactOperator":
        rows: Rows = {}
        for i, r in self._rows.items():
            for j, v in r.items():
                rows.setdefault(j, {})[i] = v
        return ExactOperator(self.dim, rows)

    def commutator(self, other: "ExactOperator") -> "ExactOperator":
        return self @ other - other @ self

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactOperator):
            return NotImplemented
        return self.dim == other.dim and self._rows == other._rows

    def __hash__(self):
        return hash((self.dim, tuple(self.items())))

    def is_symmetric(self) -> bool:
        return self == self.T

    def proportionality(self, other: "ExactOperator") -> Optional[Fraction]:
        """Return ``c`` with ``self == c * other`` exactly, or None.

        Returns 0 when ``self`` vanishes; None when ``other`` vanishes but
        ``self`` does not.
        """
        self._check(other)
        if self.is_zero():
            return _ZERO
        if other.is_zero():
            return None
        i, j, v = next(other.items())
        c = self[i, j] / v
        return c if self == other.scale(c) else None

    # -- vectors ----------------------------------------------------------

    def apply(self, vec: Mapping[int, object]) -> Dict[int, Fraction]:
        """Exact matrix-vector product on a sparse ``{index: value}`` vector."""
        cols: Dict[int, Fraction] = {}
        for j, v in vec.items():
            v = as_fraction(v)
            if v != 0:
                cols[j] = v
        out: Dict[int, Fraction] = {}
        for i, r in self._rows.items():
            s = _ZERO
            for j, a in r.items():
                b = cols.get(j)
                if b is not None:
                    s += a * b
            if s != 0:
                out[i] = s
        return out

    def restrict(self, indices: Sequence[int]) -> "ExactOperator":
        """Compress rows and columns onto ``indices`` (in the given order)."""
        pos = {int(x): n for n, x in enumerate(indices)}
        rows: Rows = {}
        for i in indices:
            r = self._rows.get(int(i))
            if not r:
                continue
            sub = {pos[j]: v for j, v in r.items() if j in pos}
            if sub:
                rows[pos[int(i)]] = sub
        return ExactOperator(len(pos), rows)

    def leaks_out_of(self, indices: Sequence[int]) -> bool:
        """True if some column in ``indices`` has weight outside ``indices``."""
        inside = set(int(x) for x in indices)
        for i, r in self._rows.items():
            if i in inside:
                continue
            if any(j in inside for j in r):
                return True
        return False

    # -- conversions ------------------------------------------------------

    def to_sparse(self, dtype=float) -> sp.csr_matrix:
        data, ri, ci = [], [], []
        for i, j, v in self.items():
            ri.append(i)
            ci.append(j)
            data.append(float(v))
        return sp.csr_matrix((np.asarray(data, dtype=dtype), (ri, ci)), shape=(self.dim, self.dim))

    def to_dense(self, dtype=float) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=dtype)
        for i, j, v in self.items():
            out[i, j] = float(v)
        return out

    def to_coo_text(self) -> str:
        """Coordinate-list export: one ``row col num/den`` line per nonzero."""
        return "".join(f"{i} {j} {v.numerator}/{v.denominator}\n" for i, j, v in self.items())

    @classmethod
    def from_coo_text(cls, dim: int, text: str) -> "ExactOperator":
        entries = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            i, j, v = line.split()
            entries.append((int(i), int(j), Fraction(v)))
        return cls.from_entries(dim, entries)

    def __repr__(self) -> str:
        return f"ExactOperator(dim={self.dim}, nnz={self.nnz})"


def max_abs_defect(a: ExactOperator, b: ExactOperator) -> Fraction:
    return (a - b).max_abs_entry()


def rational_rank(vectors: Iterable[Mapping[int, object]]) -> int:
    """Rank of a family of sparse rational vectors by exact elimination."""
    pivots: Dict[int, Dict[int, Fraction]] = {}
    rank = 0
    for vec in vectors:
        v = {k: as_fraction(x) for k, x in vec.items() if x != 0}
        while v:
            lead = min(v)
            p = pivots.get(lead)
            if p is None:
                inv = 1 / v[lead]
                pivots[lead] = {k: x * inv for k, x in v.items()}
                rank += 1
                break
            c = v[lead]
            for k, x in p.items():
                nv = v.get(k, _ZERO) - c * x
                if nv == 0:
                    v.pop(k, None)
                else:
                    v[k] = nv
    return rank


def is_dyadic(x: Fraction) -> bool:
    d = x.denominator
    return d & (d - 1) == 0
