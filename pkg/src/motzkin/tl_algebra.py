"""Exact checks of the operator algebra generated by the local moves.

Covers the periodic Temperley-Lieb relations of ``e_j = U_j + D_j``, the
Baxterized R-matrix and its Yang-Baxter equation, and the algebra obtained
when the flat move ``f_j = F_j`` is added (the ``g``/``h`` products and the
two symmetric-inverse-semigroup subalgebras).
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .exact import ExactOperator, as_fraction
from .operators import local_e, local_F


@dataclass
class RelationReport:
    relation: str
    L: int
    j: Tuple[int, ...]
    exact_equal: bool
    max_abs_defect: Fraction
    lhs: str = ""
    rhs: str = ""
    # c with lhs == c * rhs exactly, when such a c exists
    scalar: Optional[Fraction] = None
    details: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "relation": self.relation,
            "L": self.L,
            "j": list(self.j),
            "exact_equal": self.exact_equal,
            "defect_num": self.max_abs_defect.numerator,
            "defect_den": self.max_abs_defect.denominator,
            "scalar": None if self.scalar is None else str(self.scalar),
            "details": list(self.details),
        }


def compare(relation: str, L: int, j, lhs: ExactOperator, rhs: ExactOperator,
            lhs_text: str = "", rhs_text: str = "") -> RelationReport:
    diff = lhs - rhs
    defect = diff.max_abs_entry()
    return RelationReport(
        relation=relation, L=L, j=tuple(j) if isinstance(j, (tuple, list)) else (j,),
        exact_equal=diff.is_zero(), max_abs_defect=defect,
        lhs=lhs_text, rhs=rhs_text, scalar=lhs.proportionality(rhs),
    )


def reports_to_json(reports: Iterable[RelationReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2)


def _link(j: int, L: int) -> int:
    return (j - 1) % L + 1


# -- periodic Temperley-Lieb ------------------------------------------------

def check_ptl(L: int) -> List[RelationReport]:
    """All PTL relations, labelled e1..e7 in the usual bulk/boundary split.

    e1-e3 are the bulk relations among ``e_1 .. e_{L-1}``; e4-e7 are the
    relations involving the wrap-around generator ``e_L``. Together they
    amount to the cyclic relations at every link.
    """
    if L < 3:
        raise ValueError("PTL needs >= 3 links")
    e = {j: local_e(j, L) for j in range(1, L + 1)}
    out: List[RelationReport] = []
    for j in range(1, L):
        for k in (j - 1, j + 1):
            if 1 <= k <= L - 1:
                out.append(compare("e1", L, (j, k), e[j] @ e[k] @ e[j], e[j],
                                   f"e{j} e{k} e{j}", f"e{j}"))
    for j in range(1, L):
        out.append(compare("e2", L, (j,), e[j] @ e[j], 2 * e[j], f"e{j}^2", f"2 e{j}"))
    for j in range(1, L):
        for k in range(j + 2, L):
            out.append(compare("e3", L, (j, k), e[j] @ e[k], e[k] @ e[j],
                               f"e{j} e{k}", f"e{k} e{j}"))
    out.append(compare("e4", L, (1, L), e[1] @ e[L] @ e[1], e[1], f"e1 e{L} e1", "e1"))
    for j in sorted({1, L - 1}):
        out.append(compare("e5", L, (L, j), e[L] @ e[j] @ e[L], e[L], f"e{L} e{j} e{L}", f"e{L}"))
    out.append(compare("e6", L, (L,), e[L] @ e[L], 2 * e[L], f"e{L}^2", f"2 e{L}"))
    for j in range(2, L - 1):
        out.append(compare("e7", L, (j, L), e[j] @ e[L], e[L] @ e[j], f"e{j} e{L}", f"e{L} e{j}"))
    return out


def loop_weight(L: int, j: int = 1) -> Fraction:
    """The scalar ``q + 1/q`` in ``e_j^2 = (q + 1/q) e_j``."""
    e = local_e(j, L)
    c = (e @ e).proportionality(e)
    if c is None:
        raise ArithmeticError("e_j^2 is not proportional to e_j")
    return c


# -- R-matrix and Yang-Baxter -------------------------------------------------

@dataclass(frozen=True)
class RMatrix:
    j: int
    lam: Fraction
    matrix: ExactOperator


def r_matrix(j: int, lam, L: int) -> RMatrix:
    """``R_{j,j+1}(lam) = e_j - (lam + 1)/lam``."""
    lam = as_fraction(lam)
    if lam == 0:
        raise ZeroDivisionError("spectral parameter pole")
    e = local_e(_link(j, L), L)
    return RMatrix(j, lam, e - ExactOperator.identity(e.dim).scale((lam + 1) / lam))


def check_ybe(lam1, lam2, L: int, j: int = 1) -> RelationReport:
    """``R_j(a) R_{j+1}(a+b) R_j(b) == R_{j+1}(b) R_j(a+b) R_{j+1}(a)`` exactly."""
    if L < 3:
        raise ValueError("Yang-Baxter check needs >= 3 links")
    a, b = as_fraction(lam1), as_fraction(lam2)
    for x in (a, b, a + b):
        if x == 0:
            raise ZeroDivisionError("spectral parameter pole")
    k = _link(j + 1, L)

    def R(link, lam):
        return r_matrix(link, lam, L).matrix

    lhs = R(j, a) @ R(k, a + b) @ R(j, b)
    rhs = R(k, b) @ R(j, a + b) @ R(k, a)
    rep = compare("ybe", L, (j, k), lhs, rhs,
                  f"R{j}({a}) R{k}({a + b}) R{j}({b})", f"R{k}({b}) R{j}({a + b}) R{k}({a})")
    rep.details.append(f"lambda1={a}, lambda2={b}")
    return rep


def random_spectral_pairs(n: int, seed: int, bound: int = 9) -> List[Tuple[Fraction, Fraction]]:
    """Seeded rational pairs with numerators/denominators in [-bound, bound], off the poles."""
    rng = random.Random(seed)
    out: List[Tuple[Fraction, Fraction]] = []

    def draw() -> Fraction:
        while True:
            p, q = rng.randint(-bound, bound), rng.randint(-bound, bound)
            if p and q:
                return Fraction(p, q)

    while len(out) < n:
        a, b = draw(), draw()
        if a + b != 0:
            out.append((a, b))
    return out


# -- flat-move algebra ----------------------------------------------------------

GH_NAMES = ("g1", "g2", "g3", "h1", "h2", "h3", "h4")


def build_gh(j: int, L: int, swapped: bool = False) -> Dict[str, ExactOperator]:
    """The products g1..g3, h1..h4 at link ``j``, plus ``e``, ``e'``, ``f``, ``f'``.

    With ``swapped=True`` the roles of links ``j`` and ``j+1`` are exchanged.
    """
    if L < 3:
        raise ValueError(f"need L >= 3, got L={L}")
    a, b = _link(j, L), _link(j + 1, L)
    if swapped:
        a, b = b, a
    e, e1 = local_e(a, L), local_e(b, L)
    f, f1 = local_F(a, L), local_F(b, L)
    return {
        "e": e, "e'": e1, "f": f, "f'": f1,
        "g1": f @ f1 @ f,
        "g2": e @ f1 @ e,
        "g3": e @ f1 @ f @ f1 @ e,
        "h1": e @ f1 @ f,
        "h2": e @ e1 @ f,
        "h3": f @ e1 @ e,
        "h4": f @ f1 @ e,
    }


# (label, lhs factors, rhs name)
FLAT_RELATIONS: Tuple[Tuple[str, Tuple[str, ...], str], ...] = (
    ("e e' e = e", ("e", "e'", "e"), "e"),
    ("f e' f = f", ("f", "e'", "f"), "f"),
    ("h2 h3 = g2", ("h2", "h3"), "g2"),
    ("h3 h2 = f", ("h3", "h2"), "f"),
    ("h1 h3 = g3", ("h1", "h3"), "g3"),
    ("h1 h4 = g3", ("h1", "h4"), "g3"),
    ("h2 h4 = g3", ("h2", "h4"), "g3"),
    ("h4 h1 = g1", ("h4", "h1"), "g1"),
    ("h4 h2 = g1", ("h4", "h2"), "g1"),
    ("h3 h1 = g1", ("h3", "h1"), "g1"),
    ("h1 g1 = h1", ("h1", "g1"), "h1"),
    ("g2 h1 = h1", ("g2", "h1"), "h1"),
    ("g3 h1 = h1", ("g3", "h1"), "h1"),
    ("h2 g1 = h2", ("h2", "g1"), "h2"),
    ("g2 h2 = h2", ("g2", "h2"), "h2"),
    ("g3 h2 = h1", ("g3", "h2"), "h1"),
    ("g1 h3 = h3", ("g1", "h3"), "h3"),
    ("h3 g2 = h3", ("h3", "g2"), "h3"),
    ("h3 g3 = h4", ("h3", "g3"), "h4"),
    ("g1 h4 = h4", ("g1", "h4"), "h4"),
    ("h4 g2 = h4", ("h4", "g2"), "h4"),
    ("h4 g3 = h4", ("h4", "g3"), "h4"),
)


def _product(ops: Dict[str, ExactOperator], names: Sequence[str]) -> ExactOperator:
    out = ops[names[0]]
    for n in names[1:]:
        out = out @ ops[n]
    return out


def idempotency_scalar(op: ExactOperator) -> Optional[Fraction]:
    """``c`` with ``op @ op == c * op``, or None if no such scalar exists."""
    return (op @ op).proportionality(op)


def check_flat_algebra(L: int) -> List[RelationReport]:
    """Every tabulated flat-move relation, at every link and in both index orders.

    Also reports, per link, the idempotency scalar of each g and the
    nilpotency of each h. Failures are report content, never exceptions.
    """
    if L < 3:
        raise ValueError(f"need L >= 3, got L={L}")
    out: List[RelationReport] = []
    for j in range(1, L + 1):
        for swapped in (False, True):
            tag = "swapped" if swapped else "direct"
            ops = build_gh(j, L, swapped)
            for label, factors, rhs in FLAT_RELATIONS:
                lhs = _product(ops, factors)
                rep = compare(f"{label} [{tag}]", L, (j,), lhs, ops[rhs], " ".join(factors), rhs)
                out.append(rep)
            for g in ("g1", "g2", "g3"):
                c = idempotency_scalar(ops[g])
                rep = compare(f"{g}^2 = c {g} [{tag}]", L, (j,), ops[g] @ ops[g],
                              ops[g].scale(c) if c is not None else ops[g], f"{g}^2", f"c {g}")
                rep.scalar = c
                rep.details.append(f"idempotency scalar: {c}")
                out.append(rep)
            for h in ("h1", "h2", "h3", "h4"):
                out.append(compare(f"{h}^2 = 0 [{tag}]", L, (j,), ops[h] @ ops[h],
                                   ExactOperator.zero(ops[h].dim), f"{h}^2", "0"))
    return out


CLOSURE_NAMES = ("f", "g1", "g2", "g3", "h1", "h2", "h3", "h4")


@dataclass
class ClosureEntry:
    left: str
    right: str
    # "zero", "multiple" (of a named operator) or "outside"
    kind: str
    target: Optional[str] = None
    scalar: Optional[Fraction] = None


def flat_closure(L: int, j: int = 1, swapped: bool = False) -> List[ClosureEntry]:
    """Classify all 64 products among the eight named flat-algebra operators."""
    ops = build_gh(j, L, swapped)
    out: List[ClosureEntry] = []
    for a in CLOSURE_NAMES:
        for b in CLOSURE_NAMES:
            p = ops[a] @ ops[b]
            if p.is_zero():
                out.append(ClosureEntry(a, b, "zero"))
                continue
            for t in CLOSURE_NAMES:
                c = p.proportionality(ops[t])
                if c is not None:
                    out.append(ClosureEntry(a, b, "multiple", t, c))
                    break
            else:
                out.append(ClosureEntry(a, b, "outside"))
    return out


# -- symmetric inverse semigroup S^2_1 -----------------------------------------

# x_{ab} assignments; x11 and x22 are the diagonal (idempotent) elements
S21_SUBSETS: Dict[str, Dict[Tuple[int, int], str]] = {
    "{g2, f, h2, h3}": {(1, 1): "g2", (2, 2): "f", (1, 2): "h2", (2, 1): "h3"},
    "{g3, g1, h1, h4}": {(1, 1): "g3", (2, 2): "g1", (1, 2): "h1", (2, 1): "h4"},
}


def check_s21(L: int, j: int = 1, swapped: bool = False) -> List[RelationReport]:
    """Compare each subset's 16 products with ``x_ab x_cd = delta_bc x_ad``.

    Each subset is first divided by the common idempotency scalar of its two
    diagonal elements; the scalar is reported. One report per subset.
    """
    if L < 3:
        raise ValueError(f"need L >= 3, got L={L}")
    ops = build_gh(j, L, swapped)
    out: List[RelationReport] = []
    for name, assign in S21_SUBSETS.items():
        s11 = idempotency_scalar(ops[assign[(1, 1)]])
        s22 = idempotency_scalar(ops[assign[(2, 2)]])
        rep = RelationReport(relation=f"S21 {name}", L=L, j=(j,), exact_equal=True,
                             max_abs_defect=Fraction(0), lhs="x_ab x_cd", rhs="delta_bc x_ad")
        if s11 is None or s22 is None or s11 != s22 or s11 == 0:
            rep.exact_equal = False
            rep.details.append(f"diagonal elements lack a common idempotency scalar ({s11}, {s22})")
            out.append(rep)
            continue
        rep.scalar = s11
        rep.details.append(f"normalization: divide by {s11}")
        x = {k: ops[v].scale(1 / s11) for k, v in assign.items()}
        zero = ExactOperator.zero(ops["f"].dim)
        for (a, b), left in x.items():
            for (c, d), right in x.items():
                expected = x[(a, d)] if b == c else zero
                defect = (left @ right - expected).max_abs_entry()
                if defect:
                    rep.exact_equal = False
                    rep.max_abs_defect = max(rep.max_abs_defect, defect)
                    want = f"x{a}{d}" if b == c else "0"
                    rep.details.append(f"x{a}{b} x{c}{d} != {want} "
                                       f"({assign[(a, b)]} {assign[(c, d)]}; defect {defect})")
        out.append(rep)
    return out
