"""Local moves, the periodic Hamiltonian and its symmetry operators.

Each local move is the rank-one operator ``|psi><psi|`` on the link pair
``(j, j+1)`` (link ``L+1`` is link 1), with the *unnormalized* kets

    U-move:  |u f> - |f u>
    D-move:  |d f> - |f d>
    F-move:  |f f> - |u d>

so every move squares to twice itself. This is the normalization for which
``e_j = U_j + D_j`` obeys ``e_j^2 = 2 e_j`` and ``e_j e_{j+1} e_j = e_j``,
and a single magnon costs ``2(1 - cos k)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .basis import Step, code_of, digits, sector_codes, swap_ud_code, translate_code
from .exact import ExactOperator, Rows, as_fraction

U, F, D = int(Step.U), int(Step.F), int(Step.D)

Ket2 = Mapping[Tuple[int, int], int]

U_KET: Ket2 = {(U, F): 1, (F, U): -1}
D_KET: Ket2 = {(D, F): 1, (F, D): -1}
F_KET: Ket2 = {(F, F): 1, (U, D): -1}


def _check_link(j: int, L: int, min_L: int = 2) -> None:
    if L < min_L:
        raise ValueError(f"need L >= {min_L}, got L={L}")
    if not 1 <= j <= L:
        raise ValueError(f"link {j} outside 1..{L}")


def _add_pair_projector(rows: Rows, L: int, j: int, ket: Ket2, weight: Fraction) -> None:
    a, b = j - 1, j % L
    for code in range(3 ** L):
        ds = digits(code, L)
        c_in = ket.get((ds[a], ds[b]))
        if not c_in:
            continue
        row_digits = list(ds)
        for (x, y), c_out in ket.items():
            row_digits[a], row_digits[b] = x, y
            i = code_of(row_digits)
            r = rows.setdefault(i, {})
            r[code] = r.get(code, Fraction(0)) + weight * c_in * c_out


def pair_projector(j: int, L: int, ket: Ket2) -> ExactOperator:
    """``|psi><psi|`` for a real two-link ket acting on links ``j, j+1``."""
    _check_link(j, L)
    rows: Rows = {}
    _add_pair_projector(rows, L, j, ket, Fraction(1))
    return ExactOperator(3 ** L, rows)


@lru_cache(maxsize=256)
def local_U(j: int, L: int) -> ExactOperator:
    return pair_projector(j, L, U_KET)


@lru_cache(maxsize=256)
def local_D(j: int, L: int) -> ExactOperator:
    return pair_projector(j, L, D_KET)


@lru_cache(maxsize=256)
def local_F(j: int, L: int) -> ExactOperator:
    """The height-changing flat move ``|ff> <-> |ud>``."""
    return pair_projector(j, L, F_KET)


@lru_cache(maxsize=256)
def local_e(j: int, L: int) -> ExactOperator:
    return local_U(j, L) + local_D(j, L)


@dataclass(frozen=True)
class HamiltonianSpec:
    L: int
    epsilon: Fraction = Fraction(0)
    boundary: str = field(default="periodic", init=False)

    def __post_init__(self):
        object.__setattr__(self, "epsilon", as_fraction(self.epsilon))
        if self.L < 2:
            raise ValueError(f"need L >= 2, got L={self.L}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be nonnegative, got {self.epsilon}")

    def build(self) -> ExactOperator:
        return hamiltonian(self.L, self.epsilon)


def hamiltonian(L: int, epsilon=0) -> ExactOperator:
    """``sum_j (U_j + D_j + epsilon F_j)`` on the periodic chain."""
    spec = HamiltonianSpec(L, epsilon)
    return _hamiltonian(spec.L, spec.epsilon)


@lru_cache(maxsize=32)
def _hamiltonian(L: int, epsilon: Fraction) -> ExactOperator:
    rows: Rows = {}
    one = Fraction(1)
    for j in range(1, L + 1):
        _add_pair_projector(rows, L, j, U_KET, one)
        _add_pair_projector(rows, L, j, D_KET, one)
        if epsilon:
            _add_pair_projector(rows, L, j, F_KET, epsilon)
    return ExactOperator(3 ** L, rows)


@lru_cache(maxsize=16)
def number_ops(L: int) -> Tuple[ExactOperator, ExactOperator, ExactOperator]:
    """Diagonal counters ``(N_u, N_d, N_f)``."""
    if L < 1:
        raise ValueError("zero-length chain")
    dim = 3 ** L
    counts = [digits(c, L) for c in range(dim)]
    return (
        ExactOperator.diagonal([ds.count(U) for ds in counts]),
        ExactOperator.diagonal([ds.count(D) for ds in counts]),
        ExactOperator.diagonal([ds.count(F) for ds in counts]),
    )


@lru_cache(maxsize=16)
def projector_Pd(L: int) -> ExactOperator:
    """Site-wise ``|f><f| + |u><u| + |u><d|``: rewrites every down step as up."""
    if L < 1:
        raise ValueError("zero-length chain")
    images = [code_of(U if d == D else d for d in digits(c, L)) for c in range(3 ** L)]
    rows: Rows = {}
    for c, t in enumerate(images):
        rows.setdefault(t, {})[c] = Fraction(1)
    return ExactOperator(3 ** L, rows)


@lru_cache(maxsize=16)
def interchange_op(L: int) -> ExactOperator:
    """Permutation exchanging up and down steps on every link.

    Built as ``prod_j (|u><d| + |d><u| + |f><f|)``; without the flat term the
    product would annihilate every word that contains a flat step.
    """
    if L < 1:
        raise ValueError("zero-length chain")
    return ExactOperator.permutation([swap_ud_code(c, L) for c in range(3 ** L)])


@lru_cache(maxsize=16)
def translation_op(L: int, shift: int = 1) -> ExactOperator:
    """Permutation ``T|w> = |translate(w, shift)>``."""
    if L < 1:
        raise ValueError("zero-length chain")
    return ExactOperator.permutation([translate_code(c, L, shift) for c in range(3 ** L)])


@lru_cache(maxsize=64)
def sector_hamiltonian(L: int, u: int, d: int) -> ExactOperator:
    """Block of ``H(L, 0)`` on sector ``(u, d)``, in sorted-code order.

    Built move by move on the sector basis, so it never forms the full
    ``3^L`` matrix.
    """
    if L < 2:
        raise ValueError(f"need L >= 2, got L={L}")
    codes = sector_codes(L, u, d)
    pos = {c: n for n, c in enumerate(codes)}
    rows: Rows = {}
    for col, code in enumerate(codes):
        ds = digits(code, L)
        for j in range(L):
            a, b = j, (j + 1) % L
            for ket in (U_KET, D_KET):
                c_in = ket.get((ds[a], ds[b]))
                if not c_in:
                    continue
                out = list(ds)
                for (x, y), c_out in ket.items():
                    out[a], out[b] = x, y
                    r = rows.setdefault(pos[code_of(out)], {})
                    r[col] = r.get(col, Fraction(0)) + c_in * c_out
    return ExactOperator(len(codes), rows)


# -- single-link matrices for the raising/lowering form -------------------

Mat3 = Tuple[Tuple[int, int, int], ...]


def _unit(a: int, b: int) -> Mat3:
    m = [[0, 0, 0] for _ in range(3)]
    m[a][b] = 1
    return tuple(tuple(r) for r in m)


SITE_OPS: Dict[str, Mat3] = {
    "1u": ((1, 0, 0), (0, 1, 0), (0, 0, 0)),
    "1d": ((0, 0, 0), (0, 1, 0), (0, 0, 1)),
    "uz": ((1, 0, 0), (0, -1, 0), (0, 0, 0)),
    "dz": ((0, 0, 0), (0, 1, 0), (0, 0, -1)),
    # raising creates the step, lowering turns it back into a flat
    "u+": _unit(U, F),
    "u-": _unit(F, U),
    "d+": _unit(D, F),
    "d-": _unit(F, D),
}


def bond_sum(L: int, left: Mat3, right: Mat3, coeff=1) -> ExactOperator:
    """``coeff * sum_j left_j right_{j+1}`` over all ``L`` periodic bonds."""
    coeff = as_fraction(coeff)
    rows: Rows = {}
    for code in range(3 ** L):
        ds = digits(code, L)
        for j in range(L):
            a, b = j, (j + 1) % L
            for x in range(3):
                lx = left[x][ds[a]]
                if not lx:
                    continue
                for y in range(3):
                    ry = right[y][ds[b]]
                    if not ry:
                        continue
                    nd = list(ds)
                    nd[a], nd[b] = x, y
                    i = code_of(nd)
                    r = rows.setdefault(i, {})
                    r[code] = r.get(code, Fraction(0)) + coeff * lx * ry
    return ExactOperator(3 ** L, rows)


def ladder_form_hamiltonian(L: int) -> ExactOperator:
    """Free Hamiltonian rebuilt from ``1^u, u^z, u^pm`` and their d-analogues."""
    ops = SITE_OPS
    half = Fraction(1, 2)
    total = ExactOperator.zero(3 ** L)
    for s in ("u", "d"):
        total = (total
                 + bond_sum(L, ops["1" + s], ops["1" + s], half)
                 - bond_sum(L, ops[s + "+"], ops[s + "-"])
                 - bond_sum(L, ops[s + "-"], ops[s + "+"])
                 - bond_sum(L, ops[s + "z"], ops[s + "z"], half))
    return total


# -- the (1,1)-sector action table -----------------------------------------

ACTION_EQUATIONS: Tuple[Tuple[str, str, str, Fraction], ...] = (
    ("sum 1u.1u/2", "1u", "1u", Fraction(1, 2)),
    ("sum 1d.1d/2", "1d", "1d", Fraction(1, 2)),
    ("sum u+.u-", "u+", "u-", Fraction(1)),
    ("sum d+.d-", "d+", "d-", Fraction(1)),
    ("sum u-.u+", "u-", "u+", Fraction(1)),
    ("sum d-.d+", "d-", "d+", Fraction(1)),
    ("sum uz/2.uz/2", "uz", "uz", Fraction(1, 4)),
    ("sum dz/2.dz/2", "dz", "dz", Fraction(1, 4)),
)


def _ud_code(L: int, up: int, down: int) -> Optional[int]:
    """Code of the word with ``u`` on link ``up``, ``d`` on ``down`` (1-based, cyclic)."""
    a, b = (up - 1) % L, (down - 1) % L
    if a == b:
        return None
    ds = [F] * L
    ds[a], ds[b] = U, D
    return code_of(ds)


def _tabulated_action(eq: int, L: int, n1: int, n2: int) -> Tuple[Optional[Dict[int, Fraction]], bool]:
    """Right-hand side of the printed case table for ``u`` at n1, ``d`` at n2.

    Returns ``(vector, defined)``; ``defined`` is False when the tabulated
    ket collapses both steps onto one link.
    """
    adjacent = n2 == n1 + 1
    same = _ud_code(L, n1, n2)

    def ket(up, down):
        c = _ud_code(L, up, down)
        return ({c: Fraction(1)}, True) if c is not None else (None, False)

    if eq in (0, 1):
        return {same: Fraction(L - 2, 2)}, True
    if eq == 2:
        return ket(n1 - 1, n1 + 1) if adjacent else ket(n1 - 1, n2)
    if eq == 3:
        return ({}, True) if adjacent else ket(n1, n2 - 1)
    if eq == 4:
        return ({}, True) if adjacent else ket(n1 + 1, n2)
    if eq == 5:
        return ket(n1, n1 + 2) if adjacent else ket(n1, n2 + 1)
    coeff = Fraction(L - 3, 4) - Fraction(1, 4) if adjacent else Fraction(L - 4, 4) - Fraction(1, 2)
    return ({same: coeff} if coeff else {}), True


@dataclass
class ActionCheck:
    equation: str
    n1: int
    n2: int
    case: str
    wrap: bool
    predicted: Optional[Dict[int, Fraction]]
    actual: Dict[int, Fraction]

    @property
    def match(self) -> bool:
        return self.predicted is not None and self.predicted == self.actual


@dataclass
class ActionTableReport:
    """Audit of the tabulated (1,1)-sector actions against direct matrix action.

    Only placements with the up step left of the down step (``n1 < n2``)
    fall inside the table's stated domain; ``uncovered`` counts the others.
    """

    L: int
    checks: List[ActionCheck]
    uncovered: int

    def counts(self) -> Dict[str, Dict[str, int]]:
        out: Dict[str, Dict[str, int]] = {}
        for c in self.checks:
            d = out.setdefault(c.equation, {"match": 0, "mismatch": 0, "wrap_mismatch": 0})
            if c.match:
                d["match"] += 1
            else:
                d["mismatch"] += 1
                if c.wrap:
                    d["wrap_mismatch"] += 1
        return out

    def mismatches(self) -> List[ActionCheck]:
        return [c for c in self.checks if not c.match]

    def to_dict(self) -> dict:
        return {
            "L": self.L,
            "uncovered_placements": self.uncovered,
            "equations": [{"equation": k, **v} for k, v in self.counts().items()],
            "mismatches": [
                {"equation": c.equation, "n1": c.n1, "n2": c.n2, "case": c.case, "wrap": c.wrap,
                 "predicted": None if c.predicted is None else _vec_json(c.predicted),
                 "actual": _vec_json(c.actual)}
                for c in self.mismatches()
            ],
        }


def _vec_json(v: Mapping[int, Fraction]) -> Dict[str, str]:
    return {str(k): f"{x.numerator}/{x.denominator}" for k, x in sorted(v.items())}


def action_table_check(L: int) -> ActionTableReport:
    if L < 4:
        raise ValueError(f"action table needs L >= 4, got L={L}")
    ops = [bond_sum(L, SITE_OPS[a], SITE_OPS[b], c) for _, a, b, c in ACTION_EQUATIONS]
    checks: List[ActionCheck] = []
    uncovered = 0
    for n1 in range(1, L + 1):
        for n2 in range(1, L + 1):
            if n1 == n2:
                continue
            if n2 < n1:
                uncovered += 1
                continue
            code = _ud_code(L, n1, n2)
            wrap = n1 == 1 and n2 == L
            case = "adjacent" if n2 == n1 + 1 else "separated"
            for eq, (name, *_rest) in enumerate(ACTION_EQUATIONS):
                predicted, defined = _tabulated_action(eq, L, n1, n2)
                actual = ops[eq].apply({code: 1})
                checks.append(ActionCheck(name, n1, n2, case, wrap, predicted if defined else None, actual))
    return ActionTableReport(L, checks, uncovered)


def local_moves(L: int, which: str) -> List[ExactOperator]:
    table = {"U": local_U, "D": local_D, "F": local_F, "e": local_e}
    return [table[which](j, L) for j in range(1, L + 1)]


def sector_operator(op: ExactOperator, codes: Sequence[int]) -> ExactOperator:
    """Restrict ``op`` to the span of ``codes``; refuses if the span is not invariant."""
    if op.leaks_out_of(codes):
        raise ValueError("operator does not preserve the requested subspace")
    return op.restrict(codes)
