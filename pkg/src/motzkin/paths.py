"""Path picture, equivalence-move orbits and explicit ground states.

The height-preserving moves ``uf <-> fu`` and ``df <-> fd`` act cyclically
on the ring. Because a flat can carry a step across the wrap bond, an orbit
is fixed by its flat count and by the cyclic order of its u/d steps (a
binary necklace), and it contains ``p * binom(L, f)`` words when that
necklace has period ``p``. The equal-weight superposition over each orbit is
a zero-energy state.
"""
from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Tuple

import numpy as np

from .basis import ConfigWord, Step, code_of, decode, digits, encode, sector_codes, sector_of
from .exact import rational_rank
from .operators import sector_hamiltonian
from .spectra import DENSE_CAP, kernel_dimension
from .state import StateVector

U, F, D = int(Step.U), int(Step.F), int(Step.D)


@dataclass(frozen=True)
class PathProfile:
    heights: Tuple[int, ...]

    @property
    def net(self) -> int:
        return self.heights[-1] - self.heights[0]


def to_path(w) -> PathProfile:
    """Cumulative heights ``h_0 = 0, h_j = h_{j-1} + (+1, 0, -1)``."""
    w = encode(w)
    h = [0]
    for s in w.steps:
        h.append(h[-1] + (1 if s == Step.U else -1 if s == Step.D else 0))
    return PathProfile(tuple(h))


@dataclass(frozen=True)
class Orbit:
    representative: ConfigWord
    members: Tuple[ConfigWord, ...]

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def codes(self) -> Tuple[int, ...]:
        return tuple(m.code for m in self.members)


def _neighbours(ds: Tuple[int, ...]):
    L = len(ds)
    for j in range(L):
        k = (j + 1) % L
        a, b = ds[j], ds[k]
        if a != b and F in (a, b):
            out = list(ds)
            out[j], out[k] = b, a
            yield tuple(out)


def _orbit_codes(code: int, L: int) -> List[int]:
    start = digits(code, L)
    seen = {start}
    queue = deque([start])
    while queue:
        for n in _neighbours(queue.popleft()):
            if n not in seen:
                seen.add(n)
                queue.append(n)
    return sorted(code_of(ds) for ds in seen)


def orbit(w) -> Orbit:
    """Closure of ``w`` under the cyclic ``uf <-> fu`` and ``df <-> fd`` moves."""
    w = encode(w)
    codes = _orbit_codes(w.code, w.L)
    members = tuple(decode(c, w.L) for c in codes)
    return Orbit(members[0], members)


def sector_orbits(L: int, u: int, d: int) -> List[Orbit]:
    """Partition of sector ``(u, d)`` into orbits, ordered by representative code."""
    out = []
    seen = set()
    for c in sector_codes(L, u, d):
        if c in seen:
            continue
        codes = _orbit_codes(c, L)
        seen.update(codes)
        members = tuple(decode(x, L) for x in codes)
        out.append(Orbit(members[0], members))
    return out


def annihilated(L: int, vec: Dict[int, Fraction]) -> bool:
    """Exact test of ``H(L, 0) v == 0`` for a vector inside one sector."""
    if not vec:
        return True
    s = sector_of(decode(next(iter(vec)), L))
    codes = sector_codes(L, s.u, s.d)
    pos = {c: n for n, c in enumerate(codes)}
    if any(c not in pos for c in vec):
        raise ValueError("vector spans several sectors")
    H = sector_hamiltonian(L, s.u, s.d)
    return not H.apply({pos[c]: a for c, a in vec.items()})


@dataclass(frozen=True)
class GroundState:
    """Unnormalized zero mode with exact amplitudes; ``norm_sq`` is its squared norm."""

    L: int
    flats: int
    amplitudes: Dict[int, Fraction]
    orbit: Optional[Orbit] = None

    @property
    def norm_sq(self) -> Fraction:
        return sum((a * a for a in self.amplitudes.values()), Fraction(0))

    def state(self) -> StateVector:
        return StateVector.from_mapping(self.L, {c: float(a) for c, a in self.amplitudes.items()}).normalized()

    def to_dict(self) -> dict:
        return {
            "L": self.L,
            "flats": self.flats,
            "representative": self.orbit.representative.text if self.orbit else decode(min(self.amplitudes), self.L).text,
            "norm_sq": str(self.norm_sq),
            "amplitudes": {str(c): f"{a.numerator}/{a.denominator}" for c, a in sorted(self.amplitudes.items())},
        }


def product_ground_states(L: int) -> List[ConfigWord]:
    """The flat-free words and the all-flat word, each checked to be a zero mode."""
    if L < 1:
        raise ValueError("zero-length chain")
    words = [encode("".join(bits)) for bits in itertools.product("ud", repeat=L)]
    words.append(encode("f" * L))
    words.sort(key=lambda w: w.code)
    if L >= 2:
        for w in words:
            if not annihilated(L, {w.code: Fraction(1)}):
                raise ArithmeticError(f"{w.text} is not a zero mode")
    return words


def entangled_ground_states(L: int) -> List[GroundState]:
    """Equal-weight superpositions over every orbit with ``1 <= f <= L-1`` flats.

    States are ordered by flat count, then sector, then representative code.
    Each is verified to be annihilated by ``H(L, 0)`` exactly.
    """
    if L < 2:
        raise ValueError(f"need L >= 2, got L={L}")
    out = []
    for f in range(1, L):
        r = L - f
        for u in range(r + 1):
            for orb in sector_orbits(L, u, r - u):
                gs = GroundState(L, f, {c: Fraction(1) for c in orb.codes}, orb)
                if not annihilated(L, gs.amplitudes):
                    raise ArithmeticError(f"orbit of {orb.representative.text} is not a zero mode")
                out.append(gs)
    return out


@dataclass
class GSDReport:
    L: int
    product: int
    entangled: int
    rank: int
    ed_kernel: Optional[int]

    @property
    def total(self) -> int:
        return self.product + self.entangled

    @property
    def claimed(self) -> int:
        return 2 ** (self.L + 1) - 1

    def to_dict(self) -> dict:
        return {"L": self.L, "product": self.product, "entangled": self.entangled,
                "total": self.total, "rank": self.rank, "ed_kernel": self.ed_kernel,
                "claimed": self.claimed}


def gsd(L: int, cross_check: bool = True) -> GSDReport:
    """Count zero modes by explicit construction and compare with ED.

    Raises ``ArithmeticError("GSD inconsistency")`` if the constructed states
    are dependent or their number differs from the ED kernel dimension.
    """
    if L < 2:
        raise ValueError(f"need L >= 2, got L={L}")
    prod = product_ground_states(L)
    ent = entangled_ground_states(L)
    vectors = [{w.code: Fraction(1)} for w in prod] + [g.amplitudes for g in ent]
    rank = rational_rank(vectors)
    ed = kernel_dimension(L).total if cross_check and L <= DENSE_CAP else None
    rep = GSDReport(L, len(prod), len(ent), rank, ed)
    if rank != rep.total or (ed is not None and ed != rep.total):
        raise ArithmeticError(f"GSD inconsistency: {rep.total} constructed, rank {rank}, ED kernel {ed}")
    return rep


def ground_states_json(L: int) -> str:
    prod = [GroundState(L, w.count(Step.F), {w.code: Fraction(1)}) for w in product_ground_states(L)]
    return json.dumps({"L": L, "product": [g.to_dict() for g in prod],
                       "entangled": [g.to_dict() for g in entangled_ground_states(L)]}, indent=2)


def orbit_size_prediction(w) -> int:
    """``p * binom(L, f)`` with ``p`` the period of the word's u/d necklace."""
    w = encode(w)
    f = w.count(Step.F)
    seq = "".join(s.char for s in w.steps if s != Step.F)
    if not seq:
        return 1
    r = len(seq)
    p = next(t for t in range(1, r + 1) if r % t == 0 and seq == seq[t:] + seq[:t])
    if f == 0:
        return 1
    return p * comb(w.L, f)


def flat_stratum_orbit_count(L: int, f: int) -> int:
    return sum(len(sector_orbits(L, u, L - f - u)) for u in range(L - f + 1))


def equal_weight_is_unique(L: int, orb: Orbit, seed: int = 0) -> bool:
    """Perturb one amplitude of an orbit superposition and confirm it stops being a zero mode."""
    rng = np.random.default_rng(seed)
    codes = orb.codes
    vec = {c: Fraction(1) for c in codes}
    target = codes[int(rng.integers(len(codes)))]
    vec[target] += Fraction(int(rng.integers(1, 5)), int(rng.integers(1, 5)))
    return not annihilated(L, vec)
