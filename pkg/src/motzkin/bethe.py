"""Coordinate Bethe ansatz for the free chain.

Particles are the up/down steps moving through a sea of flats. Each carries
a momentum ``k`` and costs ``2(1 - cos k)``; two particles scatter with the
phase ``theta`` of :func:`scattering_phase`. On the ring the momenta solve

    L k1 = 2 pi m1 + theta,    L k2 = 2 pi m2 - theta.

The two-particle system is reduced to one unknown at fixed total momentum
``K = 2 pi M / L``: writing ``k1,2 = K/2 +- q``, real roots solve

    cos(K/2) cos(q L/2) = cos(q (L/2 - 1))        (M even)
    cos(K/2) sin(q L/2) = sin(q (L/2 - 1))        (M odd)

and bound states are the continuation ``q = i v``. Roots are bracketed on
a fine grid and polished with Brent's method, so the search is exhaustive
and deterministic; each momentum block is checked against its dimension.
"""
from __future__ import annotations

import cmath
import itertools
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from .basis import Step, code_of
from .state import StateVector, eigen_residual

__all__ = [
    "BetheSolution", "CLASSES", "magnon_energy", "one_particle_solutions",
    "scattering_phase", "solve_two_particle", "two_particle_state",
    "r_particle_state", "eigen_residual", "parse_flavors",
]

CLASSES = ("vacuum-descendant", "real-scattering", "bound")

# tolerance for reading off integer quantum numbers from float roots
_INT_TOL = 1e-6


@dataclass
class BetheSolution:
    L: int
    r: int
    momenta: Tuple[complex, ...]
    m: Tuple[int, ...]
    theta: np.ndarray
    cls: str
    energy: float
    # bound pair at K = pi with momenta pi/2 +- i*inf (even L only)
    singular: bool = False
    # residual of the reduced root equation and of momentum quantization
    bethe_residual: float = 0.0
    residual: Optional[float] = None

    @property
    def total_momentum(self) -> float:
        return float(np.real(sum(self.momenta))) % (2 * math.pi)

    def to_dict(self) -> dict:
        k_im: List[object] = []
        for n, k in enumerate(self.momenta):
            if self.singular:
                k_im.append("inf" if n == 0 else "-inf")
            else:
                k_im.append(float(f"{k.imag:.15g}"))
        return {
            "L": self.L,
            "r": self.r,
            "class": self.cls,
            "m": list(self.m),
            "k_re": [float(f"{k.real:.15g}") for k in self.momenta],
            "k_im": k_im,
            "energy": float(f"{self.energy:.15g}"),
            "residual": None if self.residual is None else float(f"{self.residual:.6g}"),
        }


def solutions_to_json(sols: Sequence[BetheSolution]) -> str:
    return json.dumps([s.to_dict() for s in sols], indent=2)


def magnon_energy(momenta: Sequence[complex]) -> float:
    """``2 [r - sum_j cos k_j]``, required to be real."""
    ks = list(momenta)
    if not ks:
        raise ValueError("empty momentum list")
    E = 2 * (len(ks) - sum(cmath.cos(complex(k)) for k in ks))
    if abs(E.imag) > 1e-10 * max(1.0, abs(E.real)):
        raise ValueError(f"non-physical root set (Im E = {E.imag:.3g})")
    return float(E.real)


def one_particle_solutions(L: int) -> List[BetheSolution]:
    """The ``L`` plane waves ``k = 2 pi m / L``."""
    if L < 2:
        raise ValueError(f"need L >= 2, got L={L}")
    out = []
    for m in range(L):
        k = 2 * math.pi * m / L
        out.append(BetheSolution(L, 1, (complex(k),), (m,), np.zeros((1, 1), dtype=complex),
                                 "vacuum-descendant" if m == 0 else "real-scattering",
                                 magnon_energy([k])))
    return out


def scattering_phase(k1: complex, k2: complex) -> complex:
    """Principal ``theta`` with

    ``e^{i theta} = -e^{i(k1-k2)} (e^{-ik1} + e^{ik2} - 2) / (e^{ik1} + e^{-ik2} - 2)``.
    """
    k1, k2 = complex(k1), complex(k2)
    den = cmath.exp(1j * k1) + cmath.exp(-1j * k2) - 2
    if abs(den) < 1e-14:
        raise ZeroDivisionError(f"phase singularity at k1={k1:.6g}, k2={k2:.6g}")
    num = cmath.exp(-1j * k1) + cmath.exp(1j * k2) - 2
    z = -cmath.exp(1j * (k1 - k2)) * num / den
    th = -1j * cmath.log(z)
    if abs(th.real + math.pi) < 1e-15:
        th = complex(math.pi, th.imag)
    return th


# -- two particles ------------------------------------------------------------

@lru_cache(maxsize=None)
def _block_dimensions(L: int) -> Tuple[int, ...]:
    """Dimension of each total-momentum block of the two-particle sector."""
    seen = set()
    dims = [0] * L
    for pair in itertools.combinations(range(L), 2):
        if pair in seen:
            continue
        orb = set()
        p = pair
        for _ in range(L):
            orb.add(p)
            p = tuple(sorted((x + 1) % L for x in p))
        seen |= orb
        period = len(orb)
        for M in range(L):
            if (M * period) % L == 0:
                dims[M] += 1
    return tuple(dims)


def _real_roots(L: int, c: float, sigma: int) -> List[Tuple[float, float]]:
    """Roots ``q`` in ``(0, pi)`` paired with the equation residual there."""
    if sigma == 1:
        def g(q):
            return c * np.cos(q * L / 2) - np.cos(q * (L / 2 - 1))
    else:
        def g(q):
            return c * np.sin(q * L / 2) - np.sin(q * (L / 2 - 1))
    grid = np.linspace(0.0, math.pi, 4000 * L + 1)[1:-1]
    vals = g(grid)
    roots = []
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            roots.append(float(grid[i]))
        elif vals[i] * vals[i + 1] < 0:
            roots.append(brentq(g, grid[i], grid[i + 1], xtol=1e-15, rtol=1e-15))
    return [(q, abs(float(g(q)))) for q in roots]


def _bound_root(L: int, c: float, sigma: int) -> Optional[Tuple[float, float]]:
    """``v > 0`` solving the continued equation with its residual, or None."""
    if sigma == 1:
        def ratio(v):
            return math.exp(-v) * (1 + math.exp(-v * (L - 2))) / (1 + math.exp(-v * L))
        top = 1.0
    else:
        def ratio(v):
            return math.exp(-v) * (1 - math.exp(-v * (L - 2))) / (1 - math.exp(-v * L))
        top = (L - 2) / L
    if not 1e-12 < c < top:
        return None
    v = brentq(lambda v: c - ratio(v), 1e-12, 200.0, xtol=1e-15, rtol=1e-15)
    return v, abs(c - ratio(v))


def _quantum_numbers(L: int, k1: complex, k2: complex, th: complex) -> Tuple[int, int]:
    """Unreduced integers ``m1, m2`` read off the two Bethe equations."""
    m1 = (L * k1 - th) / (2 * math.pi)
    m2 = (L * k2 + th) / (2 * math.pi)
    if max(abs(m1 - round(m1.real)), abs(m2 - round(m2.real))) > _INT_TOL:
        raise ArithmeticError(f"non-integer quantum numbers ({m1:.6g}, {m2:.6g}) at L={L}")
    return round(m1.real), round(m2.real)


def _classify(L: int, k1: complex, k2: complex, m: Tuple[int, int]) -> str:
    if min(abs(cmath.exp(1j * k1) - 1), abs(cmath.exp(1j * k2) - 1)) < 1e-10:
        return "vacuum-descendant"
    if (m[1] - m[0]) % L in (0, 1, L - 1):
        return "bound"
    return "real-scattering"


def _solution(L: int, k1: complex, k2: complex, root_residual: float = 0.0) -> BetheSolution:
    k1, k2 = complex(k1), complex(k2)
    if abs(k1) < 1e-14 and abs(k2) < 1e-14:
        return BetheSolution(L, 2, (0j, 0j), (0, 0), np.zeros((2, 2), dtype=complex),
                             "vacuum-descendant", 0.0)
    m1, m2 = _quantum_numbers(L, k1, k2, scattering_phase(k1, k2))
    # For deep bound states the phase formula loses ~vL/ln(10) digits to
    # cancellation; the first Bethe equation gives theta to full precision.
    th = L * k1 - 2 * math.pi * m1
    mom = abs(L * (k1 + k2) - 2 * math.pi * (m1 + m2))
    m = (m1 % L, m2 % L)
    theta = np.array([[0, th], [-th, 0]], dtype=complex)
    return BetheSolution(L, 2, (k1, k2), m, theta, _classify(L, k1, k2, m),
                         magnon_energy([k1, k2]), bethe_residual=max(root_residual, mom))


def _singular_solution(L: int) -> BetheSolution:
    """Bound pair at ``K = pi``: the ``v -> inf`` limit, ``sum_n (-1)^n |n, n+1>``."""
    M = L // 2
    m = (M // 2, M - M // 2)
    k = complex(math.pi / 2)
    theta = np.array([[0, 1j * math.inf], [-1j * math.inf, 0]], dtype=complex)
    return BetheSolution(L, 2, (k, k), m, theta, "bound", 2.0, singular=True)


def solve_two_particle(L: int) -> List[BetheSolution]:
    """All ``L(L-1)/2`` two-particle Bethe solutions, sorted by ``(m1, m2)``."""
    if L < 4:
        raise ValueError(f"two-particle solver needs L >= 4, got L={L}")
    dims = _block_dimensions(L)
    sols: List[BetheSolution] = []
    for M in range(L):
        half = math.pi * M / L
        c = math.cos(half)
        sigma = 1 if M % 2 == 0 else -1
        found = [_solution(L, half + q, half - q, res) for q, res in _real_roots(L, c, sigma)]
        if M == 0:
            found.append(_solution(L, 0, 0))
        # the same total momentum is reached from the centre half + pi
        for cc, ss, shift in ((c, sigma, 0.0), (-c, sigma * (-1) ** L, math.pi)):
            root = _bound_root(L, cc, ss)
            if root is not None:
                v, res = root
                found.append(_solution(L, half + shift + 1j * v, half + shift - 1j * v, res))
        if L % 2 == 0 and 2 * M == L:
            found.append(_singular_solution(L))
        if len(found) != dims[M]:
            raise RuntimeError(f"found {len(found)} roots at L={L}, M={M}; block has {dims[M]} states")
        sols.extend(found)
    sols.sort(key=lambda s: (s.m, s.cls, s.energy))
    return sols


# -- wavefunctions ----------------------------------------------------------------

_FLAVOR = {"u": int(Step.U), "d": int(Step.D)}


def parse_flavors(flavors) -> Tuple[int, ...]:
    out = []
    for ch in flavors:
        if isinstance(ch, (int, np.integer)) and not isinstance(ch, bool):
            ch = Step(int(ch)).char
        ch = str(ch).lower()
        if ch not in _FLAVOR:
            raise ValueError(f"flavor must be u or d, got {ch!r}")
        out.append(_FLAVOR[ch])
    return tuple(out)


def _placement_code(L: int, positions: Sequence[int], flavors: Sequence[int]) -> int:
    ds = [int(Step.F)] * L
    for n, fl in zip(positions, flavors):
        ds[n - 1] = fl
    return code_of(ds)


def _rotations(flavors: Tuple[int, ...]) -> List[Tuple[int, ...]]:
    return sorted({flavors[t:] + flavors[:t] for t in range(len(flavors))})


def _phase_matrix(momenta: Sequence[complex]) -> np.ndarray:
    r = len(momenta)
    th = np.zeros((r, r), dtype=complex)
    for j, l in itertools.combinations(range(r), 2):
        try:
            th[j, l] = scattering_phase(momenta[j], momenta[l])
        except ZeroDivisionError:
            raise ZeroDivisionError(f"phase singularity for momentum pair ({j + 1}, {l + 1})") from None
        th[l, j] = -th[j, l]
    return th


def r_particle_state(L: int, momenta: Sequence[complex], flavors, cyclic: bool = False,
                     theta: Optional[np.ndarray] = None) -> StateVector:
    """Unit-norm Bethe wavefunction for ``r`` particles.

    ``f(n) = sum_P exp(i sum_j k_P(j) n_j + i/2 sum_{l<j} theta_P(l)P(j))``
    over ordered positions ``n_1 < ... < n_r`` (links ``1..L``), with the
    flavor word laid onto the positions in order. With ``cyclic=True`` every
    cyclic rotation of the flavor word gets the same amplitude, which is the
    combination that is periodic on the ring. All-zero momenta give the
    equal-weight state. ``theta`` overrides the pairwise phases computed
    from the momenta.
    """
    ks = [complex(k) for k in momenta]
    fl = parse_flavors(flavors)
    r = len(ks)
    if len(fl) != r:
        raise ValueError(f"flavor word has length {len(fl)}, expected {r}")
    if not 1 <= r <= L:
        raise ValueError(f"particle number {r} outside [1, {L}]")
    words = _rotations(fl) if cyclic else [fl]
    zero = all(abs(k) < 1e-14 for k in ks)
    if zero:
        th = None
    elif theta is not None:
        th = np.asarray(theta, dtype=complex)
        if th.shape != (r, r):
            raise ValueError(f"phase matrix has shape {th.shape}, expected {(r, r)}")
    else:
        th = _phase_matrix(ks)
    perms = list(itertools.permutations(range(r)))
    amps: Dict[int, complex] = {}
    for pos in itertools.combinations(range(1, L + 1), r):
        if zero:
            f = 1.0 + 0j
        else:
            f = 0j
            for P in perms:
                arg = sum(ks[P[j]] * pos[j] for j in range(r))
                arg += 0.5 * sum(th[P[l], P[j]] for l in range(r) for j in range(l + 1, r))
                f += cmath.exp(1j * arg)
        for w in words:
            c = _placement_code(L, pos, w)
            amps[c] = amps.get(c, 0j) + f
    return StateVector.from_mapping(L, amps).normalized()


def two_particle_state(L: int, sol: BetheSolution, flavors, cyclic: bool = False) -> StateVector:
    """Unit-norm state of a two-particle solution with the given flavor word."""
    fl = parse_flavors(flavors)
    if len(fl) != 2:
        raise ValueError(f"flavor word has length {len(fl)}, expected 2")
    if sol.r != 2 or sol.L != L:
        raise ValueError("solution does not belong to this two-particle problem")
    if not sol.singular:
        return r_particle_state(L, sol.momenta, fl, cyclic, theta=sol.theta)
    words = _rotations(fl) if cyclic else [fl]
    amps: Dict[int, complex] = {}
    for n in range(1, L + 1):
        pos = (n, n % L + 1)
        sign = (-1) ** (n - 1)
        if pos[1] < pos[0]:
            pos = (pos[1], pos[0])
        for w in words:
            c = _placement_code(L, pos, w)
            amps[c] = amps.get(c, 0j) + sign
    return StateVector.from_mapping(L, amps).normalized()
