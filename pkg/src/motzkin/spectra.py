"""Exact diagonalization, the spin-1/2 XXX reference chain and spectrum comparisons.

At ``epsilon = 0`` every ``(u, d)`` block is diagonalized separately. In a
block the particles (up and down steps) hop through the flats but can never
pass each other, so the cyclic order of their flavors is conserved up to
rotation. Grouping configurations by that binary necklace gives the exact
decomposition used in :func:`compare_to_xxx`: a necklace of period ``p``
contributes the ``r``-magnon XXX spectrum twisted by ``2 pi t / p`` for each
``t = 0..p-1``.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .basis import SectorLabel, all_sectors, sector_codes, translate_code
from .exact import as_fraction
from .operators import hamiltonian, sector_hamiltonian

DENSE_CAP = 8
SECTOR_CAP = 10


# -- small helpers ------------------------------------------------------------

def distinct_values(values: Sequence[float], rel: float = 1e-9) -> List[Tuple[float, int]]:
    """Cluster sorted values whose neighbours differ by < ``rel * max(1, |x|)``."""
    vals = np.sort(np.asarray(values, dtype=float))
    out: List[List[float]] = []
    for x in vals:
        if out and x - out[-1][-1] < rel * max(1.0, abs(x)):
            out[-1].append(x)
        else:
            out.append([x])
    return [(float(np.mean(c)), len(c)) for c in out]


def _eigvalsh(m: np.ndarray) -> np.ndarray:
    if m.shape[0] == 0:
        return np.zeros(0)
    return np.sort(np.linalg.eigvalsh(m))


@lru_cache(maxsize=None)
def necklaces(u: int, d: int) -> Tuple[Tuple[str, int], ...]:
    """Binary necklaces with ``u`` letters u and ``d`` letters d, as (min rotation, period)."""
    r = u + d
    if r == 0:
        return (("", 1),)
    seen = set()
    out = []
    for ups in itertools.combinations(range(r), u):
        w = "".join("u" if i in ups else "d" for i in range(r))
        if w in seen:
            continue
        rots = {w[t:] + w[:t] for t in range(r)}
        seen |= rots
        out.append((min(rots), len(rots)))
    return tuple(sorted(out))


def necklace_count(r: int) -> int:
    """Number of binary necklaces of length ``r`` (1 for ``r = 0``)."""
    return sum(len(necklaces(u, r - u)) for u in range(r + 1))


def periodic_kernel_dimension(L: int) -> int:
    """Zero modes of ``H(L, 0)``: ``1 + 2^L + sum_{r=1}^{L-1} N2(r)``."""
    return 1 + 2 ** L + sum(necklace_count(r) for r in range(1, L))


# -- reports ------------------------------------------------------------------

@dataclass
class SectorSpectrum:
    u: Optional[int]
    d: Optional[int]
    eigenvalues: np.ndarray
    kernel_dim: int

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)


@dataclass
class SpectrumReport:
    L: int
    epsilon: Fraction
    sectors: List[SectorSpectrum]
    tol: float = 1e-10
    momenta: Optional[Dict[int, np.ndarray]] = None

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.sort(np.concatenate([s.eigenvalues for s in self.sectors]))

    @property
    def kernel_dim(self) -> int:
        return sum(s.kernel_dim for s in self.sectors)

    @property
    def min_nonzero(self) -> Optional[float]:
        ev = self.eigenvalues
        above = ev[ev >= self.tol]
        return float(above[0]) if len(above) else None

    @property
    def gap_ambiguous(self) -> bool:
        m = self.min_nonzero
        return m is not None and m <= 100 * self.tol

    def distinct(self) -> List[Tuple[float, int]]:
        return distinct_values(self.eigenvalues)

    def to_dict(self) -> dict:
        return {
            "L": self.L,
            "epsilon": str(self.epsilon),
            "sectors": [
                {"u": s.u, "d": s.d, "dim": s.dim,
                 "eigenvalues": [float(f"{x:.12g}") for x in s.eigenvalues],
                 "kernel_dim": s.kernel_dim}
                for s in self.sectors
            ],
            "distinct": [{"value": float(f"{v:.12g}"), "multiplicity": m} for v, m in self.distinct()],
            "kernel_dim": self.kernel_dim,
            "gap_ambiguity": self.gap_ambiguous,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["sector_u", "sector_d", "eigenvalue"])
        for s in self.sectors:
            for x in s.eigenvalues:
                w.writerow(["" if s.u is None else s.u, "" if s.d is None else s.d, f"{x:.12g}"])
        return buf.getvalue()


# -- exact diagonalization -------------------------------------------------------

def sector_spectrum(L: int, sector, epsilon=0) -> np.ndarray:
    """Sorted spectrum of ``H(L, 0)`` on sector ``(u, d)``."""
    if as_fraction(epsilon) != 0:
        raise ValueError("sectors not conserved")
    s = sector if isinstance(sector, SectorLabel) else SectorLabel(*sector)
    s.validate(L)
    if L > SECTOR_CAP:
        raise ValueError(f"L={L} above sector cap {SECTOR_CAP}")
    return _sector_eigs(L, s.u, s.d)


@lru_cache(maxsize=256)
def _sector_eigs(L: int, u: int, d: int) -> np.ndarray:
    ev = _eigvalsh(sector_hamiltonian(L, u, d).to_dense())
    ev.setflags(write=False)
    return ev


def dense_spectrum(L: int, epsilon=0, tol: float = 1e-10, cap: int = DENSE_CAP) -> SpectrumReport:
    """Full spectrum of ``H(L, epsilon)``.

    At ``epsilon = 0`` the matrix is diagonalized block by block over all
    ``(u, d)`` sectors, which is exact and much cheaper; otherwise the full
    ``3^L`` matrix is diagonalized.
    """
    eps = as_fraction(epsilon)
    if L < 2:
        raise ValueError(f"need L >= 2, got L={L}")
    if L > cap:
        raise ValueError("above dense cap; use --sector")
    if eps == 0:
        sectors = []
        for s in all_sectors(L):
            ev = _sector_eigs(L, s.u, s.d)
            sectors.append(SectorSpectrum(s.u, s.d, ev, int(np.sum(ev < tol))))
    else:
        ev = _eigvalsh(hamiltonian(L, eps).to_dense())
        sectors = [SectorSpectrum(None, None, ev, int(np.sum(ev < tol)))]
    return SpectrumReport(L, eps, sectors, tol)


@dataclass
class KernelReport:
    L: int
    epsilon: Fraction
    total: int
    tol: float
    min_nonzero: Optional[float]
    gap_ambiguous: bool
    per_r: Dict[int, int] = field(default_factory=dict)
    per_sector: Dict[Tuple[int, int], int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "L": self.L, "epsilon": str(self.epsilon), "kernel_dim": self.total,
            "tol": self.tol, "min_nonzero": self.min_nonzero,
            "gap_ambiguity": self.gap_ambiguous,
            "per_r": {str(r): n for r, n in sorted(self.per_r.items())},
        }


def kernel_dimension(L: int, epsilon=0, tol: float = 1e-10) -> KernelReport:
    """Number of eigenvalues below ``tol``, with a gap sanity check.

    The smallest eigenvalue above ``tol`` must exceed ``100 * tol``;
    otherwise the report is flagged ``gap_ambiguous``. At ``epsilon = 0``
    the count is broken down by particle number ``r = u + d``.
    """
    eps = as_fraction(epsilon)
    cap = SECTOR_CAP if eps == 0 else DENSE_CAP
    rep = dense_spectrum(L, eps, tol, cap=cap)
    out = KernelReport(L, eps, rep.kernel_dim, tol, rep.min_nonzero, rep.gap_ambiguous)
    if eps == 0:
        for s in rep.sectors:
            out.per_sector[(s.u, s.d)] = s.kernel_dim
            out.per_r[s.u + s.d] = out.per_r.get(s.u + s.d, 0) + s.kernel_dim
    return out


# -- the spin-1/2 XXX reference chain --------------------------------------------

def xxx_reference_spectrum(L: int, magnons: int, twist: float = 0.0) -> np.ndarray:
    """Spectrum of ``sum_j (1 - P_{j,j+1})`` on the periodic spin-1/2 ring.

    Restricted to ``magnons`` down spins. A magnon hopping across the bond
    ``(L, 1)`` picks up ``exp(+-i twist)``. Built from bit strings, sharing
    nothing with the step-chain code.
    """
    if L < 2:
        raise ValueError(f"need L >= 2, got L={L}")
    if not 0 <= magnons <= L:
        raise ValueError(f"magnon number {magnons} outside [0, {L}]")
    states = [sum(1 << i for i in c) for c in itertools.combinations(range(L), magnons)]
    index = {s: n for n, s in enumerate(states)}
    H = np.zeros((len(states), len(states)), dtype=complex)
    for n, s in enumerate(states):
        for i in range(L):
            j = (i + 1) % L
            bi, bj = (s >> i) & 1, (s >> j) & 1
            if bi == bj:
                continue
            H[n, n] += 1
            t = s ^ ((1 << i) | (1 << j))
            # magnon moving i -> j across the wrap bond gains e^{+i twist}
            phase = 1.0
            if j == 0:
                phase = np.exp(1j * twist) if bi else np.exp(-1j * twist)
            H[index[t], n] -= phase
    return _eigvalsh(H)


def twisted_sector_prediction(L: int, u: int, d: int) -> np.ndarray:
    """Sector spectrum predicted from necklaces and twisted XXX blocks."""
    parts = [xxx_reference_spectrum(L, u + d, 2 * math.pi * t / p)
             for _, p in necklaces(u, d) for t in range(p)]
    return np.sort(np.concatenate(parts)) if parts else np.zeros(0)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class ComparisonReport:
    L: int
    tol: float
    checks: List[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def get(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"L": self.L, "tol": self.tol, "passed": self.passed,
                "checks": [c.to_dict() for c in self.checks]}


def _same_distinct(a: Sequence[float], b: Sequence[float], tol: float) -> Tuple[bool, str]:
    da = [v for v, _ in distinct_values(a)]
    db = [v for v, _ in distinct_values(b)]
    if len(da) != len(db):
        return False, f"{len(da)} vs {len(db)} distinct values"
    err = float(np.max(np.abs(np.array(da) - np.array(db)))) if da else 0.0
    return err < tol, f"{len(da)} distinct values, max deviation {err:.2e}"


def _same_multiset(a: np.ndarray, b: np.ndarray, tol: float) -> Tuple[bool, float]:
    if len(a) != len(b):
        return False, math.inf
    if len(a) == 0:
        return True, 0.0
    err = float(np.max(np.abs(np.sort(a) - np.sort(b))))
    return err < tol, err


def compare_to_xxx(L: int, tol: float = 1e-9, zero_tol: float = 1e-10) -> ComparisonReport:
    """Compare ``H(L, 0)`` with the XXX reference chain.

    Checks named ``claim:*`` test the stated equivalence literally: equal
    distinct spectra, per-``r`` nonzero multiplicities ``2^r`` times the XXX
    ones, zero modes ``1, 2^r, 2^L`` and the ``r = 2`` nonzero total
    ``2L(L-1) - 4``. Checks named ``necklace:*`` test the exact decomposition
    described in the module docstring, sector by sector.
    """
    if L < 2:
        raise ValueError(f"need L >= 2, got L={L}")
    if L > DENSE_CAP:
        raise ValueError("above dense cap; use --sector")
    checks: List[Check] = []
    fm = dense_spectrum(L, 0).eigenvalues
    xxx = np.sort(np.concatenate([xxx_reference_spectrum(L, r) for r in range(L + 1)]))
    ok, det = _same_distinct(fm, xxx, tol)
    checks.append(Check("claim:distinct-eigenvalues", ok, det))

    for r in range(L + 1):
        ev = np.sort(np.concatenate([_sector_eigs(L, u, r - u) for u in range(r + 1)]))
        ref = xxx_reference_spectrum(L, r)
        zeros = int(np.sum(ev < zero_tol))
        want = 1 if r == 0 else (2 ** L if r == L else 2 ** r)
        checks.append(Check(f"claim:zero-modes r={r}", zeros == want, f"{zeros} zero modes, claimed {want}"))
        nz, nz_ref = ev[ev >= zero_tol], ref[ref >= zero_tol]
        ok = True
        detail = ""
        counts = distinct_values(nz)
        counts_ref = distinct_values(nz_ref)
        if len(counts) != len(counts_ref):
            ok, detail = False, f"{len(counts)} vs {len(counts_ref)} distinct nonzero values"
        else:
            for (v, m), (vr, mr) in zip(counts, counts_ref):
                if abs(v - vr) >= tol or m != 2 ** r * mr:
                    ok = False
                    detail = f"E={v:.10g}: multiplicity {m}, claimed {2 ** r}x{mr}"
                    break
            else:
                detail = f"{len(nz)} nonzero states"
        checks.append(Check(f"claim:multiplicity-ratio r={r}", ok, detail))
        if r == 2:
            want2 = 2 * L * (L - 1) - 4
            checks.append(Check("claim:r2-nonzero-total", len(nz) == want2,
                                f"{len(nz)} nonzero states, claimed {want2}"))

    for s in all_sectors(L):
        ok, err = _same_multiset(_sector_eigs(L, s.u, s.d), twisted_sector_prediction(L, s.u, s.d), tol)
        checks.append(Check(f"necklace:sector ({s.u},{s.d})", ok, f"max deviation {err:.2e}"))
    zeros = int(np.sum(fm < zero_tol))
    want = periodic_kernel_dimension(L)
    checks.append(Check("necklace:kernel", zeros == want, f"{zeros} zero modes, predicted {want}"))
    return ComparisonReport(L, tol, checks)


# -- translation resolution ---------------------------------------------------------

def momentum_resolve(L: int, sector) -> Dict[int, np.ndarray]:
    """Spectrum of a sector split by total momentum ``K = 2 pi m / L``.

    Momentum states are ``sum_s e^{iKs} T^s |w>`` with ``T`` the translation
    by one link, so ``T`` acts on block ``m`` as ``exp(-iK)``.
    """
    s = sector if isinstance(sector, SectorLabel) else SectorLabel(*sector)
    s.validate(L)
    codes = sector_codes(L, s.u, s.d)
    pos = {c: n for n, c in enumerate(codes)}
    H = sector_hamiltonian(L, s.u, s.d).to_dense()
    orbits = []
    seen = set()
    for c in codes:
        if c in seen:
            continue
        orb = [c]
        nxt = translate_code(c, L)
        while nxt != c:
            orb.append(nxt)
            nxt = translate_code(nxt, L)
        seen.update(orb)
        orbits.append(orb)
    out: Dict[int, np.ndarray] = {}
    for m in range(L):
        K = 2 * math.pi * m / L
        cols = []
        for orb in orbits:
            p = len(orb)
            if (m * p) % L:
                continue
            v = np.zeros(len(codes), dtype=complex)
            for t, c in enumerate(orb):
                v[pos[c]] = np.exp(1j * K * t)
            cols.append(v / math.sqrt(p))
        if not cols:
            out[m] = np.zeros(0)
            continue
        B = np.array(cols).T
        out[m] = _eigvalsh(B.conj().T @ H @ B)
    return out
