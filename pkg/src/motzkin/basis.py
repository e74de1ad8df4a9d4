"""Configuration words, their base-3 codes, sectors and symmetry actions.

A configuration of the length-``L`` ring assigns one step (up, flat, down)
to every link. Words are encoded in base 3 with ``U=0, F=1, D=2`` and link 1
as the most significant digit; that code is the row/column index used by
every matrix in the package.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache
from math import comb, factorial
from typing import Iterable, List, Sequence, Tuple, Union


class Step(IntEnum):
    U = 0
    F = 1
    D = 2

    @property
    def char(self) -> str:
        return "ufd"[self]


_CHARS = {"u": Step.U, "f": Step.F, "d": Step.D}


def _as_step(s) -> Step:
    if isinstance(s, Step):
        return s
    if isinstance(s, str):
        try:
            return _CHARS[s.lower()]
        except KeyError:
            raise ValueError(f"unknown step symbol {s!r}; expected one of u, f, d") from None
    return Step(int(s))


@dataclass(frozen=True)
class ConfigWord:
    """Immutable word over {U, F, D}; ``steps[0]`` sits on link 1."""

    steps: Tuple[Step, ...]

    @property
    def L(self) -> int:
        return len(self.steps)

    @property
    def code(self) -> int:
        c = 0
        for s in self.steps:
            c = 3 * c + int(s)
        return c

    @property
    def text(self) -> str:
        return "".join(s.char for s in self.steps)

    def __str__(self) -> str:
        return self.text

    def __len__(self) -> int:
        return len(self.steps)

    def __getitem__(self, link: int) -> Step:
        """Step on ``link`` (1-based, cyclic)."""
        return self.steps[(link - 1) % self.L]

    def count(self, step) -> int:
        return self.steps.count(_as_step(step))


@dataclass(frozen=True)
class SectorLabel:
    """Numbers of up and down steps; conserved by the free Hamiltonian."""

    u: int
    d: int

    @property
    def r(self) -> int:
        return self.u + self.d

    def flats(self, L: int) -> int:
        return L - self.u - self.d

    def validate(self, L: int) -> None:
        if self.u < 0 or self.d < 0 or self.u + self.d > L:
            raise ValueError(f"invalid sector (u={self.u}, d={self.d}) for L={L}")

    def dimension(self, L: int) -> int:
        self.validate(L)
        return factorial(L) // (factorial(self.u) * factorial(self.d) * factorial(L - self.u - self.d))

    def swapped(self) -> "SectorLabel":
        return SectorLabel(self.d, self.u)


WordLike = Union[ConfigWord, str, Sequence]


def encode(word: WordLike) -> ConfigWord:
    """Build a :class:`ConfigWord` from a string like ``"ufd"`` or a step sequence."""
    if isinstance(word, ConfigWord):
        return word
    steps = tuple(_as_step(s) for s in word)
    if not steps:
        raise ValueError("zero-length chain")
    return ConfigWord(steps)


def decode(code: int, L: int) -> ConfigWord:
    if L < 1:
        raise ValueError("zero-length chain")
    if not 0 <= code < 3 ** L:
        raise ValueError(f"code {code} outside [0, 3^{L})")
    return ConfigWord(tuple(Step(d) for d in digits(code, L)))


@lru_cache(maxsize=None)
def _digit_table(L: int) -> Tuple[Tuple[int, ...], ...]:
    return tuple(itertools.product(range(3), repeat=L))


def digits(code: int, L: int) -> Tuple[int, ...]:
    """Base-3 digits of ``code``, link 1 first."""
    if L <= 10:
        return _digit_table(L)[code]
    out = []
    for _ in range(L):
        code, r = divmod(code, 3)
        out.append(r)
    return tuple(reversed(out))


def code_of(digs: Iterable[int]) -> int:
    c = 0
    for d in digs:
        c = 3 * c + d
    return c


def sector_of(w: WordLike) -> SectorLabel:
    w = encode(w)
    return SectorLabel(w.count(Step.U), w.count(Step.D))


def sector_of_code(code: int, L: int) -> SectorLabel:
    ds = digits(code, L)
    return SectorLabel(ds.count(0), ds.count(2))


@lru_cache(maxsize=None)
def sector_codes(L: int, u: int, d: int) -> Tuple[int, ...]:
    """Sorted codes of all words with ``u`` up and ``d`` down steps."""
    SectorLabel(u, d).validate(L)
    if L > 10:
        return tuple(_sector_codes_slow(L, u, d))
    table = _digit_table(L)
    return tuple(c for c, ds in enumerate(table) if ds.count(0) == u and ds.count(2) == d)


def _sector_codes_slow(L: int, u: int, d: int) -> List[int]:
    out = []
    for ups in itertools.combinations(range(L), u):
        rest = [i for i in range(L) if i not in ups]
        for downs in itertools.combinations(rest, d):
            ds = [1] * L
            for i in ups:
                ds[i] = 0
            for i in downs:
                ds[i] = 2
            out.append(code_of(ds))
    return sorted(out)


def enumerate_sector(L: int, s: SectorLabel) -> List[ConfigWord]:
    """All words in sector ``s``, sorted by code."""
    if L < 1:
        raise ValueError("zero-length chain")
    s.validate(L)
    return [decode(c, L) for c in sector_codes(L, s.u, s.d)]


def particle_sector_codes(L: int, r: int) -> Tuple[int, ...]:
    """Sorted codes of all words with ``u + d == r`` (binom(L, r) * 2^r of them)."""
    if not 0 <= r <= L:
        raise ValueError(f"particle number {r} outside [0, {L}]")
    return tuple(sorted(c for u in range(r + 1) for c in sector_codes(L, u, r - u)))


def particle_sector_dimension(L: int, r: int) -> int:
    return comb(L, r) * 2 ** r


def all_sectors(L: int) -> List[SectorLabel]:
    return [SectorLabel(u, d) for u in range(L + 1) for d in range(L + 1 - u)]


def translate(w: WordLike, shift: int = 1) -> ConfigWord:
    """Rotate the word so the step on link ``j`` moves to link ``j + shift``."""
    w = encode(w)
    s = shift % w.L
    return ConfigWord(w.steps[-s:] + w.steps[:-s]) if s else w


def translate_code(code: int, L: int, shift: int = 1) -> int:
    ds = digits(code, L)
    s = shift % L
    return code_of(ds[-s:] + ds[:-s]) if s else code


_SWAP = {Step.U: Step.D, Step.D: Step.U, Step.F: Step.F}


def swap_ud(w: WordLike) -> ConfigWord:
    w = encode(w)
    return ConfigWord(tuple(_SWAP[s] for s in w.steps))


def swap_ud_code(code: int, L: int) -> int:
    return code_of(2 - d if d != 1 else 1 for d in digits(code, L))
