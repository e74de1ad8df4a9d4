"""Complex state vectors supported on a set of basis codes."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Mapping, Tuple

import numpy as np
import scipy.sparse as sp

from .exact import ExactOperator


@dataclass(frozen=True)
class StateVector:
    """Amplitudes ``amps[n]`` on basis word ``codes[n]`` of the length-``L`` chain.

    ``codes`` is sorted and duplicate-free; words not listed have amplitude 0.
    """

    L: int
    codes: Tuple[int, ...]
    amps: np.ndarray

    @classmethod
    def from_mapping(cls, L: int, amps: Mapping[int, complex]) -> "StateVector":
        codes = tuple(sorted(amps))
        return cls(L, codes, np.array([complex(amps[c]) for c in codes], dtype=complex))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> "StateVector":
        n = self.norm
        if n == 0:
            raise ValueError("zero vector")
        return StateVector(self.L, self.codes, self.amps / n)

    def as_dict(self) -> Dict[int, complex]:
        return {c: complex(a) for c, a in zip(self.codes, self.amps)}

    def to_full(self) -> np.ndarray:
        out = np.zeros(3 ** self.L, dtype=complex)
        out[list(self.codes)] = self.amps
        return out

    def overlap(self, other: "StateVector") -> complex:
        """``<self|other>``."""
        a, b = self.as_dict(), other.as_dict()
        return sum((np.conj(a[c]) * b[c] for c in a.keys() & b.keys()), 0j)

    def __len__(self) -> int:
        return len(self.codes)


def eigen_residual(v: StateVector, E: float, H) -> float:
    """``||H v - E v||_2`` for unit ``v``.

    ``H`` may be the full ``3^L`` operator or a block whose basis is exactly
    ``v.codes``; either an :class:`ExactOperator` or a scipy sparse matrix.
    """
    if v.norm == 0:
        raise ValueError("zero vector")
    if isinstance(H, ExactOperator):
        H = H.to_sparse()
    H = sp.csr_matrix(H)
    if H.shape[0] == 3 ** v.L:
        x = v.to_full()
    elif H.shape[0] == len(v.codes):
        x = v.amps
    else:
        raise ValueError(f"dimension mismatch: operator {H.shape[0]}, state on {len(v.codes)} words")
    return float(np.linalg.norm(H @ x - E * x))
