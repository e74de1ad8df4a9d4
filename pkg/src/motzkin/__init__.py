"""Free Motzkin spin chain with periodic boundary conditions.

Exact operator assembly, algebra verification, two-particle Bethe ansatz,
exact diagonalization against a spin-1/2 XXX reference chain, and explicit
ground-state construction.
"""
from .basis import ConfigWord, SectorLabel, Step, decode, encode, enumerate_sector, sector_of, swap_ud, translate
from .exact import ExactOperator
from .operators import HamiltonianSpec, hamiltonian, local_D, local_e, local_F, local_U

__all__ = [
    "ConfigWord", "SectorLabel", "Step", "decode", "encode", "enumerate_sector",
    "sector_of", "swap_ud", "translate", "ExactOperator", "HamiltonianSpec",
    "hamiltonian", "local_D", "local_e", "local_F", "local_U",
]
