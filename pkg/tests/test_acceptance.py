"""Acceptance criteria 1-11, each at its stated tolerance.

Every test records a one-line verdict in ``RESULTS``; ``conftest.py`` prints
them at the end of the run. Run directly with ``python tests/test_acceptance.py``.
"""
import math
import sys
from fractions import Fraction
from math import comb

import numpy as np
import pytest

from motzkin.basis import sector_codes
from motzkin.bethe import solve_two_particle, two_particle_state
from motzkin.exact import rational_rank
from motzkin.operators import action_table_check, hamiltonian, local_e, number_ops, sector_hamiltonian
from motzkin.paths import annihilated, entangled_ground_states, product_ground_states
from motzkin.spectra import (
    compare_to_xxx, dense_spectrum, kernel_dimension, sector_spectrum, xxx_reference_spectrum,
)
from motzkin.state import eigen_residual
from motzkin.tl_algebra import check_flat_algebra, check_ptl, check_s21, check_ybe, random_spectral_pairs

from oracles import dense_hamiltonian

RESULTS = {}


def record(n, ok, detail):
    RESULTS[n] = (ok, detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


def test_criterion_1_ground_state_degeneracy():
    bad, seen = [], []
    for L in range(2, 9):
        rep = kernel_dimension(L, tol=1e-10)
        assert not rep.gap_ambiguous
        want = 2 ** (L + 1) - 1
        seen.append(f"L={L}:{rep.total}")
        if rep.total != want:
            bad.append(f"L={L} kernel {rep.total} vs {want}")
    # independent check of the counts on small chains
    for L in range(2, 6):
        ev = np.linalg.eigvalsh(dense_hamiltonian(L, 0.0))
        assert int(np.sum(ev < 1e-10)) == kernel_dimension(L).total
    record(1, not bad, "; ".join(bad) if bad else " ".join(seen))


def test_criterion_2_ground_state_census():
    bad = []
    for L in range(3, 7):
        prod = product_ground_states(L)
        ent = entangled_ground_states(L)
        if len(prod) != 2 ** L + 1:
            bad.append(f"L={L} product {len(prod)} vs {2 ** L + 1}")
        if len(ent) != 2 ** L - 2:
            bad.append(f"L={L} entangled {len(ent)} vs {2 ** L - 2}")
        assert all(annihilated(L, {w.code: Fraction(1)}) for w in prod)
        assert all(annihilated(L, g.amplitudes) for g in ent)
        vecs = [{w.code: Fraction(1)} for w in prod] + [g.amplitudes for g in ent]
        rank = rational_rank(vecs)
        kern = kernel_dimension(L).total
        if not rank == len(vecs) == kern:
            bad.append(f"L={L} rank {rank} of {len(vecs)} vs ED kernel {kern}")
    if len(product_ground_states(5)) != 33:
        bad.append("L=5 product count is not 33")
    if len(entangled_ground_states(4)) != 14:
        bad.append(f"L=4 entangled count {len(entangled_ground_states(4))} vs 14")
    record(2, not bad, "; ".join(bad) if bad else "counts, annihilation and span all hold")


def test_criterion_3_entangled_normalization():
    bad = 0
    total = 0
    example = ""
    for L in range(3, 9):
        for g in entangled_ground_states(L):
            total += 1
            want = comb(L, g.flats)
            if g.norm_sq != want:
                bad += 1
                example = example or f"e.g. {g.orbit.representative.text}: {g.norm_sq} vs {want}"
    record(3, bad == 0, f"{bad}/{total} orbit classes off {example}".strip())


def test_criterion_4_ptl_relations():
    bad = []
    for L in range(3, 7):
        bad += [f"L={L} {r.relation} j={r.j}" for r in check_ptl(L) if not r.exact_equal]
        for j in range(1, L + 1):
            e = local_e(j, L)
            if e @ e != 2 * e:
                bad.append(f"L={L} e_{j}^2")
    record(4, not bad, "; ".join(bad) if bad else "e1-e7 exact at L=3..6, e^2 = 2e")


def test_criterion_5_yang_baxter():
    pairs = random_spectral_pairs(20, seed=0)
    bad = [(L, a, b) for L in (3, 4) for a, b in pairs if not check_ybe(a, b, L).exact_equal]
    record(5, not bad, f"{len(bad)} failures" if bad else "20 seeded pairs exact at L=3,4")


def test_criterion_6_flat_move_algebra():
    listed_bad, sq_bad, s21_bad = set(), [], []
    for L in range(3, 6):
        for r in check_flat_algebra(L):
            if r.relation.startswith("h") and "^2" in r.relation:
                if not r.exact_equal:
                    sq_bad.append(f"L={L} {r.relation} j={r.j}")
            elif "^2" not in r.relation and not r.exact_equal:
                listed_bad.add(r.relation)
        for j in range(1, L + 1):
            for sw in (False, True):
                s21_bad += [f"L={L} j={j}" for r in check_s21(L, j, sw) if not r.exact_equal]
    ok = not (listed_bad or sq_bad or s21_bad)
    detail = (f"{len(listed_bad)} listed relations fail literally (off by a factor 2 or a swapped h); "
              f"h^2=0 failures {len(sq_bad)}; S21 failures {len(s21_bad)}")
    record(6, ok, detail)


def test_criterion_7_one_magnon():
    bad = []
    for L in range(3, 9):
        ev = sector_spectrum(L, (1, 0))
        want = np.sort([2 * (1 - math.cos(2 * math.pi * m / L)) for m in range(L)])
        if len(ev) != L or np.max(np.abs(ev - want)) > 1e-10:
            bad.append(f"L={L}")
    record(7, not bad, "; ".join(bad) if bad else "L=3..8 match to 1e-10")


def test_criterion_8_two_magnon_bethe():
    bad, worst = [], {}
    for L in range(4, 13):
        sols = solve_two_particle(L)
        classes = [sum(s.cls == c for s in sols) for c in ("vacuum-descendant", "real-scattering", "bound")]
        if len(sols) != L * (L - 1) // 2 or classes != [L, (L - 3) * (L - 2) // 2, L - 3]:
            bad.append(f"L={L} counts {len(sols)} {classes}")
        for fl in ("uu", "dd", "ud", "du"):
            u = fl.count("u")
            H = sector_hamiltonian(L, u, 2 - u).to_sparse()
            codes = sector_codes(L, u, 2 - u)
            for s in sols:
                v = two_particle_state(L, s, fl)
                amp = v.as_dict()
                x = np.array([amp.get(c, 0j) for c in codes])
                res = float(np.linalg.norm(H @ x - s.energy * x))
                worst[fl] = max(worst.get(fl, 0.0), res)
        for u, d in ((2, 0), (0, 2)):
            ed = np.linalg.eigvalsh(sector_hamiltonian(L, u, d).to_dense())
            be = np.sort([s.energy for s in sols])
            if np.max(np.abs(np.sort(ed) - be)) > 1e-8:
                bad.append(f"L={L} energies vs ED ({u},{d})")
    bad += [f"{fl} residual up to {r:.2g}" for fl, r in worst.items() if r >= 1e-8]
    record(8, not bad, "; ".join(bad) if bad else "counts, residuals and energies all hold")


def test_criterion_9_xxx_equivalence():
    bad = []
    for L in range(4, 8):
        rep = compare_to_xxx(L, tol=1e-9)
        bad += [f"L={L} {c.name}" for c in rep.checks if c.name.startswith("claim:") and not c.passed]
        # the oracle is built from bit strings, never from the step-chain code
        assert len(xxx_reference_spectrum(L, 2)) == comb(L, 2)
    detail = f"{len(bad)} failed checks, first: {bad[0]}" if bad else "all checks hold"
    record(9, not bad, detail)


def test_criterion_10_action_table_audit():
    rep = action_table_check(6)
    d = rep.to_dict()
    n1n2 = {(c.n1, c.n2) for c in rep.checks}
    complete = len(d["equations"]) == 8 and len(n1n2) == comb(6, 2)
    listed = len(d["mismatches"]) == len(rep.mismatches())
    mism = ", ".join(f"{m['equation']}@({m['n1']},{m['n2']})" for m in d["mismatches"])
    record(10, complete and listed,
           f"{len(rep.checks)} checks, {len(rep.mismatches())} discrepancies listed: {mism}")


def test_criterion_11_positive_epsilon():
    bad, kernels = [], []
    for eps in ("1/4", "1", "4"):
        for L in range(3, 7):
            rep = dense_spectrum(L, eps)
            if rep.eigenvalues.min() < -1e-10:
                bad.append(f"L={L} eps={eps} not PSD")
            kernels.append(f"{L}:{rep.kernel_dim}")
            Nu = number_ops(L)[0]
            if hamiltonian(L, eps).commutator(Nu).is_zero():
                bad.append(f"L={L} eps={eps} N_u commutes")
    record(11, not bad, "; ".join(bad) if bad else "PSD, [H, N_u] != 0; kernel dims " + " ".join(kernels[:4]))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
