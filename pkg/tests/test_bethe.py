import cmath
import json
import math
from collections import Counter

import numpy as np
import pytest

from motzkin.basis import decode, sector_codes
from motzkin.bethe import (
    magnon_energy, one_particle_solutions, r_particle_state, scattering_phase,
    solutions_to_json, solve_two_particle, two_particle_state,
)
from motzkin.operators import hamiltonian, interchange_op, sector_hamiltonian
from motzkin.state import StateVector, eigen_residual


def sector_residual(v, E, L, u, d):
    codes = sector_codes(L, u, d)
    amp = v.as_dict()
    assert set(amp) <= set(codes)
    x = np.array([amp.get(c, 0j) for c in codes])
    H = sector_hamiltonian(L, u, d).to_sparse()
    return float(np.linalg.norm(H @ x - E * x))


def test_magnon_energy():
    assert magnon_energy([math.pi]) == pytest.approx(4)
    assert magnon_energy([0, 0]) == 0
    assert magnon_energy([2 * math.pi / 5]) == pytest.approx(1.3819660112501, abs=1e-12)
    assert magnon_energy([1 + 0.5j, 1 - 0.5j]) == pytest.approx(4 - 4 * math.cos(1) * math.cosh(0.5))
    with pytest.raises(ValueError, match="non-physical root set"):
        magnon_energy([1 + 0.5j])
    with pytest.raises(ValueError):
        magnon_energy([])


def test_one_particle():
    sols = one_particle_solutions(5)
    assert len(sols) == 5
    np.testing.assert_allclose([s.momenta[0].real for s in sols], [2 * math.pi * m / 5 for m in range(5)])
    assert sols[0].energy == 0 and sols[0].cls == "vacuum-descendant"
    assert sum(s.energy for s in one_particle_solutions(6)) == pytest.approx(12)


def test_scattering_phase():
    assert scattering_phase(0.7, 0.7) == pytest.approx(math.pi)
    th = scattering_phase(2 * math.pi / 3, -2 * math.pi / 3)
    assert abs(cmath.exp(1j * th)) == pytest.approx(1)
    with pytest.raises(ZeroDivisionError, match="phase singularity"):
        scattering_phase(0, 0)


def test_scattering_phase_antisymmetry():
    rng = np.random.default_rng(3)
    for k1, k2 in rng.uniform(-math.pi, math.pi, size=(100, 2)):
        s = scattering_phase(k1, k2) + scattering_phase(k2, k1)
        assert abs(cmath.exp(1j * s) - 1) < 1e-12


@pytest.mark.parametrize("L", range(4, 13))
def test_two_particle_completeness(L):
    sols = solve_two_particle(L)
    assert len(sols) == L * (L - 1) // 2
    c = Counter(s.cls for s in sols)
    assert (c["vacuum-descendant"], c["real-scattering"], c["bound"]) == (L, (L - 3) * (L - 2) // 2, L - 3)
    for s in sols:
        assert s.bethe_residual < 1e-12
        assert all(0 <= m < L for m in s.m)
        # total momentum quantization
        K = sum(s.momenta).real
        assert abs(cmath.exp(1j * (K - 2 * math.pi * sum(s.m) / L)) - 1) < 1e-9
        if not s.singular:
            assert np.allclose(s.theta, -s.theta.T)


def test_bound_states_are_conjugate_pairs():
    for s in solve_two_particle(9):
        if s.cls == "bound" and not s.singular:
            k1, k2 = s.momenta
            assert k1.imag > 0 and abs(k1 - k2.conjugate()) < 1e-12


@pytest.mark.parametrize("L", range(4, 13))
@pytest.mark.parametrize("flavors,u,d", [("uu", 2, 0), ("dd", 0, 2)])
def test_two_particle_states_are_eigenstates(L, flavors, u, d):
    for s in solve_two_particle(L):
        v = two_particle_state(L, s, flavors)
        assert sector_residual(v, s.energy, L, u, d) < 1e-8


@pytest.mark.parametrize("L", range(4, 11))
def test_cyclic_mixed_flavor_states_are_eigenstates(L):
    for s in solve_two_particle(L):
        for fl in ("ud", "du"):
            v = two_particle_state(L, s, fl, cyclic=True)
            assert sector_residual(v, s.energy, L, 1, 1) < 1e-8


def test_ordered_mixed_flavor_states_are_not_eigenstates():
    # the ordered placement is not periodic on the ring
    s = next(x for x in solve_two_particle(6) if x.cls == "real-scattering")
    v = two_particle_state(6, s, "ud")
    assert sector_residual(v, s.energy, 6, 1, 1) > 0.1


@pytest.mark.parametrize("L", [4, 5, 6, 7])
def test_energies_match_sector_ed(L):
    ev = np.linalg.eigvalsh(sector_hamiltonian(L, 2, 0).to_dense())
    be = np.sort([s.energy for s in solve_two_particle(L)])
    np.testing.assert_allclose(np.sort(ev), be, atol=1e-8)


def test_zero_momentum_pair_is_equal_weight():
    s = next(x for x in solve_two_particle(6) if x.m == (0, 0))
    v = two_particle_state(6, s, "uu")
    np.testing.assert_allclose(np.abs(v.amps), 1 / math.sqrt(15))
    assert len(v) == 15


def test_dd_is_interchange_of_uu():
    X = interchange_op(5)
    for s in solve_two_particle(5):
        uu = two_particle_state(5, s, "uu")
        dd = two_particle_state(5, s, "dd")
        mapped = {next(iter(X.apply({c: 1}))): a for c, a in uu.as_dict().items()}
        assert StateVector.from_mapping(5, mapped).overlap(dd) == pytest.approx(1)


def test_singular_bound_state_even_L():
    s = next(x for x in solve_two_particle(8) if x.singular)
    assert s.energy == 2 and s.cls == "bound"
    d = s.to_dict()
    assert d["k_im"] == ["inf", "-inf"]
    v = two_particle_state(8, s, "uu")
    assert sector_residual(v, 2, 8, 2, 0) < 1e-12


def test_r1_reduces_to_plane_wave():
    L = 5
    for s in one_particle_solutions(L):
        v = r_particle_state(L, s.momenta, "u")
        amp = {decode(c, L).text.index("u") + 1: a for c, a in v.as_dict().items()}
        k = s.momenta[0].real
        for n in range(1, L + 1):
            assert amp[n] / amp[1] == pytest.approx(cmath.exp(1j * k * (n - 1)), abs=1e-12)


def test_r2_general_form_matches_two_particle_state():
    L = 7
    for s in solve_two_particle(L):
        if s.singular or s.m == (0, 0):
            continue
        a = two_particle_state(L, s, "uu")
        b = r_particle_state(L, s.momenta, "uu")
        assert abs(abs(a.overlap(b)) - 1) < 1e-6


def test_zero_momenta_give_zero_modes():
    L = 4
    H = hamiltonian(L)
    for fl in ("uuu", "uud", "udd", "dud"):
        v = r_particle_state(L, [0, 0, 0], fl, cyclic=True)
        assert eigen_residual(v, 0.0, H) < 1e-14


def test_three_particle_flavor_independence():
    # three real roots found from the XXX chain
    from scipy.optimize import fsolve

    L = 7
    m = (0, 2, 5)

    def eqs(k):
        th = lambda a, b: scattering_phase(a, b).real
        return [L * k[0] - 2 * math.pi * m[0] - th(k[0], k[1]) - th(k[0], k[2]),
                L * k[1] - 2 * math.pi * m[1] - th(k[1], k[0]) - th(k[1], k[2]),
                L * k[2] - 2 * math.pi * m[2] - th(k[2], k[0]) - th(k[2], k[1])]

    ks = fsolve(eqs, [0.3, 2 * math.pi * 2 / 7, 2 * math.pi * 5 / 7], xtol=1e-14)
    E = magnon_energy(ks)
    ev = np.linalg.eigvalsh(sector_hamiltonian(L, 3, 0).to_dense())
    assert np.min(np.abs(ev - E)) < 1e-8
    for fl in ("uuu", "ddd", "uud", "udd"):
        v = r_particle_state(L, ks, fl, cyclic=True)
        u = fl.count("u")
        assert sector_residual(v, E, L, u, 3 - u) < 1e-8


def test_flavor_length_mismatch():
    s = solve_two_particle(5)[3]
    with pytest.raises(ValueError):
        two_particle_state(5, s, "u")
    with pytest.raises(ValueError):
        r_particle_state(5, [0.1, 0.2], "uxd")


def test_eigen_residual():
    L = 4
    H = hamiltonian(L)
    flat = StateVector.from_mapping(L, {sector_codes(L, 0, 0)[0]: 1})
    assert eigen_residual(flat, 0, H) == 0
    with pytest.raises(ValueError):
        eigen_residual(StateVector.from_mapping(L, {0: 0}), 0, H)
    s = solve_two_particle(L)[4]
    v = two_particle_state(L, s, "uu")
    base = eigen_residual(v, s.energy, H)
    assert base < 1e-12
    rng = np.random.default_rng(1)
    delta = rng.normal(size=len(v)) * 1e-6
    r1 = eigen_residual(StateVector(L, v.codes, v.amps + delta), s.energy, H)
    r2 = eigen_residual(StateVector(L, v.codes, v.amps + 2 * delta), s.energy, H)
    assert r2 / r1 == pytest.approx(2, rel=1e-3)


def test_solution_json():
    data = json.loads(solutions_to_json(solve_two_particle(6)))
    assert len(data) == 15
    assert {"L", "r", "class", "m", "k_re", "k_im", "energy", "residual"} <= set(data[0])
