import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jch import SiteParams, UnitCellSpec
from jch import exact_diag as ed
from jch.bloch import band_energies
from jch.jc_core import dressed_energy


def brute_force_count(M, N):
    local = [(p, a) for p in range(N + 1) for a in (0, 1)]
    return sum(1 for cfg in product(local, repeat=M) if sum(p + a for p, a in cfg) == N)


@pytest.mark.parametrize("M,N", [(2, 0), (2, 3), (3, 2), (4, 4)])
def test_sector_dimension(M, N):
    basis = ed.enumerate_sector(M, N)
    assert basis.dim == brute_force_count(M, N)
    assert all(sum(p + a for p, a in s) == N for s in basis.states)


@given(st.integers(2, 4), st.integers(0, 3), st.floats(-2, 2), st.floats(0, 0.3),
       st.sampled_from(["ring", "open"]))
def test_sector_hamiltonian_is_real_symmetric(M, N, delta, kappa, bc):
    _, h = ed.build_sector(M, N, SiteParams.from_detuning(delta), kappa, bc)
    assert abs(h - h.T).max() == 0.0 if h.nnz else True


def test_excitation_number_is_conserved():
    # build the full truncated space and check [N, H] = 0
    site, kappa, M, cap = SiteParams.from_detuning(0.4), 0.13, 3, 2
    blocks = [ed.build_sector(M, N, site, kappa, "ring", n_max=cap) for N in range(0, 2 * M + 1)]
    numbers = np.concatenate([np.full(b.dim, b.N) for b, _ in blocks])
    h = np.zeros((numbers.size, numbers.size))
    off = 0
    for b, m in blocks:
        h[off:off + b.dim, off:off + b.dim] = m.toarray()
        off += b.dim
    n_op = np.diag(numbers.astype(float))
    assert np.abs(n_op @ h - h @ n_op).max() == 0.0


@pytest.mark.parametrize("M", [3, 4, 6, 8])
@pytest.mark.parametrize("delta", [0.0, 1.0, -0.7])
def test_single_excitation_ring_is_the_bloch_band(M, delta):
    site, kappa, mu = SiteParams.from_detuning(delta), 0.05, -0.5
    cell = UnitCellSpec.uniform(site, 0, kappa, mu)
    ks = 2 * np.pi * np.arange(M) / M
    expected = np.sort(band_energies(cell, "particle", ks).ravel())
    assert np.allclose(ed.ring_single_excitation_spectrum(M, site, kappa, mu), expected, atol=1e-13)


def test_two_site_ring_doubles_the_bond():
    site = SiteParams.from_detuning(0.0)
    ring = ed.ring_single_excitation_spectrum(2, site, 0.1, 0.0)
    _, h_open = ed.build_sector(2, 1, site, 0.1, "open")
    _, h_open_double = ed.build_sector(2, 1, site, 0.2, "open")
    assert not np.allclose(ring, np.linalg.eigvalsh(h_open.toarray()))
    assert np.allclose(ring, np.linalg.eigvalsh(h_open_double.toarray()), atol=1e-14)


def test_zero_hopping_is_a_product_of_cavities():
    site = SiteParams.from_detuning(0.6)
    assert math.isclose(ed.ground_energy(4, 4, site, 0.0), 4 * dressed_energy(1, site), rel_tol=1e-13)
    assert math.isclose(ed.ground_energy(3, 4, site, 0.0, "open"),
                        2 * dressed_energy(1, site) + dressed_energy(2, site), rel_tol=1e-13)


def test_ground_energy_references(tuned, detuned):
    assert math.isclose(ed.ground_energy(4, 4, tuned, 0.05), -4.0260488441651345, rel_tol=1e-12)
    assert math.isclose(ed.ground_energy(3, 3, detuned, 0.05, "open"), -4.856940752086818, rel_tol=1e-12)


def test_lanczos_path_agrees_with_dense(monkeypatch, tuned):
    dense = ed.ground_energy(4, 5, tuned, 0.07)
    monkeypatch.setattr(ed, "DENSE_LIMIT", 0)
    assert math.isclose(ed.ground_energy(4, 5, tuned, 0.07), dense, rel_tol=1e-12)


@given(st.floats(-1, 1), st.floats(0, 0.1))
def test_open_chain_is_reflection_symmetric(delta, kappa):
    site = SiteParams.from_detuning(delta)
    basis, h = ed.build_sector(3, 2, site, kappa, "open")
    perm = [basis.index[tuple(reversed(s))] for s in basis.states]
    p = np.eye(basis.dim)[perm]
    assert np.allclose(p @ h.toarray() @ p.T, h.toarray(), atol=0)


def test_plateau_edges_from_energies(tuned):
    spec = ed.EdSpectrum(2, "ring", 0.0, tuned, np.array([0.0, -1.0, -2.0, -2.5]))
    assert ed.plateau_edges(spec, 1) is None  # E0 not strictly convex at N = 1
    assert ed.plateau_edges(spec, 2) == (-1.0, -0.5)
    assert ed.filling_at(spec, -0.7) == 2
    with pytest.warns(RuntimeWarning):
        ed.filling_at(spec, 0.5)


def test_plateau_boundaries_at_zero_hopping(tuned):
    lo, hi = ed.plateau_boundaries(3, tuned, [0.0], target=1, bc="open")
    assert math.isclose(lo[0], -1.0, rel_tol=1e-12)
    assert math.isclose(hi[0], 1 - math.sqrt(2), rel_tol=1e-12)


def test_mean_excitation_staircase(tuned):
    spec = ed.sector_ground_energies(2, 5, tuned, 0.01)
    curve = ed.mean_excitation_curve(spec, [-1.5, -0.7, -0.38])
    assert list(curve) == [0.0, 1.0, 2.0]


def test_argument_validation(tuned):
    with pytest.raises(ValueError):
        ed.build_sector(1, 1, tuned, 0.1)
    with pytest.raises(ValueError):
        ed.bonds(3, "mobius")
    with pytest.raises(ValueError):
        ed.plateau_boundaries(2, tuned, [0.0], target=0)
