import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jch import NumericalError, SiteParams, UnitCellSpec
from jch.bloch import (
    band_energies,
    bloch_parts,
    build_block,
    closed_form_hole,
    closed_form_particle,
    diagonalize,
    hop_vector,
    k_grid,
    physical_hole_root,
    sample_band,
)

deltas = st.floats(-3, 3)
kappas = st.floats(0, 0.3)
momenta = st.floats(-math.pi, math.pi)


def uniform(delta, n, kappa, mu=-0.5):
    return UnitCellSpec.uniform(SiteParams.from_detuning(delta), n, kappa, mu)


def test_reference_point_at_zero_momentum(tuned):
    # delta = 0, kappa = 0.01, mu - omega = -0.5
    block = build_block(UnitCellSpec.uniform(tuned, 0, 0.01, -0.5), "particle", 0.0)
    assert np.allclose(block.matrix, [[0.48, 1.0], [1.0, 0.5]])
    w = diagonalize(block)
    assert math.isclose(w[0], 0.49 - math.sqrt(1.0001), rel_tol=1e-14)
    hole = diagonalize(build_block(UnitCellSpec.uniform(tuned, 1, 0.01, -0.5), "hole", 0.0))
    assert hole.shape == (1,) and math.isclose(hole[0], 0.49, rel_tol=1e-14)


def test_particle_gap_above_unit_filling(tuned):
    # frozen value from the block; the closed form agrees to 1e-15
    e = band_energies(uniform(0.0, 1, 0.01), "particle", [0.0])[0, 0]
    assert math.isclose(e, 0.05663555070843351, rel_tol=1e-12)


@given(st.integers(0, 6), deltas, kappas, st.lists(momenta, min_size=1, max_size=8))
def test_closed_form_particle_matches_block(n, delta, kappa, ks):
    if n == 0:
        delta = 0.0  # the closed form carries chi(0) = |delta|/2 at n = 0
    cell = uniform(delta, n, kappa)
    lo, hi = closed_form_particle(n, ks, cell.sites[0], kappa, cell.mu)
    e = band_energies(cell, "particle", ks)
    assert np.allclose(e[:, 0], lo, atol=1e-10) and np.allclose(e[:, 1], hi, atol=1e-10)


@given(st.integers(2, 6), deltas, kappas, st.lists(momenta, min_size=1, max_size=8))
def test_closed_form_hole_matches_block(n, delta, kappa, ks):
    cell = uniform(delta, n, kappa)
    lo, hi = closed_form_hole(n, ks, cell.sites[0], kappa, cell.mu)
    e = band_energies(cell, "hole", ks)
    assert np.allclose(e[:, 0], lo, atol=1e-10) and np.allclose(e[:, 1], hi, atol=1e-10)


@given(deltas, kappas, st.lists(momenta, min_size=1, max_size=8))
def test_single_hole_band_is_the_dispersive_root(delta, kappa, ks):
    cell = uniform(delta, 1, kappa)
    e = band_energies(cell, "hole", ks)[:, 0]
    assert np.allclose(e, physical_hole_root(ks, cell.sites[0], kappa, cell.mu), atol=1e-10)


@given(st.integers(0, 5), deltas, kappas, momenta)
def test_bands_are_even_and_periodic(n, delta, kappa, k):
    cell = uniform(delta, n, kappa)
    for sector in ("particle",) + (("hole",) if n else ()):
        e = band_energies(cell, sector, [k, -k, k + 2 * math.pi])
        assert np.allclose(e[0], e[1], atol=1e-12) and np.allclose(e[0], e[2], atol=1e-12)


@given(st.integers(1, 4), deltas, kappas, momenta)
def test_doubled_cell_folds_the_band(n, delta, kappa, k):
    site = SiteParams.from_detuning(delta)
    double = UnitCellSpec((site, site), (n, n), kappa, -0.4)
    single = UnitCellSpec.uniform(site, n, kappa, -0.4)
    for sector in ("particle", "hole"):
        folded = np.sort(band_energies(single, sector, [k / 2, k / 2 + math.pi]).ravel())
        assert np.allclose(band_energies(double, sector, [k])[0], folded, atol=1e-11)


@given(st.integers(0, 5), deltas, st.sampled_from(["particle", "hole"]))
def test_inter_cell_hop_is_rank_one(n, delta, sector):
    if sector == "hole" and n == 0:
        return
    site = SiteParams.from_detuning(delta)
    _, t, _ = bloch_parts(UnitCellSpec.uniform(site, n, 0.1, -0.5), sector)
    w = hop_vector(site, n, sector)
    assert np.allclose(t, -0.1 * np.outer(w, w), atol=1e-15)
    assert np.linalg.matrix_rank(t, tol=1e-12) == 1


@given(st.integers(0, 4), st.integers(0, 4), deltas, kappas, momenta)
def test_trace_identity(n0, n1, delta, kappa, k):
    # sum of band energies equals the trace of the Bloch block
    cell = UnitCellSpec((SiteParams.from_detuning(0.0), SiteParams.from_detuning(delta)),
                        (n0, n1), kappa, -0.5)
    block = build_block(cell, "particle", k)
    assert math.isclose(diagonalize(block).sum(), np.trace(block.matrix).real, abs_tol=1e-11)


@given(st.integers(1, 4), deltas, kappas, st.floats(-3, 3))
def test_energies_are_linear_in_mu(n, delta, kappa, shift):
    ks = k_grid(9)
    for sector, slope in (("particle", -1.0), ("hole", 1.0)):
        e0 = band_energies(uniform(delta, n, kappa, 0.0), sector, ks)
        e1 = band_energies(uniform(delta, n, kappa, shift), sector, ks)
        assert np.allclose(e1 - e0, slope * shift, atol=1e-11)


@given(deltas, kappas, st.floats(-20, 20))
def test_gauge_shift_leaves_bands_unchanged(delta, kappa, c):
    site = SiteParams.from_detuning(delta, omega=0.2)
    cell = UnitCellSpec((site, site), (1, 2), kappa, -0.3)
    moved = UnitCellSpec((site.shifted(c),) * 2, (1, 2), kappa, -0.3 + c)
    ks = k_grid(7)
    assert np.allclose(band_energies(cell, "particle", ks), band_energies(moved, "particle", ks),
                       atol=1e-10 * max(1.0, abs(c)))


def test_empty_cavities_have_no_hole_states(tuned, detuned):
    with pytest.raises(ValueError):
        build_block(UnitCellSpec.uniform(tuned, 0, 0.01, -1.0), "hole", 0.0)
    # a (1, 0) cell still has one hole state on the filled cavity
    e = band_energies(UnitCellSpec((tuned, detuned), (1, 0), 0.02, -0.5), "hole", [0.0])
    assert e.shape == (1, 1) and math.isclose(e[0, 0], 0.5, abs_tol=1e-15)


def test_doped_cell_reference_bands(tuned, detuned):
    e = band_energies(UnitCellSpec((tuned, detuned), (1, 1), 0.02, -0.5), "particle", [0.0])
    assert np.allclose(e[0], [0.04528557, 0.15849351, 2.91424004, 3.11804886], atol=5e-9)


def test_sample_band_grid_and_minimum(tuned):
    band = sample_band(UnitCellSpec.uniform(tuned, 1, 0.01, -0.5), "particle", 65)
    assert band.k_grid[0] == -math.pi and band.k_grid[-1] == math.pi
    assert band.minimum() == band.lowest()[32]


def test_invalid_cells():
    s = SiteParams(0.0, 0.0)
    with pytest.raises(ValueError):
        UnitCellSpec((s,), (1, 1), 0.1, 0.0)
    with pytest.raises(ValueError):
        UnitCellSpec((s,), (1,), -0.1, 0.0)
    with pytest.raises(ValueError):
        band_energies(UnitCellSpec((s,), (1,), 0.1, 0.0), "exciton", [0.0])
    with pytest.raises(ValueError):
        UnitCellSpec((s,), (1,), math.inf, 0.0)


def test_non_finite_eigenvalues_are_rejected():
    from jch.bloch import _eigh_checked

    with pytest.raises(NumericalError):
        _eigh_checked(np.array([[[np.nan, 0.0], [0.0, 1.0]]]), {})
